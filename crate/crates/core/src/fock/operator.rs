use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::system::ModeSystem;
use crate::error::{invalid, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Dense complex matrix acting on the tensor-product basis of a [`ModeSystem`].
///
/// The arithmetic operator impls panic when the two operands live on
/// different systems; use [`Operator::compose`] for a checked product.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    system: ModeSystem,
    matrix: CMatrix,
}

impl Operator {
    pub fn from_matrix(system: &ModeSystem, matrix: CMatrix) -> Result<Self> {
        let n = system.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(invalid(format!(
                "operator matrix is {}x{}, system dimension is {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            system: system.clone(),
            matrix,
        })
    }

    pub fn identity(system: &ModeSystem) -> Self {
        let n = system.total_dim();
        Self {
            system: system.clone(),
            matrix: CMatrix::identity(n, n),
        }
    }

    /// Embeds a single-mode matrix as `I ⊗ .. ⊗ m ⊗ .. ⊗ I`.
    pub fn local(system: &ModeSystem, mode: usize, single: &CMatrix) -> Result<Self> {
        Self::tensor(system, &[(mode, single)])
    }

    /// Tensor product of single-mode factors on distinct modes.
    pub fn tensor(system: &ModeSystem, factors: &[(usize, &CMatrix)]) -> Result<Self> {
        Ok(Self {
            system: system.clone(),
            matrix: system.embed(factors)?,
        })
    }

    pub fn system(&self) -> &ModeSystem {
        &self.system
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            system: self.system.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `max |O - O†|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() < tol
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn compose(&self, other: &Operator) -> Result<Self> {
        self.same_system(other)?;
        Ok(Self {
            system: self.system.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        Ok(&self.compose(other)? - &other.compose(self)?)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Operator::identity(&self.system);
        for _ in 0..k {
            out.matrix = &out.matrix * &self.matrix;
        }
        out
    }

    fn same_system(&self, other: &Operator) -> Result<()> {
        if self.system == other.system {
            Ok(())
        } else {
            Err(invalid(format!(
                "operators act on different systems {:?} and {:?}",
                self.system.dims(),
                other.system.dims()
            )))
        }
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Operator> for &Operator {
            type Output = Operator;

            fn $method(self, rhs: &Operator) -> Operator {
                assert_eq!(self.system, rhs.system, "operator systems differ");
                Operator {
                    system: self.system.clone(),
                    matrix: &self.matrix $op &rhs.matrix,
                }
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);
binary_op!(Mul, mul, *);

impl Mul<Complex64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: Complex64) -> Operator {
        Operator {
            system: self.system.clone(),
            matrix: &self.matrix * rhs,
        }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: f64) -> Operator {
        self * Complex64::new(rhs, 0.0)
    }
}

/// Single-mode annihilation matrix on `d` levels: `⟨n−1|â|n⟩ = √n`.
pub fn lowering_matrix(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn annihilation(system: &ModeSystem, mode: usize) -> Result<Operator> {
    let d = system.dim(mode)?;
    Operator::local(system, mode, &lowering_matrix(d))
}

pub fn creation(system: &ModeSystem, mode: usize) -> Result<Operator> {
    Ok(annihilation(system, mode)?.adjoint())
}

/// Photon-number operator `â†â` of one mode.
pub fn number(system: &ModeSystem, mode: usize) -> Result<Operator> {
    let d = system.dim(mode)?;
    let diag = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(i as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Operator::local(system, mode, &diag)
}

/// Single-mode matrices of the generalized amplitude `Ĉ = âᵏ`, its
/// quadratures and intensity, all as plain truncated products.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeObservables {
    pub c: CMatrix,
    pub x: CMatrix,
    pub y: CMatrix,
    pub n: CMatrix,
}

impl SingleModeObservables {
    pub fn new(d: usize, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(invalid("amplitude order k must be at least 1"));
        }
        let a = lowering_matrix(d);
        let mut c = CMatrix::identity(d, d);
        for _ in 0..k {
            c = &c * &a;
        }
        let cd = c.adjoint();
        let x = (&c + &cd) * Complex64::new(0.5, 0.0);
        let y = (&c - &cd) * Complex64::new(0.0, -0.5);
        let n = &cd * &c;
        Ok(Self { c, x, y, n })
    }

    /// `Ĉx² + Ĉy²` with the matrix elements of the untruncated operator.
    ///
    /// Products of truncated quadratures lose the `ĈĈ†` contribution on the
    /// top `k` levels. Evaluating in a space padded by `k` levels and cutting
    /// back to `d` restores the exact elements.
    pub fn square_sum(d: usize, k: u32) -> Result<CMatrix> {
        let padded = Self::new(d + k as usize, k)?;
        let full = &padded.x * &padded.x + &padded.y * &padded.y;
        Ok(full.view((0, 0), (d, d)).into_owned())
    }
}

/// Quadratures `X̂ = (Ĉ+Ĉ†)/2`, `Ŷ = (Ĉ−Ĉ†)/2i` and intensity `N̂ = Ĉ†Ĉ`
/// of one mode, with `Ĉ = âᵏ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeObservables {
    pub x: Operator,
    pub y: Operator,
    pub n: Operator,
}

pub fn amplitude_observables(system: &ModeSystem, mode: usize, k: u32) -> Result<AmplitudeObservables> {
    let d = system.dim(mode)?;
    let single = SingleModeObservables::new(d, k)?;
    Ok(AmplitudeObservables {
        x: Operator::local(system, mode, &single.x)?,
        y: Operator::local(system, mode, &single.y)?,
        n: Operator::local(system, mode, &single.n)?,
    })
}

/// The generalized amplitude `Ĉ = âᵏ` of one mode.
pub fn amplitude(system: &ModeSystem, mode: usize, k: u32) -> Result<Operator> {
    let d = system.dim(mode)?;
    Operator::local(system, mode, &SingleModeObservables::new(d, k)?.c)
}

/// `Ĉx² + Ĉy²` of one mode, free of truncation artifacts on the kept levels.
pub fn quadrature_square_sum(system: &ModeSystem, mode: usize, k: u32) -> Result<Operator> {
    let d = system.dim(mode)?;
    Operator::local(system, mode, &SingleModeObservables::square_sum(d, k)?)
}

/// Projector onto levels `0..d−1` of `mode` (all but the top level), the
/// region where truncated operator identities hold exactly.
pub fn interior_projector(system: &ModeSystem, mode: usize) -> Result<Operator> {
    let d = system.dim(mode)?;
    let p = CMatrix::from_fn(d, d, |i, j| {
        if i == j && i + 1 < d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Operator::local(system, mode, &p)
}
