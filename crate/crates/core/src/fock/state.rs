use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::operator::{max_abs, CMatrix, Operator};
use super::system::ModeSystem;
use crate::error::{invalid, Error, Result};

/// Allowed deviation of `tr ρ` from one.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Smallest eigenvalue accepted as nonnegative.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
/// Default bound on probability mass discarded by truncating an ideal state.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Density matrix on a truncated multimode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    system: ModeSystem,
    rho: CMatrix,
    purity_hint: bool,
    truncation_loss: f64,
}

impl QuantumState {
    /// `|ψ⟩⟨ψ|` for the normalized amplitude vector.
    pub fn pure(system: &ModeSystem, amplitudes: &[Complex64]) -> Result<Self> {
        let n = system.total_dim();
        if amplitudes.len() != n {
            return Err(invalid(format!("expected {n} amplitudes, got {}", amplitudes.len())));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(invalid("amplitude vector has zero or non-finite norm"));
        }
        let psi = nalgebra::DVector::from_iterator(n, amplitudes.iter().map(|z| z / norm));
        Ok(Self {
            system: system.clone(),
            rho: &psi * psi.adjoint(),
            purity_hint: true,
            truncation_loss: 0.0,
        })
    }

    /// Wraps an explicit density matrix after normalizing its trace and
    /// checking Hermiticity and positivity.
    pub fn from_density_matrix(system: &ModeSystem, rho: CMatrix) -> Result<Self> {
        let n = system.total_dim();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(invalid(format!(
                "density matrix is {}x{}, system dimension is {n}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let tr = rho.trace();
        if tr.re.is_nan() || tr.re <= 0.0 || tr.im.abs() > TRACE_TOLERANCE * tr.re {
            return Err(invalid(format!("density matrix trace {tr} is not positive real")));
        }
        let state = Self {
            system: system.clone(),
            rho: rho / Complex64::new(tr.re, 0.0),
            purity_hint: false,
            truncation_loss: 0.0,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn vacuum(system: &ModeSystem) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); system.total_dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self::pure(system, &amps).expect("vacuum amplitudes are valid")
    }

    /// Product Fock state `|n₁ n₂ …⟩`.
    pub fn fock(system: &ModeSystem, levels: &[usize]) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); system.total_dim()];
        amps[system.index_of(levels)?] = Complex64::new(1.0, 0.0);
        Self::pure(system, &amps)
    }

    /// Mixture diagonal in the product Fock basis, one weight per basis vector.
    pub fn fock_diagonal(system: &ModeSystem, weights: &[f64]) -> Result<Self> {
        let n = system.total_dim();
        if weights.len() != n {
            return Err(invalid(format!("expected {n} weights, got {}", weights.len())));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(invalid("diagonal weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(invalid("diagonal weights sum to zero"));
        }
        let rho = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(weights[i] / total, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self {
            system: system.clone(),
            rho,
            purity_hint: false,
            truncation_loss: 0.0,
        })
    }

    /// Haar-like random pure state from a complex Gaussian vector.
    pub fn random_pure<R: Rng + ?Sized>(system: &ModeSystem, rng: &mut R) -> Self {
        let amps: Vec<Complex64> = (0..system.total_dim())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::pure(system, &amps).expect("gaussian vector is nonzero")
    }

    /// Random mixed state `GG†/tr(GG†)` with a `total_dim × rank` Ginibre `G`.
    pub fn random_mixed<R: Rng + ?Sized>(system: &ModeSystem, rank: usize, rng: &mut R) -> Self {
        let n = system.total_dim();
        let rank = rank.max(1);
        let g = DMatrix::from_fn(n, rank, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let rho = &g * g.adjoint();
        let tr = rho.trace().re;
        Self {
            system: system.clone(),
            rho: rho / Complex64::new(tr, 0.0),
            purity_hint: rank == 1,
            truncation_loss: 0.0,
        }
    }

    /// `ρ_self ⊗ ρ_other` on the concatenated mode list.
    pub fn tensor(&self, other: &QuantumState) -> Result<Self> {
        let dims: Vec<usize> = self.system.dims().iter().chain(other.system.dims()).copied().collect();
        Ok(Self {
            system: ModeSystem::new(dims)?,
            rho: self.rho.kronecker(&other.rho),
            purity_hint: self.purity_hint && other.purity_hint,
            truncation_loss: 1.0 - (1.0 - self.truncation_loss) * (1.0 - other.truncation_loss),
        })
    }

    pub(crate) fn from_parts(system: ModeSystem, rho: CMatrix, purity_hint: bool, truncation_loss: f64) -> Self {
        Self {
            system,
            rho,
            purity_hint,
            truncation_loss,
        }
    }

    pub fn system(&self) -> &ModeSystem {
        &self.system
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    /// Set when the state was built from an amplitude vector.
    pub fn purity_hint(&self) -> bool {
        self.purity_hint
    }

    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.rho)
    }

    /// Population of each level of `mode`.
    pub fn level_populations(&self, mode: usize) -> Result<Vec<f64>> {
        let d = self.system.dim(mode)?;
        let mut pops = vec![0.0; d];
        for i in 0..self.system.total_dim() {
            pops[self.system.level(i, mode)] += self.rho[(i, i)].re;
        }
        Ok(pops)
    }

    /// Checks unit trace, Hermiticity and positivity at the default tolerances.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::NumericalConsistency(format!("trace is {tr}")));
        }
        let defect = max_abs(&(&self.rho - self.rho.adjoint()));
        if defect > HERMITICITY_TOLERANCE {
            return Err(Error::NumericalConsistency(format!(
                "density matrix not Hermitian (defect {defect:.3e})"
            )));
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::NumericalConsistency(format!(
                "density matrix has eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }
}

pub(crate) fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    // symmetrize to shed rounding noise before the Hermitian solver
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn pure_state(system: &ModeSystem, amplitudes: &[Complex64]) -> Result<QuantumState> {
    QuantumState::pure(system, amplitudes)
}

/// Two-mode squeezed vacuum with amplitudes `∝ tanhⁿ(r)` on `|n,n⟩`, at the
/// default tail tolerance.
pub fn tmsv_state(system: &ModeSystem, r: f64) -> Result<QuantumState> {
    tmsv_state_with_tolerance(system, r, TAIL_TOLERANCE)
}

pub fn tmsv_state_with_tolerance(system: &ModeSystem, r: f64, tail_tolerance: f64) -> Result<QuantumState> {
    let dims = system.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(invalid(format!(
            "two-mode squeezed vacuum needs two modes of equal dimension, got {dims:?}"
        )));
    }
    if !r.is_finite() || r < 0.0 {
        return Err(invalid(format!("squeezing parameter must be finite and >= 0, got {r}")));
    }
    let d = dims[0];
    let lambda = r.tanh();
    // untruncated weights (1−λ²)λ²ⁿ; the tail beyond n = d−1 sums to λ²ᵈ
    let loss = lambda.powi(2 * d as i32);
    if loss > tail_tolerance {
        return Err(Error::Truncation {
            loss,
            tolerance: tail_tolerance,
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); system.total_dim()];
    for n in 0..d {
        amps[system.index_of(&[n, n])?] = Complex64::new(lambda.powi(n as i32), 0.0);
    }
    let mut state = QuantumState::pure(system, &amps)?;
    state.truncation_loss = loss;
    Ok(state)
}

/// `tr(ρ·O)`.
pub fn expectation(state: &QuantumState, op: &Operator) -> Result<Complex64> {
    if state.system() != op.system() {
        return Err(invalid(format!(
            "state on {:?} but operator on {:?}",
            state.system().dims(),
            op.system().dims()
        )));
    }
    Ok(trace_product(state.rho(), op.matrix()))
}

/// `tr(A·B)` without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}
