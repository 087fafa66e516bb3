use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Tensor-product Fock basis over a fixed list of truncated modes.
///
/// Mode `j` holds levels `0..dims[j]`. Basis vectors are ordered row-major
/// over the mode indices, so the last mode varies fastest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeSystem {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total_dim: usize,
}

impl ModeSystem {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(invalid("mode system needs at least one mode"));
        }
        if let Some(j) = dims.iter().position(|&d| d == 0) {
            return Err(invalid(format!("mode {j} has dimension 0")));
        }
        let total_dim = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| invalid("total dimension overflows"))?;
        let mut strides = vec![1; dims.len()];
        for j in (0..dims.len() - 1).rev() {
            strides[j] = strides[j + 1] * dims[j + 1];
        }
        Ok(Self {
            dims,
            strides,
            total_dim,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn dim(&self, mode: usize) -> Result<usize> {
        self.check_mode(mode)?;
        Ok(self.dims[mode])
    }

    /// Distance in the flat basis between neighbouring levels of `mode`.
    pub fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }

    /// Fock level of `mode` in the flat basis vector `index`.
    pub fn level(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % self.dims[mode]
    }

    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(invalid(format!(
                "expected {} levels, got {}",
                self.dims.len(),
                levels.len()
            )));
        }
        levels
            .iter()
            .zip(&self.dims)
            .zip(&self.strides)
            .try_fold(0, |acc, ((&n, &d), &s)| {
                if n < d {
                    Ok(acc + n * s)
                } else {
                    Err(invalid(format!("level {n} outside truncation {d}")))
                }
            })
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.dims.len() {
            Ok(())
        } else {
            Err(invalid(format!(
                "mode {mode} out of range for a {}-mode system",
                self.dims.len()
            )))
        }
    }

    pub fn is_two_mode(&self) -> bool {
        self.dims.len() == 2
    }

    /// Tensor product of single-mode matrices, identity on every mode not
    /// listed. A mode may appear at most once.
    pub fn embed(&self, factors: &[(usize, &DMatrix<Complex64>)]) -> Result<DMatrix<Complex64>> {
        let mut slots: Vec<Option<&DMatrix<Complex64>>> = vec![None; self.dims.len()];
        for &(mode, m) in factors {
            self.check_mode(mode)?;
            let d = self.dims[mode];
            if m.nrows() != d || m.ncols() != d {
                return Err(invalid(format!(
                    "single-mode matrix is {}x{}, mode {mode} has dimension {d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if slots[mode].replace(m).is_some() {
                return Err(invalid(format!("mode {mode} listed twice")));
            }
        }
        let mut out = DMatrix::<Complex64>::identity(1, 1);
        for (slot, &d) in slots.iter().zip(&self.dims) {
            out = match slot {
                Some(m) => out.kronecker(m),
                None => out.kronecker(&DMatrix::identity(d, d)),
            };
        }
        Ok(out)
    }
}

pub fn make_mode_system(dims: &[usize]) -> Result<ModeSystem> {
    ModeSystem::new(dims.to_vec())
}
