//! Partial-transpose (Peres–Horodecki) entanglement witness.

use super::operator::CMatrix;
use super::state::{min_hermitian_eigenvalue, QuantumState};
use super::system::ModeSystem;
use crate::error::{invalid, Result};

/// Transposes `matrix` on the indices of `mode`, leaving other modes intact.
pub fn partial_transpose_matrix(system: &ModeSystem, matrix: &CMatrix, mode: usize) -> Result<CMatrix> {
    system.check_mode(mode)?;
    let n = system.total_dim();
    if matrix.nrows() != n || matrix.ncols() != n {
        return Err(invalid("matrix does not match the system dimension"));
    }
    let stride = system.stride(mode);
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let li = system.level(i, mode);
        let lj = system.level(j, mode);
        // swap the mode's level between the row and column index
        let src_i = i - li * stride + lj * stride;
        let src_j = j - lj * stride + li * stride;
        matrix[(src_i, src_j)]
    }))
}

pub fn partial_transpose(state: &QuantumState, mode: usize) -> Result<CMatrix> {
    partial_transpose_matrix(state.system(), state.rho(), mode)
}

/// Smallest eigenvalue of `ρ^{T_mode}`; a negative value certifies
/// entanglement. Two-mode systems only.
pub fn partial_transpose_min_eig(state: &QuantumState, mode: usize) -> Result<f64> {
    if !state.system().is_two_mode() {
        return Err(invalid(format!(
            "partial-transpose witness needs a two-mode system, got {} modes",
            state.system().num_modes()
        )));
    }
    Ok(min_hermitian_eigenvalue(&partial_transpose(state, mode)?))
}
