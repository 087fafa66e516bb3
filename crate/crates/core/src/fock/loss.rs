//! Pure-loss channel modelling a detector of efficiency `η`.

use num_complex::Complex64;

use super::operator::CMatrix;
use super::state::QuantumState;
use crate::error::{invalid, Result};

/// Kraus amplitudes `√(C(n,ℓ) ηⁿ⁻ˡ (1−η)ˡ)` indexed `[n][ℓ]` for `ℓ ≤ n < d`.
fn kraus_amplitudes(d: usize, eta: f64) -> Vec<Vec<f64>> {
    (0..d)
        .map(|n| {
            let mut binom = 1.0;
            (0..=n)
                .map(|l| {
                    if l > 0 {
                        binom *= (n + 1 - l) as f64 / l as f64;
                    }
                    (binom * eta.powi((n - l) as i32) * (1.0 - eta).powi(l as i32)).sqrt()
                })
                .collect()
        })
        .collect()
}

/// Sends `mode` through a beam splitter of transmissivity `eta` with the
/// reflected port traced out.
///
/// Each Kraus operator `K_ℓ` removes exactly `ℓ` photons, so it is applied as
/// a shift of the mode's level in both the row and column index.
pub fn apply_loss(state: &QuantumState, mode: usize, eta: f64) -> Result<QuantumState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("efficiency must lie in [0, 1], got {eta}")));
    }
    let system = state.system();
    let d = system.dim(mode)?;
    if eta == 1.0 {
        return Ok(state.clone());
    }
    let n = system.total_dim();
    let stride = system.stride(mode);
    let k = kraus_amplitudes(d, eta);
    let rho = state.rho();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let lj = system.level(j, mode);
        for i in 0..n {
            let v = rho[(i, j)];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let li = system.level(i, mode);
            for l in 0..=li.min(lj) {
                out[(i - l * stride, j - l * stride)] += v * (k[li][l] * k[lj][l]);
            }
        }
    }
    Ok(QuantumState::from_parts(
        system.clone(),
        out,
        false,
        state.truncation_loss(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::make_mode_system;

    #[test]
    fn unit_efficiency_is_identity() {
        let s = make_mode_system(&[3, 2]).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let st = QuantumState::random_mixed(&s, 3, &mut rng);
        assert_eq!(apply_loss(&st, 0, 1.0).unwrap().rho(), st.rho());
    }

    #[test]
    fn zero_efficiency_resets_mode() {
        let s = make_mode_system(&[3, 2]).unwrap();
        let st = QuantumState::fock(&s, &[2, 1]).unwrap();
        let out = apply_loss(&st, 0, 0.0).unwrap();
        assert_eq!(out.rho(), QuantumState::fock(&s, &[0, 1]).unwrap().rho());
    }

    #[test]
    fn single_photon_at_seventy_percent() {
        // frozen from the binomial-thinning oracle: 0.3|0><0| + 0.7|1><1|
        let s = make_mode_system(&[2]).unwrap();
        let st = QuantumState::fock(&s, &[1]).unwrap();
        let out = apply_loss(&st, 0, 0.7).unwrap();
        assert!((out.rho()[(0, 0)].re - 0.3).abs() < 1e-15);
        assert!((out.rho()[(1, 1)].re - 0.7).abs() < 1e-15);
        assert_eq!(out.rho()[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_out_of_range_efficiency() {
        let s = make_mode_system(&[2]).unwrap();
        let st = QuantumState::vacuum(&s);
        assert!(apply_loss(&st, 0, 1.1).is_err());
        assert!(apply_loss(&st, 0, -0.1).is_err());
        assert!(apply_loss(&st, 0, f64::NAN).is_err());
        assert!(apply_loss(&st, 1, 0.5).is_err());
    }
}
