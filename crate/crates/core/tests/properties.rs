//! Invariants of the Fock core, the inequality engine and the LHV lab.

use cvbell::fock::{
    amplitude, amplitude_observables, annihilation, apply_loss, creation, expectation, interior_projector,
    make_mode_system, number, partial_transpose_matrix, partial_transpose_min_eig, pure_state, tmsv_state, CMatrix,
    Operator, QuantumState,
};
use cvbell::inequality::{correlator_set, evaluate, lhs_identity_check, wave_lhs, Variant};
use cvbell::lhv::{
    adversarial_search, constraint_residual, ensemble_correlators, sample_constrained, LhvAssignment, LhvEnsemble,
    SearchBounds, SearchConfig,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn quadratures_hermitian_for_all_orders() {
    for d in 1..=7 {
        for k in 1..=3 {
            let s = make_mode_system(&[d, 2]).unwrap();
            let obs = amplitude_observables(&s, 0, k).unwrap();
            for op in [&obs.x, &obs.y, &obs.n] {
                assert!(op.hermiticity_defect() < 1e-12, "d={d} k={k}");
            }
        }
    }
}

#[test]
fn square_sum_identity_on_interior() {
    for d in 2..=10 {
        let s = make_mode_system(&[d]).unwrap();
        let obs = amplitude_observables(&s, 0, 1).unwrap();
        let excess = &(&(&obs.x * &obs.x) + &(&obs.y * &obs.y)) - &obs.n;
        let half = &Operator::identity(&s) * 0.5;
        let defect = &(&excess - &half) * &interior_projector(&s, 0).unwrap();
        assert!(defect.max_abs() < 1e-10, "d={d}");
    }
}

#[test]
fn commutator_is_identity_on_interior_of_two_mode_system() {
    let s = make_mode_system(&[4, 5]).unwrap();
    for mode in 0..2 {
        let a = annihilation(&s, mode).unwrap();
        let c = a.commutator(&creation(&s, mode).unwrap()).unwrap();
        let p = interior_projector(&s, mode).unwrap();
        let defect = &(&c - &Operator::identity(&s)) * &p;
        assert!(defect.max_abs() < 1e-12);
    }
}

#[test]
fn loss_channel_preserves_trace_and_positivity() {
    let s = make_mode_system(&[3, 3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for i in 0..100 {
        let st = QuantumState::random_mixed(&s, 1 + i % 4, &mut rng);
        let eta = rng.random_range(0.0..=1.0);
        let out = apply_loss(&st, i % 2, eta).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-10);
        assert!(out.min_eigenvalue() > -1e-10);
    }
}

#[test]
fn loss_scales_coherence_and_intensity_correlation() {
    let s = make_mode_system(&[3, 3]).unwrap();
    let hop = &annihilation(&s, 0).unwrap() * &creation(&s, 1).unwrap();
    let nn = &number(&s, 0).unwrap() * &number(&s, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let st = QuantumState::random_mixed(&s, 2, &mut rng);
        let (e1, e2) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
        let lossy = apply_loss(&apply_loss(&st, 0, e1).unwrap(), 1, e2).unwrap();
        let before = expectation(&st, &hop).unwrap();
        let after = expectation(&lossy, &hop).unwrap();
        assert!((after - before * (e1 * e2).sqrt()).norm() < 1e-9);
        let before = expectation(&st, &nn).unwrap().re;
        let after = expectation(&lossy, &nn).unwrap().re;
        assert!((after - before * e1 * e2).abs() < 1e-9);
    }
}

#[test]
fn product_states_are_ppt() {
    let one = make_mode_system(&[3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let a = QuantumState::random_mixed(&one, 2, &mut rng);
        let b = QuantumState::random_mixed(&one, 3, &mut rng);
        let prod = a.tensor(&b).unwrap();
        assert!(partial_transpose_min_eig(&prod, 0).unwrap() >= -1e-10);
        assert!(partial_transpose_min_eig(&prod, 1).unwrap() >= -1e-10);
    }
}

proptest! {
    #[test]
    fn partial_transpose_is_an_involution(
        d1 in 1usize..4,
        d2 in 1usize..4,
        mode in 0usize..2,
        seed in any::<u64>(),
    ) {
        let s = make_mode_system(&[d1, d2]).unwrap();
        let n = s.total_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random(), rng.random()));
        let twice = partial_transpose_matrix(&s, &partial_transpose_matrix(&s, &m, mode).unwrap(), mode).unwrap();
        prop_assert_eq!(twice, m);
    }

    #[test]
    fn constrained_ensembles_never_violate(
        count in 1usize..12,
        seed in any::<u64>(),
        log_scale in -1.0f64..1.0,
    ) {
        let e = sample_constrained(count, seed, 10f64.powf(log_scale)).unwrap();
        let cs = ensemble_correlators(&e);
        let lhs = wave_lhs(&cs);
        let tol = 1e-12 * (1.0 + cs.n1n2);
        prop_assert!(lhs <= cs.n1n2 + tol);
        prop_assert!(lhs <= cs.n1 * cs.n2 + tol);
    }

    #[test]
    fn scaling_preserves_verdict(
        count in 1usize..8,
        seed in any::<u64>(),
        s in 0.1f64..10.0,
    ) {
        let e = sample_constrained(count, seed, 1.0).unwrap();
        let scaled = e.scaled(s).unwrap();
        let (a, b) = (ensemble_correlators(&e), ensemble_correlators(&scaled));
        let s4 = s.powi(4);
        prop_assert!((wave_lhs(&b) - s4 * wave_lhs(&a)).abs() <= 1e-10 * (1.0 + s4 * wave_lhs(&a)));
        prop_assert!((b.n1n2 - s4 * a.n1n2).abs() <= 1e-10 * (1.0 + s4 * a.n1n2));
        prop_assert_eq!(e.report(&[Variant::R1]).violated(Variant::R1), scaled.report(&[Variant::R1]).violated(Variant::R1));
    }
}

#[test]
fn lhs_identity_on_random_states() {
    let s = make_mode_system(&[4, 4]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for k in 1..=2 {
        for i in 0..25 {
            let st = QuantumState::random_mixed(&s, 1 + i % 3, &mut rng);
            assert!(lhs_identity_check(&st, k).unwrap() < 1e-9);
        }
    }
}

#[test]
fn strong_bound_dominates_constrained_bound() {
    let s = make_mode_system(&[5, 5]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let st = QuantumState::random_mixed(&s, 2, &mut rng);
        let cs = correlator_set(&st, 1).unwrap();
        assert!((cs.s1 - cs.n1 - 0.5).abs() < 1e-9 && (cs.s2 - cs.n2 - 0.5).abs() < 1e-9);
        let expected = cs.n1n2 + 0.5 * cs.n1 + 0.5 * cs.n2 + 0.25;
        assert!((cs.s1s2 - expected).abs() < 1e-9);
        assert!(cs.s1s2 >= cs.n1n2);
    }
}

#[test]
fn r1_verdict_survives_any_efficiency() {
    let s = make_mode_system(&[3, 3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let st = QuantumState::random_pure(&s, &mut rng);
        let base = evaluate(&st, 1, &[Variant::R1]).unwrap();
        for (e1, e2) in [(0.1, 0.9), (0.5, 0.5), (0.77, 0.2)] {
            let lossy = apply_loss(&apply_loss(&st, 0, e1).unwrap(), 1, e2).unwrap();
            let rep = evaluate(&lossy, 1, &[Variant::R1]).unwrap();
            assert!((rep.lhs - e1 * e2 * base.lhs).abs() < 1e-9);
            let m0 = base.margin(Variant::R1).unwrap();
            let m1 = rep.margin(Variant::R1).unwrap();
            assert!((m1 - e1 * e2 * m0).abs() < 1e-9);
        }
    }
}

#[test]
fn violation_implies_npt() {
    let s = make_mode_system(&[3, 3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violating = 0;
    let (i01, i10) = (s.index_of(&[0, 1]).unwrap(), s.index_of(&[1, 0]).unwrap());
    for i in 0..60 {
        let noise = if i % 2 == 0 { 0.1 } else { 0.6 };
        let mut amps: Vec<Complex64> = (0..9)
            .map(|_| Complex64::new(rng.random_range(-noise..noise), rng.random_range(-noise..noise)))
            .collect();
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        amps[i01] += theta.cos();
        amps[i10] += theta.sin();
        let st = pure_state(&s, &amps).unwrap();
        if evaluate(&st, 1, &[Variant::R1]).unwrap().violated(Variant::R1) {
            violating += 1;
            assert!(partial_transpose_min_eig(&st, 1).unwrap() < -1e-12);
        }
    }
    assert!(violating > 0);
}

#[test]
fn tmsv_has_no_exchange_coherence() {
    for (r, d) in [(0.1, 12), (0.5, 24), (0.7, 30)] {
        let s = make_mode_system(&[d, d]).unwrap();
        let st = tmsv_state(&s, r).unwrap();
        let hop = &amplitude(&s, 0, 1).unwrap() * &amplitude(&s, 1, 1).unwrap().adjoint();
        assert!(expectation(&st, &hop).unwrap().norm() < 1e-14);
        assert!(evaluate(&st, 1, &Variant::ALL).unwrap().lhs < 1e-20);
    }
}

#[test]
fn single_photon_states_keep_quantum_values_when_embedded_higher() {
    let s = make_mode_system(&[4, 4]).unwrap();
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    amps[s.index_of(&[0, 1]).unwrap()] = Complex64::new(1.0, 0.0);
    amps[s.index_of(&[1, 0]).unwrap()] = Complex64::new(1.0, 0.0);
    let rep = evaluate(&pure_state(&s, &amps).unwrap(), 1, &Variant::ALL).unwrap();
    assert!((rep.lhs - 0.25).abs() < 1e-12);
    assert!((rep.rhs(Variant::R3).unwrap() - 0.75).abs() < 1e-12);
    assert!((rep.rhs(Variant::R4).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn searches_are_reproducible_and_separate() {
    for seed in [0, 1] {
        let cfg = SearchConfig {
            constrained: true,
            variant: Variant::R2,
            budget: 10_000,
            bounds: SearchBounds::default(),
            seed,
        };
        let out = adversarial_search(&cfg).unwrap();
        assert_eq!(out, adversarial_search(&cfg).unwrap());
        assert!(out.best_score <= 1e-9);
        assert!(constraint_residual(&out.best_ensemble) < 1e-12);
    }
    // strong variant cannot be beaten even without the constraint
    let cfg = SearchConfig {
        constrained: false,
        variant: Variant::R3,
        budget: 10_000,
        bounds: SearchBounds::default(),
        seed: 2,
    };
    assert!(adversarial_search(&cfg).unwrap().best_score <= 1e-9);
}

#[test]
fn diagonal_lhv_points_match_hand_values() {
    let e = LhvEnsemble::new([
        (1.0, LhvAssignment::constrained(0.5, 0.0, 0.0, 0.5)),
        (3.0, LhvAssignment::constrained(0.0, 1.0, 1.0, 0.0)),
    ])
    .unwrap();
    let cs = ensemble_correlators(&e);
    // 0.25·(x1·y2) + 0.75·(y1·x2)
    assert!((cs.xy - 0.0625).abs() < 1e-15 && (cs.yx - 0.75).abs() < 1e-15);
    assert!((wave_lhs(&cs) - (0.0625f64 - 0.75).powi(2)).abs() < 1e-15);
}
