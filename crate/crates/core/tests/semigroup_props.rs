//! Cross-oracle and conservation checks for the covariance flow.

mod common;

use common::{c, random_psi2, rng};
use quasifree::linalg::{vec_normalized, C64};
use quasifree::scenarios::{sample_cp_params, sample_interior_state, sample_valid_state};
use quasifree::semigroup::{
    boundary_violation_rate, evolve_closed, evolve_numeric, first_negativity_time,
    quadratic_form_rate, SingleModeParams, TwoModeParams,
};
use quasifree::states::{build_critical_state, SingleModeState, TwoModeState};
use rand::Rng;

/// Decaying-or-neutral parameter draw (`σ ≤ η`), the regime where a fixed
/// 1e-3 step keeps the RK4 global error far below the comparison tolerance.
fn sample_contractive_params(r: &mut impl Rng) -> SingleModeParams {
    let eta = r.gen::<f64>();
    let sigma = eta * r.gen::<f64>();
    let lam = C64::from_polar(r.gen::<f64>(), 2.0 * std::f64::consts::PI * r.gen::<f64>());
    SingleModeParams::new(r.gen::<f64>(), eta, sigma, lam).unwrap()
}

#[test]
fn closed_form_matches_rk4_single_mode() {
    let mut r = rng(0x0DE5);
    for i in 0..20 {
        let p = if i == 0 {
            // Exact resonance σ = η exercises the r -> 0 branch.
            SingleModeParams::new(0.3, 0.7, 0.7, c(0.5, 0.2)).unwrap()
        } else {
            sample_contractive_params(&mut r)
        };
        let g0 = sample_valid_state(&mut r).matrix();
        let t = 10.0 * r.gen::<f64>();
        let a = evolve_closed(&g0, &p.drift(), t);
        let b = evolve_numeric(&g0, &p.drift(), t, 1e-3).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-8, "mismatch {} at t={t}", a.sub(&b).max_abs());
    }
}

#[test]
fn closed_form_matches_rk4_two_mode() {
    let mut r = rng(0x2D0D);
    for _ in 0..10 {
        let p1 = sample_contractive_params(&mut r);
        let p = TwoModeParams::new(p1.omega, r.gen::<f64>(), p1.eta, p1.sigma, p1.lam).unwrap();
        let st = build_critical_state(
            &sample_interior_state(&mut r),
            &sample_interior_state(&mut r),
        )
        .unwrap();
        let t = 10.0 * r.gen::<f64>();
        let a = evolve_closed(st.matrix(), &p.drift(), t);
        let b = evolve_numeric(st.matrix(), &p.drift(), t, 1e-3).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-8);
    }
}

/// The commutator diagonal difference stays exactly 1 along the flow.
#[test]
fn commutator_structure_is_conserved() {
    let mut r = rng(0xCC12);
    for _ in 0..50 {
        let p = sample_cp_params(&mut r);
        let g0 = sample_valid_state(&mut r).matrix();
        for k in 1..=10 {
            let g = evolve_closed(&g0, &p.drift(), 0.5 * k as f64);
            let diff = g.get(0, 0).re - g.get(1, 1).re;
            assert!((diff - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn evolved_matrices_are_hermitian() {
    let mut r = rng(0x4E12);
    for _ in 0..50 {
        let p = sample_cp_params(&mut r);
        let g0 = sample_valid_state(&mut r).matrix();
        let t = 5.0 * r.gen::<f64>();
        for g in [
            evolve_closed(&g0, &p.drift(), t),
            evolve_numeric(&g0, &p.drift(), t, 1e-2).unwrap(),
        ] {
            for j in 0..2 {
                for k in 0..2 {
                    assert!((g.get(j, k) - g.get(k, j).conj()).norm() < 1e-11);
                }
            }
        }
    }
}

/// Complete positivity keeps every valid state positive (smoke version of
/// the acceptance sweep).
#[test]
fn cp_flow_preserves_positivity() {
    let mut r = rng(0x3333);
    for _ in 0..10 {
        let p = sample_cp_params(&mut r);
        let horizon = 5.0 / (p.eta + p.sigma).max(1.0);
        for _ in 0..20 {
            let g0 = sample_valid_state(&mut r).matrix();
            for k in 0..=50 {
                let g = evolve_closed(&g0, &p.drift(), horizon * k as f64 / 50.0);
                assert!(g.min_eigenvalue() >= -1e-8);
            }
        }
    }
}

/// Under unitary-only dynamics the spectrum is frozen.
#[test]
fn unitary_flow_is_isospectral() {
    let mut r = rng(0x5555);
    for _ in 0..20 {
        let p = SingleModeParams::new(2.0 * r.gen::<f64>(), 0.0, 0.0, c(0.0, 0.0)).unwrap();
        let g0 = sample_valid_state(&mut r).matrix();
        let e0 = g0.eigenvalues();
        let g = evolve_closed(&g0, &p.drift(), 10.0 * r.gen::<f64>());
        let e = g.eigenvalues();
        for (a, b) in e0.iter().zip(&e) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

/// Under the compound drift the unitary mode-2 block keeps its spectrum.
#[test]
fn compound_flow_mode2_block_isospectral() {
    let mut r = rng(0x6666);
    for _ in 0..20 {
        let p = TwoModeParams::new(
            r.gen::<f64>(),
            2.0 * r.gen::<f64>(),
            1.5 * r.gen::<f64>(),
            0.5 * r.gen::<f64>(),
            C64::from_polar(r.gen::<f64>(), 6.0 * r.gen::<f64>()),
        )
        .unwrap();
        let st = build_critical_state(
            &sample_interior_state(&mut r),
            &sample_interior_state(&mut r),
        )
        .unwrap();
        let e0 = st.g2_block().eigenvalues();
        let g = evolve_closed(st.matrix(), &p.drift(), 7.0 * r.gen::<f64>());
        let e = g.diag_block(1).eigenvalues();
        for (a, b) in e0.iter().zip(&e) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

/// The instantaneous quadratic-form rate agrees with a centered finite
/// difference of the evolved expectation value.
#[test]
fn rate_matches_finite_difference() {
    let mut r = rng(0x7777);
    for _ in 0..100 {
        let p = TwoModeParams::new(
            r.gen::<f64>(),
            r.gen::<f64>(),
            r.gen::<f64>(),
            r.gen::<f64>(),
            C64::from_polar(r.gen::<f64>(), 6.0 * r.gen::<f64>()),
        )
        .unwrap();
        let st = build_critical_state(
            &sample_interior_state(&mut r),
            &sample_interior_state(&mut r),
        )
        .unwrap();
        let psi2a = random_psi2(&mut r);
        let psi2b = random_psi2(&mut r);
        let psi: Vec<C64> = psi2a.into_iter().chain(psi2b).collect();
        let psi = vec_normalized(&psi);
        let rate = quadratic_form_rate(&st, &p.drift(), &psi);
        let h = 1e-5;
        let q = |t: f64| evolve_closed(st.matrix(), &p.drift(), t).quadratic_form(&psi);
        // One-sided at 0 (negative times are outside the semigroup), second
        // order via Richardson.
        let fd = (4.0 * q(h) - q(2.0 * h) - 3.0 * q(0.0)) / (2.0 * h);
        assert!((rate - fd).abs() < 1e-6, "rate {rate} vs fd {fd}");
    }
}

/// In the non-CP regime with vanishing upward rate the worst boundary state
/// violates positivity immediately at every occupation.
#[test]
fn noncp_boundary_rate_negative_for_eta_above_sigma() {
    let mut r = rng(0x8888);
    for _ in 0..20 {
        let eta = 0.1 + 1.9 * r.gen::<f64>();
        let lam = C64::from_polar(
            eta * (1.0 + r.gen::<f64>()),
            2.0 * std::f64::consts::PI * r.gen::<f64>(),
        );
        let p = SingleModeParams::new(r.gen::<f64>(), eta, 0.0, lam).unwrap();
        assert!(!p.is_completely_positive());
        let mut beta = 1.01;
        while beta <= 10.0 {
            assert!(boundary_violation_rate(&p, beta) < 0.0);
            beta += 0.05;
        }
    }
}

/// CP parameters never produce a negativity time.
#[test]
fn cp_flow_has_no_negativity_onset() {
    let mut r = rng(0x9999);
    for _ in 0..10 {
        let p = sample_cp_params(&mut r);
        let g0 = sample_valid_state(&mut r).matrix();
        let horizon = 5.0 / (p.eta + p.sigma).max(1.0);
        assert!(first_negativity_time(&g0, &p.drift(), horizon, 0.05).is_none());
    }
}

/// The compound escape of a critical state happens strictly before either
/// marginal can misbehave.
#[test]
fn compound_escape_precedes_marginal_breakdown() {
    let p = TwoModeParams::new(0.0, 0.0, 1.0, 0.0, c(0.8, 0.0)).unwrap();
    let g = SingleModeState::new(2.0, c(0.0, 0.0)).unwrap();
    let st = build_critical_state(&g, &g).unwrap();
    let t_c = first_negativity_time(st.matrix(), &p.drift(), 5.0, 0.01).unwrap();
    let t_m1 = first_negativity_time(&st.g1_block(), &p.mode1().drift(), 5.0, 0.01).unwrap();
    let t_m2 = first_negativity_time(&st.g2_block(), &p.mode2().drift(), 5.0, 0.01);
    assert!(t_c > 0.0 && t_c <= 0.01);
    assert!(t_c < t_m1);
    assert!(t_m2.is_none());
}

/// Already-negative inputs report onset zero.
#[test]
fn negativity_time_zero_for_invalid_input() {
    let p = SingleModeParams::new(0.0, 1.0, 0.0, c(0.0, 0.0)).unwrap();
    let g0 = TwoModeState::product(
        &SingleModeState::new(2.0, c(2.0, 0.0)).unwrap(),
        &SingleModeState::vacuum(),
    );
    let g1 = g0.g1_block();
    assert_eq!(first_negativity_time(&g1, &p.drift(), 1.0, 0.1), Some(0.0));
}
