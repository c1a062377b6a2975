//! Shared fixtures for the benchmark targets.

use num_complex::Complex;
use quasifree::linalg::{HermitianMatrix, C64};
use quasifree::semigroup::{Drift, TwoModeParams};
use quasifree::states::{build_critical_state, SingleModeState, TwoModeState};

/// The non-CP compound generator used in the headline demonstration.
pub fn headline_params() -> TwoModeParams {
    TwoModeParams::new(0.0, 0.3, 1.0, 0.0, Complex::new(0.8, 0.0)).unwrap()
}

pub fn headline_drift() -> Drift {
    headline_params().drift()
}

/// Correlated two-mode state with dense, well-conditioned blocks.
pub fn dense_critical_state() -> TwoModeState {
    let g1 = SingleModeState::new(2.4, C64::new(0.7, 0.3)).unwrap();
    let g2 = SingleModeState::new(1.9, C64::new(-0.4, 0.5)).unwrap();
    build_critical_state(&g1, &g2).unwrap()
}

/// A dense indefinite 4×4 Hermitian matrix for eigenvalue benchmarks.
pub fn dense_hermitian4() -> HermitianMatrix {
    HermitianMatrix::new(
        4,
        vec![
            C64::new(1.2, 0.0), C64::new(0.4, 0.7), C64::new(-0.3, 0.2), C64::new(0.0, -0.6),
            C64::new(0.4, -0.7), C64::new(-0.8, 0.0), C64::new(0.5, 0.0), C64::new(0.2, 0.1),
            C64::new(-0.3, -0.2), C64::new(0.5, 0.0), C64::new(2.1, 0.0), C64::new(-0.4, 0.3),
            C64::new(0.0, 0.6), C64::new(0.2, -0.1), C64::new(-0.4, -0.3), C64::new(0.3, 0.0),
        ],
    )
    .unwrap()
}
