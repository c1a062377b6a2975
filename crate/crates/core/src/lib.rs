//! Simulation toolkit for single- and two-mode bosonic Gaussian states
//! evolving under quasi-free Markovian semigroups.
//!
//! The dynamics is tracked entirely at the level of the correlation matrix
//! `G` of second moments in the `(a, a†)` ordering: a linear matrix ODE
//! `∂t G = A†·G + G·A + B` with diagonal drift `A` and constant inhomogeneity
//! `B`. On top of the flow the crate provides the structural checks that make
//! the physics questions decidable:
//!
//! - complete positivity of the generator (non-negativity of the Kossakowski
//!   matrix),
//! - positivity of evolved correlation matrices, with witnesses for the
//!   first time a physical state leaves the physical set,
//! - PPT entanglement tests for two-mode states, including the reduced
//!   2×2 Schur-complement forms,
//! - a reproducible scenario harness showing that restricting initial
//!   conditions cannot make a non-completely-positive semigroup safe once
//!   entangled two-mode states are admitted.
//!
//! All matrix work is done by a small fixed-size (2×2 / 4×4) complex
//! Hermitian linear-algebra module; there is no external solver dependency.

pub mod error;
pub mod io;
pub mod linalg;
pub mod scenarios;
pub mod semigroup;
pub mod states;

pub use error::Error;
pub use linalg::{C64, ComplexMatrix, HermitianMatrix};
pub use semigroup::{Drift, SingleModeParams, Trajectory, TwoModeParams};
pub use states::{SingleModeState, StateDiagnostics, SymmetricCovariance, TwoModeState};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
