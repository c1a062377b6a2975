//! Single- and two-mode Gaussian correlation matrices and entanglement tests.
//!
//! A single-mode state is fixed by its matrix of second moments in the
//! `(a, a†)` ordering,
//!
//! ```text
//!     G = | β   α   |        β = ⟨a a†⟩,  α = ⟨a a⟩,
//!         | α*  β-1 |
//! ```
//!
//! physical iff `G ≥ 0`, i.e. `β ≥ 1` and `β(β-1) ≥ |α|²`. Two-mode states
//! carry the 4×4 analogue with blocks `G1`, `G2` and off-diagonal `W`. The
//! commutator structure shows up as the fixed difference 1 between the two
//! diagonal entries of every mode block, and is what separates `G` from the
//! symmetric covariance `V = ½⟨{a, a†}⟩ = G - ½Σ`, `Σ = diag(+1, -1)` per
//! mode.
//!
//! Partial transposition (the mode-2 exchange `a₂ ↔ a₂†`) acts on `V` by
//! conjugation with `diag(1, σ₁)`; a correlation matrix whose partial
//! transpose fails positivity is entangled, and for two-mode Gaussian states
//! the test is conclusive in both directions.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{vec_norm, ComplexMatrix, HermitianMatrix, C64, PSD_TOL};
use crate::Result;

/// Tolerance on the commutator diagonal constraint `G[0][0]-G[1][1] = 1`.
pub const CCR_TOL: f64 = 1e-10;

/// Single-mode Gaussian state, stored as the pair `(β, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeState {
    beta: f64,
    alpha: C64,
}

impl SingleModeState {
    /// Builds a state from its occupation `β` and squeezing correlation `α`.
    ///
    /// Only finiteness is enforced here; positivity is a diagnostic, not a
    /// construction gate, because evolved states are allowed to leave the
    /// physical set (detecting exactly that is the point of the toolkit).
    pub fn new(beta: f64, alpha: C64) -> Result<Self> {
        if !beta.is_finite() || !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::Structure("non-finite state parameters".into()));
        }
        Ok(Self { beta, alpha })
    }

    /// The vacuum, `β = 1`, `α = 0`.
    pub fn vacuum() -> Self {
        Self { beta: 1.0, alpha: C64::new(0.0, 0.0) }
    }

    /// Thermal-like diagonal state `G = diag(β, β-1)`.
    pub fn thermal(beta: f64) -> Result<Self> {
        if beta < 1.0 || beta.is_nan() {
            return Err(Error::InvalidParams(format!("thermal state needs beta >= 1, got {beta}")));
        }
        Self::new(beta, C64::new(0.0, 0.0))
    }

    /// Reads `(β, α)` off a 2×2 correlation matrix, checking the commutator
    /// diagonal constraint.
    pub fn from_matrix(g: &HermitianMatrix) -> Result<Self> {
        if g.dim() != 2 {
            return Err(Error::Structure("single-mode state needs a 2x2 matrix".into()));
        }
        let diff = g.get(0, 0).re - g.get(1, 1).re;
        if (diff - 1.0).abs() > CCR_TOL {
            return Err(Error::Structure(format!(
                "G[0][0] - G[1][1] = {diff} violates the commutator constraint"
            )));
        }
        Self::new(g.get(0, 0).re, g.get(0, 1))
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    /// The 2×2 correlation matrix `[[β, α], [α*, β-1]]`.
    pub fn matrix(&self) -> HermitianMatrix {
        let (beta, alpha) = (self.beta, self.alpha);
        HermitianMatrix::from_upper(2, |j, k| match (j, k) {
            (0, 0) => C64::new(beta, 0.0),
            (0, 1) => alpha,
            _ => C64::new(beta - 1.0, 0.0),
        })
    }

    /// `det G = β(β-1) - |α|²`; zero on the boundary of the physical set.
    pub fn det(&self) -> f64 {
        self.beta * (self.beta - 1.0) - self.alpha.norm_sqr()
    }

    pub fn validate(&self) -> StateDiagnostics {
        diagnostics(&self.matrix())
    }

    pub fn to_symmetric(&self) -> SymmetricCovariance {
        SymmetricCovariance::from_correlation(&self.matrix())
    }
}

/// Two-mode Gaussian state: the full 4×4 correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    g: HermitianMatrix,
}

impl TwoModeState {
    /// Wraps a 4×4 correlation matrix after checking the commutator diagonal
    /// constraint on both mode blocks.
    pub fn from_matrix(g: HermitianMatrix) -> Result<Self> {
        if g.dim() != 4 {
            return Err(Error::Structure("two-mode state needs a 4x4 matrix".into()));
        }
        for mode in 0..2 {
            let diff = g.get(2 * mode, 2 * mode).re - g.get(2 * mode + 1, 2 * mode + 1).re;
            if (diff - 1.0).abs() > CCR_TOL {
                return Err(Error::Structure(format!(
                    "mode {} diagonal difference {diff} violates the commutator constraint",
                    mode + 1
                )));
            }
        }
        Ok(Self { g })
    }

    /// Product (separable-form) state with vanishing off-diagonal block.
    pub fn product(g1: &SingleModeState, g2: &SingleModeState) -> Self {
        let g = HermitianMatrix::from_blocks(&g1.matrix(), &g2.matrix(), &ComplexMatrix::zeros(2, 2));
        Self { g }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.g
    }

    pub fn g1_block(&self) -> HermitianMatrix {
        self.g.diag_block(0)
    }

    pub fn g2_block(&self) -> HermitianMatrix {
        self.g.diag_block(1)
    }

    pub fn w_block(&self) -> ComplexMatrix {
        self.g.block(0, 1)
    }

    /// Reduced state of one mode (`which` is 1 or 2), i.e. the corresponding
    /// diagonal block.
    pub fn marginal(&self, which: usize) -> Result<SingleModeState> {
        assert!(which == 1 || which == 2, "mode index must be 1 or 2");
        SingleModeState::from_matrix(&self.g.diag_block(which - 1))
    }

    pub fn validate(&self) -> StateDiagnostics {
        diagnostics(&self.g)
    }

    pub fn to_symmetric(&self) -> SymmetricCovariance {
        SymmetricCovariance::from_correlation(&self.g)
    }
}

/// Diagnostic record produced by state validation; never fails, just reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDiagnostics {
    pub psd: bool,
    pub min_eig: f64,
    pub structure_ok: bool,
}

fn diagnostics(g: &HermitianMatrix) -> StateDiagnostics {
    let min_eig = g.min_eigenvalue();
    let mut structure_ok = true;
    for mode in 0..g.dim() / 2 {
        let diff = g.get(2 * mode, 2 * mode).re - g.get(2 * mode + 1, 2 * mode + 1).re;
        if (diff - 1.0).abs() > CCR_TOL {
            structure_ok = false;
        }
    }
    StateDiagnostics { psd: g.is_psd(PSD_TOL), min_eig, structure_ok }
}

/// Symmetric covariance `V = ½⟨{a, a†}⟩ = G - ½Σ` with `Σ = diag(+1, -1)`
/// per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCovariance {
    v: HermitianMatrix,
}

impl SymmetricCovariance {
    pub fn from_correlation(g: &HermitianMatrix) -> Self {
        Self { v: shift_diagonal(g, -0.5) }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.v
    }

    /// Back to the correlation matrix `G = V + ½Σ`, checking the commutator
    /// diagonal constraint of the result.
    pub fn to_correlation(&self) -> Result<HermitianMatrix> {
        let g = shift_diagonal(&self.v, 0.5);
        for mode in 0..g.dim() / 2 {
            let diff = g.get(2 * mode, 2 * mode).re - g.get(2 * mode + 1, 2 * mode + 1).re;
            if (diff - 1.0).abs() > CCR_TOL {
                return Err(Error::Structure(format!(
                    "reconstructed G violates the commutator constraint (diff = {diff})"
                )));
            }
        }
        Ok(g)
    }
}

/// Adds `s·Σ` to the diagonal, `Σ = diag(+1, -1)` repeated per mode.
fn shift_diagonal(m: &HermitianMatrix, s: f64) -> HermitianMatrix {
    HermitianMatrix::from_upper(m.dim(), |j, k| {
        if j == k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            m.get(j, j) + C64::new(s * sign, 0.0)
        } else {
            m.get(j, k)
        }
    })
}

/// Partial transposition with respect to the second mode.
///
/// Implemented on the symmetric covariance, where it is conjugation by
/// `T = diag(1, 1, σ₁)`, then mapped back: `G̃ = T(G - ½Σ)T + ½Σ`. On blocks
/// this gives `G̃1 = G1`, `G̃2 = G2ᵀ`, `W̃ = W·σ₁`. The result is Hermitian
/// but in general not positive — that failure is the entanglement signal.
pub fn partial_transpose(state: &TwoModeState) -> HermitianMatrix {
    let v = state.to_symmetric();
    // T·V·T is the simultaneous index swap 2 ↔ 3.
    let perm = [0usize, 1, 3, 2];
    let vt = HermitianMatrix::from_upper(4, |j, k| {
        let (pj, pk) = (perm[j], perm[k]);
        if pj <= pk {
            v.matrix().get(pj, pk)
        } else {
            v.matrix().get(pk, pj).conj()
        }
    });
    shift_diagonal(&vt, 0.5)
}

/// Outcome of the PPT entanglement test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptWitness {
    pub min_eig_pt: f64,
    pub entangled: bool,
}

/// Minimum eigenvalue of the partial transpose; a value below the (relative)
/// threshold certifies entanglement. Boundary cases count as not entangled.
pub fn ppt_witness(state: &TwoModeState) -> PptWitness {
    let gt = partial_transpose(state);
    let min_eig_pt = gt.min_eigenvalue();
    let entangled = min_eig_pt < -PSD_TOL * (1.0 + gt.max_abs());
    PptWitness { min_eig_pt, entangled }
}

/// Minimum eigenvalues of the two reduced 2×2 entanglement conditions for a
/// correlated state built by [`build_critical_state`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchurTest {
    pub eq_schur_min_eig: f64,
    pub eq_reduced_min_eig: f64,
}

/// Reduces the 4×4 PPT condition to 2×2 matrices, for a state whose
/// off-diagonal block is `G1^{1/2}·G2^{1/2}`.
///
/// The first form is the Schur complement of the partially transposed
/// matrix, `G1 - G1^{1/2}G2^{1/2}·σ₁[G̃2]⁻¹σ₁·G2^{1/2}G1^{1/2}` with
/// `G̃2 = G2ᵀ`; the second is the fully reduced
/// `[G2]⁻¹ - σ₁[G̃2]⁻¹σ₁`, which works out to `diag(-1, 1)/det(G2)` and is
/// therefore never positive on invertible physical blocks. Both share their
/// sign with the full PPT witness.
pub fn schur_entanglement_test(state: &TwoModeState) -> Result<SchurTest> {
    let g1 = state.g1_block();
    let g2 = state.g2_block();
    let g2t = HermitianMatrix::symmetrized(&g2.to_complex().transpose());
    let g2_inv = g2.inverse()?;
    let g2t_inv = g2t.inverse()?;

    let s1_g2t_inv_s1 = conj_sigma1(&g2t_inv);
    let reduced = g2_inv.sub(&s1_g2t_inv_s1);

    let s1 = g1.sqrt_psd()?.to_complex();
    let s2 = g2.sqrt_psd()?.to_complex();
    let middle = s2.mul(&s1_g2t_inv_s1.to_complex()).mul(&s2);
    let schur = HermitianMatrix::symmetrized(&s1.mul(&middle).mul(&s1));
    let schur = g1.sub(&schur);

    Ok(SchurTest {
        eq_schur_min_eig: schur.min_eigenvalue(),
        eq_reduced_min_eig: reduced.min_eigenvalue(),
    })
}

/// `σ₁·M·σ₁` for a 2×2 Hermitian matrix (swaps both indices).
fn conj_sigma1(m: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_upper(2, |j, k| {
        let (pj, pk) = (1 - j, 1 - k);
        if pj <= pk {
            m.get(pj, pk)
        } else {
            m.get(pk, pj).conj()
        }
    })
}

/// Builds the correlated two-mode state
///
/// ```text
///     G(0) = | G1              G1^{1/2}G2^{1/2} |
///            | G2^{1/2}G1^{1/2}        G2       |
/// ```
///
/// which is PSD by construction (it is `X†X` for `X = [G1^{1/2} G2^{1/2}]`)
/// with an at-least-2-dimensional kernel, and whose marginals are exactly
/// the inputs. `G2` must be invertible because the kernel eigenvector
/// construction needs `G2^{-1/2}`.
pub fn build_critical_state(g1: &SingleModeState, g2: &SingleModeState) -> Result<TwoModeState> {
    if g2.det() <= 1e-10 {
        return Err(Error::Singular);
    }
    let m1 = g1.matrix();
    let m2 = g2.matrix();
    let s1 = m1.sqrt_psd()?;
    let s2 = m2.sqrt_psd()?;
    let w = s1.to_complex().mul(&s2.to_complex());
    let g = HermitianMatrix::from_blocks(&m1, &m2, &w);
    TwoModeState::from_matrix(g)
}

/// Kernel eigenvector of a critical state: `Ψ = (ψ, -G2^{-1/2}G1^{1/2}ψ)`,
/// normalized to unit length. Satisfies `G(0)·Ψ = 0`.
pub fn null_eigenvector(state: &TwoModeState, psi: &[C64]) -> Result<Vec<C64>> {
    assert_eq!(psi.len(), 2, "psi must be a two-vector");
    if vec_norm(psi) == 0.0 {
        return Err(Error::InvalidParams("psi must be nonzero".into()));
    }
    let s1 = state.g1_block().sqrt_psd()?;
    let s2_inv = state.g2_block().sqrt_psd()?.inverse()?;
    let lower = s2_inv.to_complex().mul(&s1.to_complex()).mul_vec(psi);
    let full: Vec<C64> = psi.iter().copied().chain(lower.iter().map(|z| -z)).collect();
    let n = vec_norm(&full);
    Ok(full.iter().map(|z| z / n).collect())
}
