//! Quasi-free semigroup generators and covariance evolution.
//!
//! The master equation acts on the correlation matrix as the linear flow
//!
//! ```text
//!     ∂t G(t) = A†·G(t) + G(t)·A + B,
//! ```
//!
//! with diagonal `A` and constant Hermitian `B` assembled from the generator
//! parameters. Because `A` is diagonal the flow decouples entrywise:
//! with `r = conj(a_μ) + a_ν`,
//!
//! ```text
//!     G_{μν}(t) = e^{rt}·G_{μν}(0) + (e^{rt} - 1)/r · B_{μν},
//! ```
//!
//! which is the primary (closed-form) evolver. A fixed-step RK4 integrator
//! doubles as an independent cross-check. The remaining operations classify
//! complete positivity of the generator and locate the first time an evolved
//! correlation matrix develops a negative eigenvalue.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{fix_phase, ComplexMatrix, HermitianMatrix, C64, PSD_TOL};
use crate::states::{SingleModeState, TwoModeState};
use crate::Result;

/// Generator parameters of the single-mode dissipative semigroup.
///
/// `omega` is the oscillator frequency, `eta` and `sigma` the downward and
/// upward dissipation rates, and `lam` the complex squeezing-noise rate
/// (all in inverse-time units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleModeParams {
    pub omega: f64,
    pub eta: f64,
    pub sigma: f64,
    pub lam: C64,
}

impl SingleModeParams {
    pub fn new(omega: f64, eta: f64, sigma: f64, lam: C64) -> Result<Self> {
        validate_rates(omega, eta, sigma, lam)?;
        Ok(Self { omega, eta, sigma, lam })
    }

    /// The 2×2 Kossakowski matrix `C = [[η, λ*], [λ, σ]]`.
    pub fn kossakowski(&self) -> HermitianMatrix {
        kossakowski(self.eta, self.sigma, self.lam)
    }

    /// `ησ - |λ|²`; non-negative exactly when the semigroup is completely
    /// positive.
    pub fn cp_discriminant(&self) -> f64 {
        self.eta * self.sigma - self.lam.norm_sqr()
    }

    /// Complete positivity of the generated semigroup, i.e. `C ≥ 0`
    /// (with a small tolerance on the discriminant).
    pub fn is_completely_positive(&self) -> bool {
        self.cp_discriminant() >= -1e-12
    }

    /// Drift pair for the covariance flow:
    /// `A = ½·diag(σ-η+2iω, σ-η-2iω)`, `B = [[η, -λ*], [-λ, σ]]`.
    pub fn drift(&self) -> Drift {
        let re = 0.5 * (self.sigma - self.eta);
        let a = ComplexMatrix::diagonal(&[C64::new(re, self.omega), C64::new(re, -self.omega)]);
        Drift { a, b: dissipation_matrix(self.eta, self.sigma, self.lam) }
    }
}

/// Generator parameters of the compound two-mode dynamics: mode 1 dissipates,
/// mode 2 evolves unitarily at frequency `omega2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeParams {
    pub omega1: f64,
    pub omega2: f64,
    pub eta: f64,
    pub sigma: f64,
    pub lam: C64,
}

impl TwoModeParams {
    pub fn new(omega1: f64, omega2: f64, eta: f64, sigma: f64, lam: C64) -> Result<Self> {
        validate_rates(omega1, eta, sigma, lam)?;
        if omega2 < 0.0 || !omega2.is_finite() {
            return Err(Error::InvalidParams(format!("omega2 must be finite and >= 0, got {omega2}")));
        }
        Ok(Self { omega1, omega2, eta, sigma, lam })
    }

    /// The dissipative mode-1 part, viewed as single-mode parameters.
    pub fn mode1(&self) -> SingleModeParams {
        SingleModeParams { omega: self.omega1, eta: self.eta, sigma: self.sigma, lam: self.lam }
    }

    /// Unitary-only parameters of the second mode.
    pub fn mode2(&self) -> SingleModeParams {
        SingleModeParams { omega: self.omega2, eta: 0.0, sigma: 0.0, lam: C64::new(0.0, 0.0) }
    }

    pub fn kossakowski(&self) -> HermitianMatrix {
        kossakowski(self.eta, self.sigma, self.lam)
    }

    pub fn cp_discriminant(&self) -> f64 {
        self.mode1().cp_discriminant()
    }

    pub fn is_completely_positive(&self) -> bool {
        self.mode1().is_completely_positive()
    }

    /// Compound drift: `A = diag((σ-η)/2 + iω₁, (σ-η)/2 - iω₁, iω₂, -iω₂)`
    /// and `B` supported on the upper-left (mode-1) block only.
    pub fn drift(&self) -> Drift {
        let re = 0.5 * (self.sigma - self.eta);
        let a = ComplexMatrix::diagonal(&[
            C64::new(re, self.omega1),
            C64::new(re, -self.omega1),
            C64::new(0.0, self.omega2),
            C64::new(0.0, -self.omega2),
        ]);
        let b2 = dissipation_matrix(self.eta, self.sigma, self.lam);
        let b = HermitianMatrix::from_blocks(
            &b2,
            &HermitianMatrix::zeros(2),
            &ComplexMatrix::zeros(2, 2),
        );
        Drift { a, b }
    }
}

fn validate_rates(omega: f64, eta: f64, sigma: f64, lam: C64) -> Result<()> {
    for (name, v) in [("omega", omega), ("eta", eta), ("sigma", sigma)] {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::InvalidParams(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    if !lam.re.is_finite() || !lam.im.is_finite() {
        return Err(Error::InvalidParams("lambda must be finite".into()));
    }
    Ok(())
}

fn kossakowski(eta: f64, sigma: f64, lam: C64) -> HermitianMatrix {
    HermitianMatrix::from_upper(2, |j, k| match (j, k) {
        (0, 0) => C64::new(eta, 0.0),
        (0, 1) => lam.conj(),
        _ => C64::new(sigma, 0.0),
    })
}

/// `B = [[η, -λ*], [-λ, σ]]`: the Kossakowski matrix with flipped
/// off-diagonal signs.
fn dissipation_matrix(eta: f64, sigma: f64, lam: C64) -> HermitianMatrix {
    HermitianMatrix::from_upper(2, |j, k| match (j, k) {
        (0, 0) => C64::new(eta, 0.0),
        (0, 1) => -lam.conj(),
        _ => C64::new(sigma, 0.0),
    })
}

/// Drift pair `(A, B)` of the covariance flow; `A` diagonal, `B` Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct Drift {
    a: ComplexMatrix,
    b: HermitianMatrix,
}

impl Drift {
    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &HermitianMatrix {
        &self.b
    }

    #[inline]
    fn a_diag(&self, i: usize) -> C64 {
        self.a.get(i, i)
    }

    /// Upper-left 2×2 block of `B` (equal to `B` itself in the single-mode
    /// case).
    pub fn b_mode1(&self) -> HermitianMatrix {
        match self.b.dim() {
            2 => self.b.clone(),
            _ => self.b.diag_block(0),
        }
    }
}

/// `(e^z - 1)/z`, evaluated stably: a short Taylor series below `|z| = 1e-7`
/// (covering the `r -> 0` resonant limit), a cancellation-free complex
/// `expm1` otherwise.
fn phi1(z: C64) -> C64 {
    if z.norm() < 1e-7 {
        let one = C64::new(1.0, 0.0);
        one + z * (C64::new(0.5, 0.0) + z * (C64::new(1.0 / 6.0, 0.0) + z * (1.0 / 24.0)))
    } else {
        expm1_c(z) / z
    }
}

/// Complex `e^z - 1` without catastrophic cancellation for small `z`.
fn expm1_c(z: C64) -> C64 {
    let (x, y) = (z.re, z.im);
    let half = (0.5 * y).sin();
    C64::new(x.exp_m1() * y.cos() - 2.0 * half * half, x.exp() * y.sin())
}

/// Closed-form solution of `∂t G = A†G + GA + B` at time `t`.
///
/// With `r = conj(a_μ) + a_ν` each entry evolves independently:
/// `G_{μν}(t) = e^{rt} G_{μν}(0) + t·φ1(rt)·B_{μν}`, the `r -> 0` limit
/// being `G_{μν}(0) + t·B_{μν}`. The result is Hermitian by construction.
pub fn evolve_closed(g0: &HermitianMatrix, drift: &Drift, t: f64) -> HermitianMatrix {
    assert_eq!(g0.dim(), drift.dim(), "state/drift dimension mismatch");
    assert!(t >= 0.0, "evolution time must be non-negative");
    HermitianMatrix::from_upper(g0.dim(), |mu, nu| {
        let r = drift.a_diag(mu).conj() + drift.a_diag(nu);
        let z = r * t;
        z.exp() * g0.get(mu, nu) + phi1(z) * t * drift.b().get(mu, nu)
    })
}

/// Classic fixed-step RK4 on the matrix flow; the last partial step is
/// shortened to land on `t` exactly. Independent numerical oracle for
/// [`evolve_closed`].
pub fn evolve_numeric(g0: &HermitianMatrix, drift: &Drift, t: f64, dt: f64) -> Result<HermitianMatrix> {
    assert_eq!(g0.dim(), drift.dim(), "state/drift dimension mismatch");
    assert!(t >= 0.0, "evolution time must be non-negative");
    if t == 0.0 {
        return Ok(g0.clone());
    }
    if dt <= 0.0 {
        return Err(Error::InvalidStep(dt));
    }
    let dim = drift.dim();
    let rhs = |g: &ComplexMatrix| -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(dim, dim);
        for mu in 0..dim {
            for nu in 0..dim {
                let r = drift.a_diag(mu).conj() + drift.a_diag(nu);
                out.set(mu, nu, r * g.get(mu, nu) + drift.b().get(mu, nu));
            }
        }
        out
    };

    let mut g = g0.to_complex();
    let mut elapsed = 0.0;
    while elapsed < t {
        let h = dt.min(t - elapsed);
        let k1 = rhs(&g);
        let k2 = rhs(&g.add(&k1.scale(C64::new(0.5 * h, 0.0))));
        let k3 = rhs(&g.add(&k2.scale(C64::new(0.5 * h, 0.0))));
        let k4 = rhs(&g.add(&k3.scale(C64::new(h, 0.0))));
        let incr = k1
            .add(&k2.scale(C64::new(2.0, 0.0)))
            .add(&k3.scale(C64::new(2.0, 0.0)))
            .add(&k4)
            .scale(C64::new(h / 6.0, 0.0));
        g = g.add(&incr);
        elapsed += h;
    }
    Ok(HermitianMatrix::symmetrized(&g))
}

/// Boundary state (`det G = 0`) whose squeezing phase is chosen against the
/// noise: `α = -√(β(β-1))·λ*/|λ|`, so that `Re(αλ) = -|α||λ|`.
pub fn worst_boundary_state(params: &SingleModeParams, beta: f64) -> Result<SingleModeState> {
    if params.lam.norm() < 1e-15 {
        return Err(Error::ZeroLambda);
    }
    if beta <= 1.0 || beta.is_nan() {
        return Err(Error::InvalidParams(format!("worst boundary state needs beta > 1, got {beta}")));
    }
    let alpha = -(beta * (beta - 1.0)).sqrt() * params.lam.conj() / params.lam.norm();
    SingleModeState::new(beta, alpha)
}

/// Initial growth rate of the boundary quadratic form with the worst phase
/// inserted: `η(β-1) + σβ - 2√(β(β-1))·|λ|`. A negative value means the
/// boundary state at this `β` immediately develops a negative eigenvalue.
pub fn boundary_violation_rate(params: &SingleModeParams, beta: f64) -> f64 {
    assert!(beta >= 1.0, "boundary states need beta >= 1");
    params.eta * (beta - 1.0) + params.sigma * beta
        - 2.0 * (beta * (beta - 1.0)).sqrt() * params.lam.norm()
}

/// `∂t ⟨Ψ|G(t)|Ψ⟩` at `t = 0`, i.e. `⟨Ψ|(A†G + GA + B)|Ψ⟩` as a real
/// number. For `Ψ` in the kernel of `G` this reduces to `⟨Ψ|B|Ψ⟩`.
pub fn quadratic_form_rate(state: &TwoModeState, drift: &Drift, psi: &[C64]) -> f64 {
    assert_eq!(drift.dim(), 4, "compound rate needs the two-mode drift");
    assert_eq!(psi.len(), 4, "Psi must be a four-vector");
    let g = state.matrix().to_complex();
    let ga = g.mul(drift.a());
    let deriv = drift.a().adjoint().mul(&g).add(&ga).add(&drift.b().to_complex());
    let dv = deriv.mul_vec(psi);
    psi.iter().zip(&dv).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Minimal eigenvalue of the mode-1 dissipation matrix `B` and its unit
/// eigenvector (global phase fixed so the first nonzero component is real
/// positive).
///
/// The eigenvalue is `(η+σ)/2 - √(((η-σ)/2)² + |λ|²)`, negative exactly in
/// the non-CP regime; for CP-compatible parameters
/// [`Error::NoNegativeDirection`] is returned.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeDirection {
    pub eigenvalue: f64,
    pub psi: Vec<C64>,
}

pub fn negative_eigvec_b(drift: &Drift) -> Result<NegativeDirection> {
    let b = drift.b_mode1();
    let (vals, u) = b.eigh();
    if vals[0] >= -1e-12 {
        return Err(Error::NoNegativeDirection);
    }
    let psi = fix_phase(&[u.get(0, 0), u.get(1, 0)]);
    Ok(NegativeDirection { eigenvalue: vals[0], psi })
}

/// Relative negativity threshold shared by the onset scan and the witnesses.
fn is_negative(g: &HermitianMatrix) -> bool {
    g.min_eigenvalue() < -PSD_TOL * (1.0 + g.max_abs())
}

/// First time within `[0, horizon]` at which the evolved matrix acquires a
/// negative eigenvalue (relative threshold `-1e-10·(1 + max-abs)`).
///
/// Scans the grid `{0, dt, 2dt, ...}` and bisects the first crossing down
/// to `1e-12` in time; returns `None` when the matrix stays positive on the
/// whole horizon.
pub fn first_negativity_time(
    g0: &HermitianMatrix,
    drift: &Drift,
    horizon: f64,
    dt: f64,
) -> Option<f64> {
    assert!(horizon > 0.0 && dt > 0.0, "horizon and dt must be positive");
    if is_negative(g0) {
        return Some(0.0);
    }
    let steps = (horizon / dt + 1e-9).floor() as usize;
    let mut prev_t = 0.0;
    for k in 1..=steps {
        let t = k as f64 * dt;
        if is_negative(&evolve_closed(g0, drift, t)) {
            // Invariant: positive at lo, negative at hi.
            let (mut lo, mut hi) = (prev_t, t);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if is_negative(&evolve_closed(g0, drift, mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(hi);
        }
        prev_t = t;
    }
    None
}

/// Time-sampled evolution record with positivity diagnostics.
///
/// `times` is the uniform grid `{0, dt, ..., horizon}`; `min_eig_g` tracks
/// the full matrix and, for two-mode runs, `min_eig_g1` / `min_eig_g2`
/// track the marginal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<HermitianMatrix>,
    pub min_eig_g: Vec<f64>,
    pub min_eig_g1: Option<Vec<f64>>,
    pub min_eig_g2: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.states.first().map_or(1, |g| g.dim() / 2)
    }
}

/// Samples the closed-form flow on the uniform grid `{0, dt, ..., horizon}`.
pub fn sample_trajectory(
    g0: &HermitianMatrix,
    drift: &Drift,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory> {
    if dt <= 0.0 {
        return Err(Error::InvalidStep(dt));
    }
    if horizon < 0.0 {
        return Err(Error::InvalidParams(format!("horizon must be >= 0, got {horizon}")));
    }
    let steps = (horizon / dt + 1e-9).floor() as usize;
    let two_mode = g0.dim() == 4;
    let mut tr = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        min_eig_g: Vec::with_capacity(steps + 1),
        min_eig_g1: two_mode.then(|| Vec::with_capacity(steps + 1)),
        min_eig_g2: two_mode.then(|| Vec::with_capacity(steps + 1)),
    };
    for k in 0..=steps {
        let t = k as f64 * dt;
        let g = evolve_closed(g0, drift, t);
        tr.times.push(t);
        tr.min_eig_g.push(g.min_eigenvalue());
        if two_mode {
            tr.min_eig_g1.as_mut().unwrap().push(g.diag_block(0).min_eigenvalue());
            tr.min_eig_g2.as_mut().unwrap().push(g.diag_block(1).min_eigenvalue());
        }
        tr.states.push(g);
    }
    Ok(tr)
}
