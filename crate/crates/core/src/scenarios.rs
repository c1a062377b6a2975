//! Reproducible experiment harness.
//!
//! Three runnable scenarios, all driven by a JSON [`ScenarioConfig`]:
//!
//! - [`run_slippage_demo`]: builds an entangled two-mode state whose
//!   compound evolution (dissipative mode 1 × unitary mode 2) leaves the
//!   physical set immediately, while both marginals are still perfectly
//!   healthy — restricting single-mode initial conditions cannot prevent
//!   this. A separable (product) control run shows no such early escape.
//! - [`run_cp_sweep`]: randomized check that completely positive parameter
//!   sets keep every sampled valid state positive along the flow.
//! - [`run_single_mode_scan`]: a plain time scan with positivity
//!   diagnostics, emitted as CSV or JSON via [`emit_timeseries`].
//!
//! Randomness comes from a ChaCha8 stream (a counter-based generator with a
//! published algorithm) seeded from the config, so every run is bit-for-bit
//! reproducible.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::io::{format_f64, trajectory_to_json, write_json};
use crate::linalg::C64;
use crate::semigroup::{
    evolve_closed, first_negativity_time, negative_eigvec_b, quadratic_form_rate,
    sample_trajectory, SingleModeParams, Trajectory, TwoModeParams,
};
use crate::states::{
    build_critical_state, null_eigenvector, ppt_witness, SingleModeState, TwoModeState,
};
use crate::Result;

/// Strict onset-time ordering is decided at this resolution.
pub const TIME_RESOLUTION: f64 = 1e-9;

/// Generator parameters for either mode count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsSpec {
    Two { omega1: f64, omega2: f64, eta: f64, sigma: f64, lam: [f64; 2] },
    Single { omega: f64, eta: f64, sigma: f64, lam: [f64; 2] },
}

impl ParamsSpec {
    pub fn single(&self) -> Result<SingleModeParams> {
        match *self {
            ParamsSpec::Single { omega, eta, sigma, lam } => {
                SingleModeParams::new(omega, eta, sigma, C64::new(lam[0], lam[1]))
            }
            ParamsSpec::Two { .. } => {
                Err(Error::InvalidParams("expected single-mode parameters".into()))
            }
        }
    }

    pub fn two(&self) -> Result<TwoModeParams> {
        match *self {
            ParamsSpec::Two { omega1, omega2, eta, sigma, lam } => {
                TwoModeParams::new(omega1, omega2, eta, sigma, C64::new(lam[0], lam[1]))
            }
            ParamsSpec::Single { .. } => {
                Err(Error::InvalidParams("expected two-mode parameters".into()))
            }
        }
    }
}

/// Compact `(β, α)` description of a single-mode block in configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub beta: f64,
    pub alpha: [f64; 2],
}

impl BlockSpec {
    pub fn build(&self) -> Result<SingleModeState> {
        SingleModeState::new(self.beta, C64::new(self.alpha[0], self.alpha[1]))
    }
}

/// Initial state: either an explicit matrix or a named constructor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialStateSpec {
    Vacuum,
    Thermal { beta: f64 },
    /// Worst-phase boundary state for the config's parameters.
    Boundary { beta: f64 },
    /// Correlated two-mode state with off-diagonal block `G1^{1/2}G2^{1/2}`.
    Critical { g1: BlockSpec, g2: BlockSpec },
    /// Separable-form control: product state with vanishing off-diagonal
    /// block.
    Product { g1: BlockSpec, g2: BlockSpec },
    Matrix { modes: usize, matrix: Vec<Vec<[f64; 2]>> },
}

/// Sampling family used by [`run_cp_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SweepLaw {
    /// Random completely positive parameter sets.
    #[default]
    Cp,
    /// Pure rotations: `η = σ = λ = 0`, random frequency.
    ZeroDissipation,
}

/// One JSON document drives every scenario; fields that a given scenario
/// does not use are simply ignored by it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub params: ParamsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialStateSpec>,
    pub horizon: f64,
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_n_params")]
    pub n_params: usize,
    #[serde(default = "default_n_states")]
    pub n_states: usize,
    #[serde(default)]
    pub law: SweepLaw,
}

fn default_n_params() -> usize {
    20
}

fn default_n_states() -> usize {
    200
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        if cfg.horizon <= 0.0 || cfg.horizon.is_nan() {
            return Err(Error::InvalidParams(format!("horizon must be > 0, got {}", cfg.horizon)));
        }
        if cfg.dt <= 0.0 || cfg.dt.is_nan() {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {}", cfg.dt)));
        }
        Ok(cfg)
    }
}

/// Outcome of the slippage-failure demonstration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlippageReport {
    /// Complete positivity of the generator (always false when the demo ran).
    pub cp_verdict: bool,
    /// PPT verdict on the initial two-mode state.
    pub entangled_at_t0: bool,
    /// Initial decay rate of the kernel quadratic form `⟨Ψ|G(t)|Ψ⟩`.
    pub rate_compound: f64,
    pub t_neg_compound: Option<f64>,
    pub t_neg_marginal1: Option<f64>,
    pub t_neg_marginal2: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The compound dynamics did not leave the physical set before a
    /// marginal did.
    Consistent,
    /// The compound matrix went negative while both marginals were still
    /// positive: restricting single-mode initial conditions cannot fix the
    /// generator.
    SlippageFails,
}

/// `a` strictly earlier than `b` beyond the time resolution, with `None`
/// meaning "never within the horizon".
fn precedes(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(ta), Some(tb)) => ta < tb - TIME_RESOLUTION,
        (Some(_), None) => true,
        (None, _) => false,
    }
}

/// Runs the headline scenario: a non-CP single-mode generator tensored with
/// a unitary second mode, applied to a correlated initial state.
///
/// Builds the initial state from the config (`critical` for the entangled
/// demonstration, `product` for the separable control), witnesses the
/// initial entanglement, computes the escape rate along the kernel
/// direction selected by the negative eigenvector of the dissipation
/// matrix, and records the negativity onset times of the compound matrix
/// and of both marginal blocks.
///
/// Fails with [`Error::NotApplicable`] for completely positive parameters:
/// there is nothing to demonstrate.
pub fn run_slippage_demo(cfg: &ScenarioConfig) -> Result<SlippageReport> {
    let params = cfg.params.two()?;
    if params.is_completely_positive() {
        return Err(Error::NotApplicable(
            "the generator is completely positive; the slippage demo is vacuous".into(),
        ));
    }
    let (g1, g2, state) = match &cfg.initial_state {
        Some(InitialStateSpec::Critical { g1, g2 }) => {
            let (s1, s2) = (g1.build()?, g2.build()?);
            let st = build_critical_state(&s1, &s2)?;
            (s1, s2, st)
        }
        Some(InitialStateSpec::Product { g1, g2 }) => {
            let (s1, s2) = (g1.build()?, g2.build()?);
            (s1, s2, TwoModeState::product(&s1, &s2))
        }
        other => {
            return Err(Error::InvalidParams(format!(
                "slippage demo needs a critical or product initial state, got {other:?}"
            )));
        }
    };
    if g1.det() <= 1e-10 || g2.det() <= 1e-10 {
        return Err(Error::InvalidParams("slippage demo needs interior blocks (det > 0)".into()));
    }

    let drift = params.drift();
    let witness = ppt_witness(&state);

    let direction = negative_eigvec_b(&drift)?;
    let psi4 = null_eigenvector(&state, &direction.psi)?;
    let rate_compound = quadratic_form_rate(&state, &drift, &psi4);

    let t_neg_compound =
        first_negativity_time(state.matrix(), &drift, cfg.horizon, cfg.dt);
    let t_neg_marginal1 = first_negativity_time(
        &state.g1_block(),
        &params.mode1().drift(),
        cfg.horizon,
        cfg.dt,
    );
    let t_neg_marginal2 = first_negativity_time(
        &state.g2_block(),
        &params.mode2().drift(),
        cfg.horizon,
        cfg.dt,
    );

    let verdict = if precedes(t_neg_compound, t_neg_marginal1)
        && precedes(t_neg_compound, t_neg_marginal2)
    {
        Verdict::SlippageFails
    } else {
        Verdict::Consistent
    };

    Ok(SlippageReport {
        cp_verdict: params.is_completely_positive(),
        entangled_at_t0: witness.entangled,
        rate_compound,
        t_neg_compound,
        t_neg_marginal1,
        t_neg_marginal2,
        verdict,
    })
}

/// Summary of a CP-preservation sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n_params: usize,
    pub n_states: usize,
    /// Global minimum of `min-eig(G(t))` over all parameter sets, states and
    /// grid times.
    pub min_min_eig: f64,
}

/// Samples `n_params` generator sets and `n_states` valid single-mode
/// states per set, evolves each state on the grid and reports the smallest
/// eigenvalue seen anywhere.
///
/// Per parameter set the scan horizon is `config.horizon / max(η+σ, 1)`, so
/// strongly damped sets are followed for a comparable number of relaxation
/// times. Deterministic for a fixed seed.
pub fn run_cp_sweep(cfg: &ScenarioConfig) -> Result<SweepSummary> {
    if cfg.n_params == 0 || cfg.n_states == 0 {
        return Err(Error::InvalidParams("sweep needs n_params > 0 and n_states > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut min_min_eig = f64::INFINITY;
    for _ in 0..cfg.n_params {
        let params = match cfg.law {
            SweepLaw::Cp => sample_cp_params(&mut rng),
            SweepLaw::ZeroDissipation => {
                SingleModeParams::new(2.0 * rng.gen::<f64>(), 0.0, 0.0, C64::new(0.0, 0.0)).unwrap()
            }
        };
        let drift = params.drift();
        let horizon = cfg.horizon / (params.eta + params.sigma).max(1.0);
        let steps = (horizon / cfg.dt + 1e-9).floor() as usize;
        for _ in 0..cfg.n_states {
            let g0 = sample_valid_state(&mut rng).matrix();
            for k in 0..=steps {
                let t = k as f64 * cfg.dt;
                let m = evolve_closed(&g0, &drift, t).min_eigenvalue();
                min_min_eig = min_min_eig.min(m);
            }
        }
    }
    Ok(SweepSummary { n_params: cfg.n_params, n_states: cfg.n_states, min_min_eig })
}

/// Single-mode time scan with the closed-form evolver and a filled
/// positivity diagnostic column.
pub fn run_single_mode_scan(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let params = cfg.params.single()?;
    let g0 = match &cfg.initial_state {
        None | Some(InitialStateSpec::Vacuum) => SingleModeState::vacuum(),
        Some(InitialStateSpec::Thermal { beta }) => SingleModeState::thermal(*beta)?,
        Some(InitialStateSpec::Boundary { beta }) => {
            crate::semigroup::worst_boundary_state(&params, *beta)?
        }
        Some(InitialStateSpec::Matrix { modes, matrix }) => {
            if *modes != 1 {
                return Err(Error::InvalidParams("single-mode scan needs a 1-mode state".into()));
            }
            let g = crate::io::matrix_from_json(matrix)?;
            SingleModeState::from_matrix(&g)?
        }
        Some(other) => {
            return Err(Error::InvalidParams(format!(
                "initial state {other:?} is not a single-mode constructor"
            )));
        }
    };
    sample_trajectory(&g0.matrix(), &params.drift(), cfg.horizon, cfg.dt)
}

/// Output format of [`emit_timeseries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Writes a trajectory to `sink`.
///
/// CSV columns, in order: `t`, `min_eig_G` (plus `min_eig_G1`, `min_eig_G2`
/// for two-mode runs), then real and imaginary part of every independent
/// entry of `G` in row-major upper-triangle order. Floats carry 17
/// significant digits, which round-trips IEEE doubles exactly. JSON mirrors
/// the trajectory record.
pub fn emit_timeseries(tr: &Trajectory, format: OutputFormat, sink: &mut dyn Write) -> Result<()> {
    if tr.is_empty() {
        return Err(Error::InvalidParams("refusing to emit an empty trajectory".into()));
    }
    match format {
        OutputFormat::Json => write_json(&trajectory_to_json(tr), sink),
        OutputFormat::Csv => {
            let dim = tr.states[0].dim();
            let mut header = String::from("t,min_eig_G");
            if dim == 4 {
                header.push_str(",min_eig_G1,min_eig_G2");
            }
            for j in 0..dim {
                for k in j..dim {
                    header.push_str(&format!(",re_{j}_{k},im_{j}_{k}"));
                }
            }
            writeln!(sink, "{header}")?;
            for (i, &t) in tr.times.iter().enumerate() {
                let mut row = format!("{},{}", format_f64(t), format_f64(tr.min_eig_g[i]));
                if dim == 4 {
                    row.push(',');
                    row.push_str(&format_f64(tr.min_eig_g1.as_ref().unwrap()[i]));
                    row.push(',');
                    row.push_str(&format_f64(tr.min_eig_g2.as_ref().unwrap()[i]));
                }
                let g = &tr.states[i];
                for j in 0..dim {
                    for k in j..dim {
                        let z = g.get(j, k);
                        row.push(',');
                        row.push_str(&format_f64(z.re));
                        row.push(',');
                        row.push_str(&format_f64(z.im));
                    }
                }
                writeln!(sink, "{row}")?;
            }
            Ok(())
        }
    }
}

/// Random valid single-mode state: `β = 1 + 9u`, `|α| = √(β(β-1)·v)` with
/// `u, v` uniform on `[0, 1)` and a uniform phase. Covers the interior and
/// the near-boundary shell of the physical set.
pub fn sample_valid_state(rng: &mut impl Rng) -> SingleModeState {
    let beta = 1.0 + 9.0 * rng.gen::<f64>();
    let mag = (beta * (beta - 1.0) * rng.gen::<f64>()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    SingleModeState::new(beta, C64::from_polar(mag, theta)).unwrap()
}

/// Random completely positive parameter set: `η, σ` uniform on `[0, 2]`,
/// `|λ| = √(ησ·w)` with `w` uniform on `[0, 1]`, phases uniform, `ω`
/// uniform on `[0, 2]`.
pub fn sample_cp_params(rng: &mut impl Rng) -> SingleModeParams {
    let eta = 2.0 * rng.gen::<f64>();
    let sigma = 2.0 * rng.gen::<f64>();
    let w = rng.gen::<f64>();
    let mag = (eta * sigma * w).sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let omega = 2.0 * rng.gen::<f64>();
    SingleModeParams::new(omega, eta, sigma, C64::from_polar(mag, theta)).unwrap()
}

/// Random non-CP parameter set straddling the boundary from outside:
/// same law as [`sample_cp_params`] but `w` uniform on `(1, 4]`.
pub fn sample_noncp_params(rng: &mut impl Rng) -> SingleModeParams {
    let eta = 0.1 + 1.9 * rng.gen::<f64>();
    let sigma = 0.1 + 1.9 * rng.gen::<f64>();
    let w = 4.0 - 3.0 * rng.gen::<f64>() * 0.999; // (1, 4], bounded away from 1
    let mag = (eta * sigma * w).sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let omega = 2.0 * rng.gen::<f64>();
    SingleModeParams::new(omega, eta, sigma, C64::from_polar(mag, theta)).unwrap()
}

/// Random interior single-mode state with margins: `β ∈ [1.5, 6]`,
/// `|α|² = β(β-1)·v` with `v ∈ [0.1, 0.8]`. Used where downstream algebra
/// needs well-conditioned blocks (`det` bounded away from zero).
pub fn sample_interior_state(rng: &mut impl Rng) -> SingleModeState {
    let beta = 1.5 + 4.5 * rng.gen::<f64>();
    let v = 0.1 + 0.7 * rng.gen::<f64>();
    let mag = (beta * (beta - 1.0) * v).sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    SingleModeState::new(beta, C64::from_polar(mag, theta)).unwrap()
}

/// Deterministic RNG for sampling helpers, seeded from a config or test.
pub fn scenario_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
