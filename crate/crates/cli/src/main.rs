//! `quasifree` — CLI for the Gaussian quasi-free semigroup toolkit.
//!
//! Matrices travel as JSON files; scalar generator parameters are flags.
//! Exit codes: 0 success, 1 the "interesting" domain verdict (non-CP,
//! entangled, violation found, slippage failure), 2 invalid input,
//! 3 numerical failure. Verdicts are therefore usable from shell pipelines
//! without parsing JSON.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::Serialize;

use quasifree::io::{state_from_json, state_to_document, write_json, LoadedState, StateDocument};
use quasifree::scenarios::{
    emit_timeseries, run_cp_sweep, run_slippage_demo, OutputFormat, ScenarioConfig, Verdict,
};
use quasifree::semigroup::{
    boundary_violation_rate, first_negativity_time, sample_trajectory, worst_boundary_state,
    SingleModeParams, TwoModeParams,
};
use quasifree::states::ppt_witness;
use quasifree::{Error, TwoModeState};

type C64 = Complex<f64>;

#[derive(Parser)]
#[command(
    name = "quasifree",
    version,
    about = "Gaussian bosonic states under quasi-free Markovian semigroups: \
             complete-positivity checks, covariance evolution, positivity and \
             entanglement witnesses"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct DissipationFlags {
    /// Downward dissipation rate (>= 0).
    #[arg(long)]
    eta: f64,
    /// Upward dissipation rate (>= 0).
    #[arg(long)]
    sigma: f64,
    /// Real part of the squeezing-noise rate.
    #[arg(long, default_value_t = 0.0)]
    lam_re: f64,
    /// Imaginary part of the squeezing-noise rate.
    #[arg(long, default_value_t = 0.0)]
    lam_im: f64,
}

impl DissipationFlags {
    fn lam(&self) -> C64 {
        C64::new(self.lam_re, self.lam_im)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Single,
    Two,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the generator: is the semigroup completely positive?
    /// Exits 1 when it is not.
    CheckCp {
        #[command(flatten)]
        diss: DissipationFlags,
    },
    /// Validate a state file: positivity and commutator structure.
    /// Exits 1 when the state is not positive semidefinite.
    Validate {
        /// Path to a JSON state document.
        #[arg(long)]
        state: PathBuf,
    },
    /// Evolve a state on a uniform time grid and emit the trajectory.
    Evolve {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[command(flatten)]
        diss: DissipationFlags,
        /// Oscillator frequency (single-mode).
        #[arg(long, default_value_t = 0.0)]
        omega: f64,
        /// Mode-1 frequency (two-mode).
        #[arg(long, default_value_t = 0.0)]
        omega1: f64,
        /// Mode-2 frequency (two-mode).
        #[arg(long, default_value_t = 0.0)]
        omega2: f64,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        horizon: f64,
        #[arg(long)]
        dt: f64,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Build the worst-phase boundary state at the given occupation and
    /// report its violation rate and negativity onset. Exits 1 when the
    /// rate is negative (violation found).
    FindViolation {
        /// Boundary occupation beta (> 1).
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        diss: DissipationFlags,
        #[arg(long, default_value_t = 0.0)]
        omega: f64,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// PPT entanglement witness on a two-mode state file. Exits 1 when the
    /// state is entangled.
    Witness {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the slippage-failure demonstration from a JSON config. Exits 1
    /// when the verdict is slippage_fails.
    SlippageDemo {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized CP-preservation sweep from a JSON config. Exits 1 when a
    /// negative eigenvalue below -1e-8 was observed.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Structure(_)
            | Error::InvalidParams(_)
            | Error::NotApplicable(_)
            | Error::Json(_)
            | Error::ZeroLambda
            | Error::Io(_) => 2,
            Error::NotPsd(_) | Error::Singular | Error::NoNegativeDirection | Error::InvalidStep(_) => 3,
        };
        Self { code, message: e.to_string() }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<LoadedState, Failure> {
    let text = read_file(path)?;
    state_from_json(&text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn emit_doc<T: Serialize>(doc: &T, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let mut file = fs::File::create(path)
                .map_err(|e| Failure { code: 3, message: format!("cannot create {}: {e}", path.display()) })?;
            write_json(doc, &mut file).map_err(Failure::from)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_json(doc, &mut lock).map_err(Failure::from)?;
            lock.flush().map_err(|e| Failure { code: 3, message: e.to_string() })
        }
    }
}

#[derive(Serialize)]
struct CpDocument {
    cp: bool,
    discriminant: f64,
}

#[derive(Serialize)]
struct ViolationDocument {
    beta: f64,
    state: StateDocument,
    rate: f64,
    onset_time: Option<f64>,
    violation: bool,
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::CheckCp { diss } => {
            let p = SingleModeParams::new(0.0, diss.eta, diss.sigma, diss.lam())?;
            let doc = CpDocument { cp: p.is_completely_positive(), discriminant: p.cp_discriminant() };
            emit_doc(&doc, None)?;
            Ok(if doc.cp { 0 } else { 1 })
        }
        Cmd::Validate { state } => {
            let loaded = load_state(&state)?;
            let diag = match &loaded {
                LoadedState::Single(s) => s.validate(),
                LoadedState::Two(s) => s.validate(),
            };
            emit_doc(&diag, None)?;
            Ok(if diag.psd && diag.structure_ok { 0 } else { 1 })
        }
        Cmd::Evolve { mode, diss, omega, omega1, omega2, state, horizon, dt, out, format } => {
            let loaded = load_state(&state)?;
            let drift = match (mode, &loaded) {
                (ModeArg::Single, LoadedState::Single(_)) => {
                    SingleModeParams::new(omega, diss.eta, diss.sigma, diss.lam())?.drift()
                }
                (ModeArg::Two, LoadedState::Two(_)) => {
                    TwoModeParams::new(omega1, omega2, diss.eta, diss.sigma, diss.lam())?.drift()
                }
                _ => {
                    return Err(Failure::invalid(format!(
                        "--mode does not match the {}-mode state file",
                        loaded.modes()
                    )));
                }
            };
            if dt <= 0.0 {
                return Err(Failure::invalid(format!("--dt must be > 0, got {dt}")));
            }
            if horizon < 0.0 {
                return Err(Failure::invalid(format!("--horizon must be >= 0, got {horizon}")));
            }
            let tr = sample_trajectory(&loaded.matrix(), &drift, horizon, dt)?;
            let fmt = match format {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            };
            match out {
                Some(path) => {
                    let mut file = fs::File::create(&path).map_err(|e| Failure {
                        code: 3,
                        message: format!("cannot create {}: {e}", path.display()),
                    })?;
                    emit_timeseries(&tr, fmt, &mut file)?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    emit_timeseries(&tr, fmt, &mut lock)?;
                }
            }
            Ok(0)
        }
        Cmd::FindViolation { beta, diss, omega, horizon, dt, out } => {
            let p = SingleModeParams::new(omega, diss.eta, diss.sigma, diss.lam())?;
            let state = worst_boundary_state(&p, beta)?;
            let rate = boundary_violation_rate(&p, beta);
            if dt <= 0.0 || horizon <= 0.0 {
                return Err(Failure::invalid("--horizon and --dt must be > 0"));
            }
            let onset = first_negativity_time(&state.matrix(), &p.drift(), horizon, dt);
            let doc = ViolationDocument {
                beta,
                state: state_to_document(&LoadedState::Single(state)),
                rate,
                onset_time: onset,
                violation: rate < 0.0,
            };
            emit_doc(&doc, out.as_deref())?;
            Ok(if doc.violation { 1 } else { 0 })
        }
        Cmd::Witness { state, out } => {
            let loaded = load_state(&state)?;
            let two: TwoModeState = match loaded {
                LoadedState::Two(s) => s,
                LoadedState::Single(_) => {
                    return Err(Failure::invalid("witness needs a two-mode state file"));
                }
            };
            let w = ppt_witness(&two);
            emit_doc(&w, out.as_deref())?;
            Ok(if w.entangled { 1 } else { 0 })
        }
        Cmd::SlippageDemo { config, out } => {
            let cfg = ScenarioConfig::from_json(&read_file(&config)?)?;
            let report = run_slippage_demo(&cfg)?;
            emit_doc(&report, out.as_deref())?;
            Ok(if report.verdict == Verdict::SlippageFails { 1 } else { 0 })
        }
        Cmd::Sweep { config, out } => {
            let cfg = ScenarioConfig::from_json(&read_file(&config)?)?;
            let summary = run_cp_sweep(&cfg)?;
            emit_doc(&summary, out.as_deref())?;
            Ok(if summary.min_min_eig < -1e-8 { 1 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
