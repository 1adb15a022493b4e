//! `concurrence`: bounds, sweeps and audits from the command line.

mod state;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use concurrence_bounds::audit::{run_audit, AuditConfig};
use concurrence_bounds::bounds::{
    caf_bipartite_lower, reference_curve_report, thm1_lower_sq, thm4_combined, thm_general_lower_sq,
    wang_lower, zhu_fei_lower, BoundMethod, BoundReport,
};
use concurrence_bounds::partitions::enumerate_partitions;
use concurrence_bounds::roof::{convex_roof_upper, sandwich, RoofOptions};
use concurrence_bounds::states::{DensityMatrix, GENERATOR_ID};
use concurrence_bounds::sweep::{example_sweep, ghz_sweep, ExampleSweepConfig, GhzSweepConfig, Parallelism};
use concurrence_bounds::Error;

use crate::state::StateArgs;

const SEED_ENV: &str = "CONCURRENCE_SEED";
const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "concurrence", version, about = "Multipartite concurrence bounds")]
struct Cli {
    /// Evaluate grid points on the calling thread only.
    #[arg(long, global = true)]
    serial: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generalized GHZ sweep over theta in [0, pi/2].
    GhzSweep {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 181)]
        points: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Noisy double-Bell sweep over t in [0, 1], on C^2.
    ExampleSweep {
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Add a roof-estimator column.
        #[arg(long)]
        roof: bool,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate lower bounds on one state.
    Bound {
        #[command(flatten)]
        state: StateArgs,
        /// Bound to evaluate; repeat for several. Defaults to every method
        /// that applies to the state's party count.
        #[arg(long = "method", value_parser = parse_method)]
        methods: Vec<BoundMethod>,
        /// Cut for `caf`, as 1-based labels like `1,3`.
        #[arg(long, value_delimiter = ',')]
        cut: Vec<usize>,
        /// Block count for `thm-general`.
        #[arg(long)]
        m: Option<usize>,
        /// Weights for `thm4`, ordered m = N-1 down to 2. Uniform by default.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
    },
    /// List the set partitions of n labels into m blocks.
    Partitions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Randomized checks of the pure-state inequalities and identities.
    Audit {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, hide = true)]
        corrupt_normalization: bool,
    },
    /// Upper-bound the convex roof and compare it with the lower bounds.
    Roof {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        estimator: EstimatorArgs,
    },
}

#[derive(Args, Debug)]
struct EstimatorArgs {
    /// Decomposition size; twice the rank by default.
    #[arg(long)]
    ensemble_size: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    iterations: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long)]
    seed: Option<u64>,
}

impl EstimatorArgs {
    fn options(&self) -> Result<RoofOptions, CliError> {
        Ok(RoofOptions {
            ensemble_size: self.ensemble_size,
            iterations: self.iterations,
            restarts: self.restarts,
            seed: resolve_seed(self.seed)?,
            ..RoofOptions::default()
        })
    }
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(PathBuf, io::Error),
    Audit,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_validation() => 3,
            CliError::Core(_) | CliError::Io(..) => 2,
            CliError::Audit => 4,
        }
    }
}

fn parse_method(s: &str) -> Result<BoundMethod, String> {
    s.parse::<BoundMethod>().map_err(|e| e.to_string())
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Core(Error::Domain(format!("{SEED_ENV}={v:?} is not an unsigned integer")))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e)),
    }
}

fn default_methods(n: usize, cut_given: bool, m_given: bool) -> Vec<BoundMethod> {
    let mut out = Vec::new();
    if n == 2 || cut_given {
        out.push(BoundMethod::Caf);
    }
    if n >= 3 {
        out.extend([BoundMethod::Wang, BoundMethod::ZhuFei]);
    }
    match n {
        4 => out.push(BoundMethod::Thm1),
        5 => out.extend([BoundMethod::Thm2, BoundMethod::Thm3]),
        _ => {}
    }
    if m_given || n >= 6 {
        out.push(BoundMethod::ThmGeneral);
    }
    if n >= 3 {
        out.push(BoundMethod::Thm4);
    }
    out
}

fn require_five(method: BoundMethod, n: usize) -> Result<(), Error> {
    if n != 5 {
        return Err(Error::Domain(format!("{method} applies to 5-party states, got {n} parties")));
    }
    Ok(())
}

fn evaluate(
    method: BoundMethod,
    rho: &DensityMatrix,
    state: &StateArgs,
    cut: &[usize],
    m: Option<usize>,
    weights: &[f64],
) -> Result<BoundReport, Error> {
    let n = rho.dims().len();
    match method {
        BoundMethod::Caf => {
            let cut: Vec<usize> = if cut.is_empty() && n == 2 {
                vec![0]
            } else {
                if cut.contains(&0) {
                    return Err(Error::Domain("cut labels are 1-based".into()));
                }
                cut.iter().map(|k| k - 1).collect()
            };
            caf_bipartite_lower(rho, &cut)
        }
        BoundMethod::Wang => wang_lower(rho),
        BoundMethod::ZhuFei => zhu_fei_lower(rho),
        BoundMethod::Thm1 => thm1_lower_sq(rho),
        BoundMethod::Thm2 => {
            require_five(method, n)?;
            thm_general_lower_sq(rho, 3)
        }
        BoundMethod::Thm3 => {
            require_five(method, n)?;
            thm_general_lower_sq(rho, 4)
        }
        BoundMethod::ThmGeneral => thm_general_lower_sq(rho, m.unwrap_or(n.saturating_sub(1))),
        BoundMethod::Thm4 => {
            if weights.is_empty() && n >= 3 {
                thm4_combined(rho, &vec![1.0 / (n - 2) as f64; n - 2])
            } else {
                thm4_combined(rho, weights)
            }
        }
        BoundMethod::ReferenceCurve => {
            let t = state.isotropic_double_bell_t().ok_or_else(|| {
                Error::Domain("reference-curve applies only to `isotropic --of double-bell`".into())
            })?;
            reference_curve_report(t)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let parallelism = if cli.serial { Parallelism::Serial } else { Parallelism::Parallel };
    match cli.command {
        Command::GhzSweep { n, points, output } => {
            let table = ghz_sweep(&GhzSweepConfig { n, points, parallelism })?;
            emit(output.as_deref(), &table.to_csv())
        }
        Command::ExampleSweep { points, roof, estimator, output } => {
            let roof = if roof { Some(estimator.options()?) } else { None };
            let sweep = example_sweep(&ExampleSweepConfig { points, roof, parallelism })?;
            emit(output.as_deref(), &sweep.table.to_csv())?;
            eprint!("{}", sweep.summary());
            Ok(())
        }
        Command::Bound { state, methods, cut, m, weights } => {
            let rho = state.load()?;
            let n = rho.dims().len();
            let methods = if methods.is_empty() {
                default_methods(n, !cut.is_empty(), m.is_some())
            } else {
                methods
            };
            let mut out = format!("state: {} on dims {}\n", state.describe(), rho.dims());
            for method in methods {
                let report = evaluate(method, &rho, &state, &cut, m, &weights)?;
                out.push_str(&format!("{report}\n"));
            }
            emit(None, &out)
        }
        Command::Partitions { n, m } => {
            let parts = enumerate_partitions(n, m)?;
            let mut out = String::new();
            for p in &parts {
                out.push_str(&format!("{p}\n"));
            }
            emit(None, &out)?;
            eprintln!("{} partitions of {n} into {m} blocks", parts.len());
            Ok(())
        }
        Command::Audit { trials, seed, corrupt_normalization } => {
            if trials == 0 {
                return Err(Error::Domain("trials must be >= 1".into()).into());
            }
            let seed = resolve_seed(seed)?;
            let summary = run_audit(&AuditConfig { trials, seed, corrupt_normalization })?;
            emit(None, &format!("seed {seed} ({GENERATOR_ID})\n{summary}"))?;
            if summary.passed() {
                Ok(())
            } else {
                Err(CliError::Audit)
            }
        }
        Command::Roof { state, estimator } => {
            let rho = state.load()?;
            let opts = estimator.options()?;
            let est = convex_roof_upper(&rho, &opts)?;
            let n = rho.dims().len();
            let mut out = format!(
                "roof upper bound on C = {:.17}\n  ensemble-size: {}\n  iterations: {}\n  restarts: {}\n  seed: {}\n  converged: {}\n",
                est.value, est.ensemble_size, est.iterations, est.restarts, est.seed, est.converged
            );
            for method in default_methods(n, false, false) {
                let lower = evaluate(method, &rho, &state, &[], None, &[])?;
                let s = sandwich(&rho, &lower, &est)?;
                out.push_str(&format!(
                    "{:<5} {method}: lower C = {:.17}, gap = {:.3e}\n",
                    if s.pass { "PASS" } else { "FAIL" },
                    s.lower,
                    s.gap
                ));
            }
            emit(None, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Core(e) => eprintln!("error: {e}"),
                CliError::Io(path, e) => eprintln!("error: {}: {e}", path.display()),
                CliError::Audit => eprintln!("audit: at least one property exceeded its tolerance"),
            }
            ExitCode::from(err.exit_code())
        }
    }
}
