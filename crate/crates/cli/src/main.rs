//! `screening` — calibrate and audit a two-stage Gaussian screening pipeline.
//!
//! Exit codes: 0 success, 1 failed check, 2 input or precondition error,
//! 3 solver non-convergence.

mod commands;
mod report;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use screening_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "screening", version, about = "Fairness analysis for a two-stage Gaussian screening pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CalibrateMode {
    /// Group-blind hiring at a single known cost.
    Igm,
    /// Common threshold under grade non-disclosure.
    NoGrades,
    /// Admission directly on types at the top of the cost interval.
    Noiseless,
    /// Fixed point of the γ = 1 equal-opportunity condition.
    EoGamma1,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum TargetArg {
    MultiIgm,
    MultiEo,
    Sigm,
}

#[derive(Subcommand)]
enum Command {
    /// Posterior mean of one group at a threshold and grade, by two routes
    Posterior {
        scenario: PathBuf,
        /// Group to evaluate (1 or 2)
        #[arg(long)]
        group: u8,
        /// Admission threshold: a number, -inf, or +inf
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Grade to condition on
        #[arg(long, allow_hyphen_values = true)]
        grade: f64,
    },
    /// Solve a constructive fairness regime
    Calibrate {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        mode: CalibrateMode,
    },
    /// Fairness report (EO gap, group-membership violation, density gap)
    Audit {
        scenario: PathBuf,
        /// Override group 1's rule with a threshold
        #[arg(long, allow_hyphen_values = true)]
        beta1: Option<String>,
        /// Override group 2's rule with a threshold
        #[arg(long, allow_hyphen_values = true)]
        beta2: Option<String>,
        /// Also write the report as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Evaluate a violation functional over a grid of threshold pairs
    Sweep {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        target: TargetArg,
        /// Grid for β₁ as lo:hi:n
        #[arg(long, default_value = "-3:3:41", allow_hyphen_values = true)]
        grid1: String,
        /// Grid for β₂ as lo:hi:n
        #[arg(long, default_value = "-3:3:41", allow_hyphen_values = true)]
        grid2: String,
        /// CSV output path
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare closed forms against Monte Carlo oracles
    McCheck {
        scenario: PathBuf,
        /// Samples per estimate (at least 100000)
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Scenario(scenario::ParseError),
    Input(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Scenario(e) => write!(f, "{e}"),
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}
impl From<scenario::ParseError> for CliError {
    fn from(e: scenario::ParseError) -> Self {
        CliError::Scenario(e)
    }
}
impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Scenario(_) | CliError::Input(_) => 2,
            CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                CoreError::InvalidParameter { .. }
                | CoreError::NonFinite(_)
                | CoreError::ZeroProbability(_) => 2,
                CoreError::Bracketing { .. }
                | CoreError::NonConvergence(_)
                | CoreError::QuadratureAccuracy { .. } => 3,
                CoreError::UnderSampled { .. } => 1,
            },
        }
    }
}

/// Builds the global thread pool from SCREENING_THREADS (if set and valid)
/// and returns the manifest description of the effective setting.
fn init_threads() -> String {
    match std::env::var("SCREENING_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
    {
        Some(n) => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            n.to_string()
        }
        None => format!("default({})", rayon::current_num_threads()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = init_threads();
    let result = match cli.command {
        Command::Posterior {
            scenario,
            group,
            beta,
            grade,
        } => commands::posterior(&scenario, group, &beta, grade, &threads),
        Command::Calibrate { scenario, mode } => commands::calibrate(&scenario, mode, &threads),
        Command::Audit {
            scenario,
            beta1,
            beta2,
            csv,
        } => commands::audit(&scenario, beta1.as_deref(), beta2.as_deref(), csv.as_deref(), &threads),
        Command::Sweep {
            scenario,
            target,
            grid1,
            grid2,
            out,
        } => commands::sweep(&scenario, target, &grid1, &grid2, &out, &threads),
        Command::McCheck {
            scenario,
            samples,
            seed,
        } => commands::mc_check(&scenario, samples, seed, &threads),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
