//! `micro-reynolds`: command-line front end for the micropolar thin-film
//! solver. Subcommands: `solve` (full pipeline from a JSON config),
//! `verify` (numerical acceptance suite), `sweep` (mobility tables).
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 runtime/solver error. `MICRO_REYNOLDS_THREADS` caps internal
//! parallelism.

mod config;
mod expr;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use micro_reynolds::verify::VerifyLevel;

#[derive(Parser)]
#[command(
    name = "micro-reynolds",
    version,
    about = "Micropolar thin-film lubrication solver with wall slip"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline (assemble, solve, reconstruct, export) from a
    /// JSON configuration file.
    Solve {
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the numerical verification suite and print a pass/fail table.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
    /// Tabulate probed mobility coefficients along one parameter axis.
    Sweep {
        /// Path to the JSON run configuration supplying the base parameters.
        #[arg(long)]
        config: PathBuf,
        /// Parameter to sweep.
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Comma-separated numeric values for the axis.
        #[arg(long)]
        values: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Lambda,
    #[value(name = "N", alias = "n")]
    N,
    #[value(name = "Rc", alias = "rc")]
    Rc,
    H,
}

impl From<AxisArg> for run::SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Lambda => run::SweepAxis::Lambda,
            AxisArg::N => run::SweepAxis::N,
            AxisArg::Rc => run::SweepAxis::Rc,
            AxisArg::H => run::SweepAxis::H,
        }
    }
}

/// Applies `MICRO_REYNOLDS_THREADS` to the global thread pool. Returns an
/// exit code on misconfiguration.
fn configure_threads() -> Result<(), i32> {
    let Ok(raw) = std::env::var("MICRO_REYNOLDS_THREADS") else {
        return Ok(());
    };
    let threads: usize = match raw.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": {
                    "stage": "config",
                    "field": "MICRO_REYNOLDS_THREADS",
                    "message": format!("'{raw}' is not a positive integer")
                }})
            );
            return Err(run::EXIT_CONFIG);
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| {
            eprintln!(
                "{}",
                serde_json::json!({ "error": {
                    "stage": "config",
                    "message": format!("cannot configure thread pool: {e}")
                }})
            );
            run::EXIT_RUNTIME
        })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(code) = configure_threads() {
        return ExitCode::from(code as u8);
    }
    let code = match cli.command {
        Command::Solve { config } => run::cmd_solve(&config),
        Command::Verify { level } => run::cmd_verify(match level {
            LevelArg::Quick => VerifyLevel::Quick,
            LevelArg::Full => VerifyLevel::Full,
        }),
        Command::Sweep { config, axis, values } => {
            run::cmd_sweep(&config, axis.into(), &values)
        }
    };
    ExitCode::from(code as u8)
}
