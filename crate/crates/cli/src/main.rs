//! `trajlind`: batch experiments for trajectory-based Lindbladian simulation.
//!
//! Exit codes: 0 success, 1 input error, 2 constraint violation,
//! 3 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use trajlind::oracle::McMode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] trajlind::Error),
    #[error("{0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use trajlind::Error as E;
        match self {
            CliError::Core(E::ConstraintViolation(_)) => 2,
            CliError::Core(E::Numerical(_)) => 3,
            CliError::Core(_) | CliError::Input(_) | CliError::Io(_) => 1,
            CliError::Json(_) | CliError::Csv(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "trajlind", version, about = "Trajectory-based Lindbladian simulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    ExactUnitary,
    GadgetSimulated,
    ErrorInjected,
}

impl From<ModeArg> for McMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ExactUnitary => McMode::ExactUnitary,
            ModeArg::GadgetSimulated => McMode::GadgetSimulated,
            ModeArg::ErrorInjected => McMode::ErrorInjected,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check whether a model satisfies Σ L†L = Γ I.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = trajlind::lindblad::ADMISSIBILITY_TOL)]
        tol: f64,
    },
    /// Monte Carlo estimate of the simulated channel against the exact propagator.
    Run {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "time")]
        time: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, env = "TRAJLIND_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "exact-unitary")]
        mode: ModeArg,
        /// Per-segment error for error-injected mode; defaults to the budget's ε_H.
        #[arg(long)]
        injected_epsilon_h: Option<f64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resource-ledger sweep over times and accuracies, written as CSV.
    Sweep {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        epsilon_list: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        time_list: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distribution tests for holding times and jump counts.
    Stats {
        #[arg(long)]
        gamma: f64,
        #[arg(long = "time")]
        time: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, env = "TRAJLIND_SEED", default_value_t = 0)]
        seed: u64,
        /// Accuracy used to pick the truncation order for the tail check.
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the amplified jump gadget and report its accuracy.
    Gadget {
        #[arg(long)]
        model: PathBuf,
        /// Block-encoding scales; defaults to the jump operator norms.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        alphas: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Check { model, tol } => commands::check(&model, tol),
        Command::Run { model, time, epsilon, samples, seed, mode, injected_epsilon_h, workers, out } => {
            commands::run(commands::RunArgs {
                model: &model,
                time,
                epsilon,
                samples,
                seed,
                mode: mode.into(),
                injected_epsilon_h,
                workers,
                out: out.as_deref(),
            })
        }
        Command::Sweep { model, epsilon_list, time_list, out } => {
            commands::sweep(&model, &epsilon_list, &time_list, out.as_deref())
        }
        Command::Stats { gamma, time, samples, seed, epsilon, out } => {
            commands::stats(gamma, time, samples, seed, epsilon, out.as_deref())
        }
        Command::Gadget { model, alphas, out } => commands::gadget(&model, alphas.as_deref(), out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("trajlind: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
