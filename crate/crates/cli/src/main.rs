//! `lqu`: command-line front end for the LQU engine.
//!
//! Exit codes: 0 success, 1 compare tolerance exceeded, 2 usage error,
//! 3 invalid input data.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "lqu",
    version,
    about = "Local quantum uncertainty: exact, perturbative and driven"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads for grid sweeps (1 = sequential).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for random-state commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SU(d) generators and structure-constant checks.
    Generators(commands::GeneratorsArgs),
    /// LQU of a given state, exact or first order in a perturbation.
    LquStatic(commands::LquStaticArgs),
    /// LQU of a thermal state under a weak harmonic drive.
    LquDriven(commands::LquDrivenArgs),
    /// Closed-form results for two spins with Heisenberg exchange.
    Heisenberg(commands::HeisenbergArgs),
    /// Two-qubit concurrence.
    Concurrence(commands::ConcurrenceArgs),
    /// Run a sweep with closed form and both pipeline routes and diff them.
    Compare(commands::ConfigArgs),
    /// Run a sweep configuration.
    Run(commands::ConfigArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
