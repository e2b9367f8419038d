//! `kohn`: run the effective multiplier algorithm on problem files.

mod commands;
mod error;
mod problem;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "kohn", version, about = "Effective subelliptic multipliers for special domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Seed for the generic choices.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Induction attempts after the direct route fails.
    #[arg(long, global = true)]
    pub max_retries: Option<u32>,
    /// Largest power of the maximal ideal searched for.
    #[arg(long, global = true)]
    pub type_cap: Option<u32>,
    #[arg(long, global = true)]
    pub degree_cap: Option<u32>,
    /// Write the trace as JSON lines to this path.
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report p* and the bracket it gives for the type.
    Type { problem: PathBuf },
    /// Derive the multipliers down to the constant 1.
    Run { problem: PathBuf },
    /// Check that ord Jac ≤ λ − 1 for maps of finite colength λ.
    CheckJacobianBound(BoundArgs),
    /// Compare one classical radical step with the effective run.
    CompareClassic {
        problem: PathBuf,
        /// Largest power of a coordinate tried against the classical ideal.
        #[arg(long, default_value_t = 80)]
        power_cap: u32,
    },
    /// Re-check a trace file.
    Audit { trace_file: PathBuf },
    /// Linear-algebra reference computations.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Comma-separated variable names.
    #[arg(long, default_value = "z,w", value_delimiter = ',')]
    pub variables: Vec<String>,
    /// Component of the map; repeat once per variable. Without it random
    /// monomial maps are checked.
    #[arg(long = "map")]
    pub map: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub trials: u32,
    #[arg(long, default_value_t = 4)]
    pub max_exponent: u32,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Decide membership of a polynomial.
    Member {
        problem: PathBuf,
        poly: String,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Dimension of the quotient.
    Colength {
        problem: PathBuf,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Least k with every degree-k monomial in the ideal.
    Type {
        problem: PathBuf,
        #[arg(long)]
        cap: Option<u32>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(5),
            };
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Failed(_)) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
