mod commands;
mod config;
mod samplefile;
mod table;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use medcomp_core::Error;

use crate::commands::{DualityArgs, SweepArgs};
use crate::config::Overrides;
use crate::table::OutputArgs;

#[derive(Debug, Parser)]
#[command(name = "medcomp", version, about = "Sample compression experiments")]
struct Cli {
    /// TOML file with experiment settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw (or read) a sample, compress it and write the compression file.
    Compress {
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: OutputArgs,
        /// Where to write the compression set.
        #[arg(long)]
        compressed: PathBuf,
        /// Compress this sample (CSV with columns x0.., y) instead of a synthetic one.
        #[arg(long, conflicts_with = "sample_out")]
        sample: Option<PathBuf>,
        /// Also write the synthetic sample.
        #[arg(long)]
        sample_out: Option<PathBuf>,
    },
    /// Rebuild the predictor from a compression file and measure it on a sample.
    Verify {
        #[arg(long)]
        compressed: PathBuf,
        #[arg(long)]
        sample: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Repeated single calls to the weak learner under uniform weights.
    Weakstudy {
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compression size across sample sizes.
    Sweep(SweepArgs),
    /// Dual dimension and Gray-code measurements.
    Duality(DualityArgs),
}

/// Error with the process exit code and a short category name.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub category: &'static str,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            category: "usage",
            message: message.into(),
        }
    }

    pub fn io(e: impl Display) -> Self {
        Self {
            code: 1,
            category: "io",
            message: e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, category) = match &e {
            Error::InvalidArgument(_) => (2, "usage"),
            Error::Decode(_) => (3, "decode"),
            Error::WeakLearningFailure { .. } => (4, "weak-learning-failure"),
            Error::SparsifyFailure { .. } => (5, "sparsify-failure"),
            Error::Budget { .. } => (6, "budget"),
            Error::Io(_) => (1, "io"),
            _ => (1, "internal"),
        };
        Self {
            code,
            category,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let file = cli.config.as_deref();
    let result = match &cli.command {
        Command::Compress {
            overrides,
            output,
            compressed,
            sample,
            sample_out,
        } => commands::compress(
            file,
            overrides,
            output,
            compressed,
            sample.as_deref(),
            sample_out.as_deref(),
        ),
        Command::Verify {
            compressed,
            sample,
            output,
        } => commands::verify(compressed, sample, output),
        Command::Weakstudy { overrides, output } => commands::weakstudy(file, overrides, output),
        Command::Sweep(args) => commands::sweep(file, args),
        Command::Duality(args) => commands::duality(file, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.category, e.message);
            ExitCode::from(e.code)
        }
    }
}
