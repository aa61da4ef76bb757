//! `scldpc`: build, optimize and audit spatially-coupled LDPC codes.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "scldpc",
    version,
    about = "Spatially-coupled LDPC construction and cycle census"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find the optimal-overlap partition; writes optimum.csv and partition.txt.
    Optimize,
    /// Count cycles-6 of a code (closed form and lifted) or of an alist matrix.
    Census {
        /// alist matrix to count by brute force instead of a code spec.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Also enumerate the built-in absorbing-set species.
        #[arg(long)]
        species: bool,
    },
    /// Optimize circulant powers; writes powers.txt, partition.txt, trace.csv.
    Cpo,
    /// Write the lifted parity-check matrix as h_sc.alist.
    Lift,
    /// Write the protograph alist with the partition and power grids.
    Export,
    /// Partition, CPO, census and lift in one run.
    Pipeline,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Census { matrix, species } => {
            let cfg = match &matrix {
                // code parameters are optional when auditing a matrix file
                Some(_) => RunConfig::resolve(&cli.common).ok(),
                None => Some(RunConfig::resolve(&cli.common)?),
            };
            commands::cmd_census(cfg.as_ref(), matrix.as_deref(), species)
        }
        cmd => {
            let cfg = RunConfig::resolve(&cli.common)?;
            match cmd {
                Command::Optimize => commands::cmd_optimize(&cfg),
                Command::Cpo => commands::cmd_cpo(&cfg),
                Command::Lift => commands::cmd_lift(&cfg),
                Command::Export => commands::cmd_export(&cfg),
                Command::Pipeline => commands::cmd_pipeline(&cfg),
                Command::Census { .. } => unreachable!("handled above"),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
