use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use fairband::engine::Strategy;
use fairband_cli::commands;
use fairband_cli::config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "fairband", version, about = "Fairness-aware bandit hyperparameter search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the bracket table for R and eta.
    Schedule {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "r")]
        r: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Run one strategy end to end and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        max_parallel: Option<usize>,
        #[arg(long = "r")]
        r: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Compare selected models across runs; the first run is the baseline.
    Compare {
        #[arg(required = true, num_args = 2..)]
        runs: Vec<PathBuf>,
        /// Directory for comparison.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Frontier and per-rung Pareto density of a finished run.
    Pareto {
        run: PathBuf,
        /// Defaults to the run directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Schedule { config, r, eta } => {
            let engine = match config {
                Some(path) => RunConfig::load(&path)?.engine,
                None => Default::default(),
            };
            print!("{}", commands::schedule_table(r.unwrap_or(engine.r), eta.unwrap_or(engine.eta))?);
        }
        Command::Run { config, seed, strategy, out, max_parallel, r, eta } => {
            let overrides = Overrides { seed, strategy, out, max_parallel, r, eta };
            print!("{}", commands::run(&config, &overrides)?);
        }
        Command::Compare { runs, out } => {
            let table = commands::compare(&runs, &out)?;
            print!("{table}");
        }
        Command::Pareto { run, out } => {
            let out = out.unwrap_or_else(|| run.clone());
            print!("{}", commands::pareto(&run, &out)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
