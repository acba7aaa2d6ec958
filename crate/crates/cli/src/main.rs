use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ratfourier_cli::{run, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(
    name = "ratfourier",
    version,
    about = "Rational Fourier series experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every suite in a config file and write one CSV per suite.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output` in the config).
        #[arg(long)]
        output: Option<PathBuf>,
        /// PRNG seed (overrides `seed` in the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Compute rows in parallel; output is identical to a serial run.
        #[arg(long)]
        parallel: bool,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        output,
        seed,
        parallel,
    } = Cli::parse().command;

    let mut cfg = match ExperimentConfig::load(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(o) = output {
        cfg.output = o;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let outcomes = match run(&cfg, &RunOptions { parallel }) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for o in &outcomes {
        println!("{}", o.summary_line());
    }
    if outcomes.iter().all(|o| o.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
