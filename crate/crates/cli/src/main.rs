use clap::Parser;
use std::path::PathBuf;
use vnlw_cli::runner::{execute, RunOptions};

/// Numerical laboratory for the viscous nonlinear wave equation.
#[derive(Parser)]
#[command(name = "vnlw", version, about)]
struct Cli {
    /// Experiment to run: closeness, inflation, strichartz, c0hs, kernel,
    /// oscillator, randomize, averaging, tails, picard, probabilistic.
    experiment: String,
    /// Path to the TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed from the [random] section.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel parameter points (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let code = execute(&RunOptions {
        experiment: cli.experiment,
        config_path: cli.config,
        seed: cli.seed,
        out: cli.out,
        threads: cli.threads,
    });
    std::process::exit(code);
}
