use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nsrw_cli::{parse_config, run_experiment_with_threads, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "nsrw", version, about = "Randomized-data Navier–Stokes experiments on the periodic box")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Second moment, sub-Gaussian margins and divergence of randomized data.
    Randomize(Args),
    /// Heat-semigroup decay rates of rough data.
    Heatflow(Args),
    /// Monte Carlo tails of the randomized space-time norm.
    Tails(Args),
    /// Integrate the Friedrichs-truncated fluctuation equation.
    Solve(Args),
    /// Distribution of the threshold lambda(omega) over draws.
    Report(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `monte_carlo_M`.
    #[arg(long = "M")]
    monte_carlo_m: Option<usize>,
}

fn build_config(verb: Verb) -> nsrw_cli::Result<ExperimentConfig> {
    let (experiment, args) = match verb {
        Verb::Randomize(a) => (Experiment::Randomize, a),
        Verb::Heatflow(a) => (Experiment::Heatflow, a),
        Verb::Tails(a) => (Experiment::Tails, a),
        Verb::Solve(a) => (Experiment::Solve, a),
        Verb::Report(a) => (Experiment::Report, a),
    };
    let mut cfg = parse_config(&args.config)?;
    cfg.experiment = experiment;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    if let Some(m) = args.monte_carlo_m {
        cfg.monte_carlo_m = m;
    }
    Ok(cfg)
}

fn threads() -> usize {
    std::env::var("NSRW_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = build_config(cli.verb).and_then(|cfg| run_experiment_with_threads(&cfg, threads()));
    match outcome {
        Ok(out) if out.passed() => {
            println!("{}: all checks passed", out.output_dir.display());
            ExitCode::SUCCESS
        }
        Ok(out) => {
            for f in &out.failures {
                eprintln!("FAIL {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
