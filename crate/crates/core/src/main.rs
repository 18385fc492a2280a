use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crofton::runner::{emit_csv, parse_config_as, run, summary, ExperimentConfig, Mode};
use crofton::verify::DEFAULT_BUDGET;
use crofton::Error;

#[derive(Parser)]
#[command(name = "crofton", version, about = "Intrinsic volumes from sections through a fixed subspace")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate one intrinsic volume from a config.
    Estimate(Common),
    /// Run the identity verification battery.
    Verify(Common),
    /// Estimate at sample counts 10^3, 10^4, ... up to `outer_samples`.
    Convergence(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment config. Optional for `verify`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "CROFTON_JOBS")]
    jobs: Option<usize>,
    /// CSV output path; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(mode: Mode, args: &Common) -> Result<ExperimentConfig, Error> {
    let mut config = match &args.config {
        Some(path) => parse_config_as(&std::fs::read_to_string(path)?, Some(mode))?,
        None if mode == Mode::Verify => ExperimentConfig::battery(0, DEFAULT_BUDGET),
        None => return Err(Error::Parse(format!("`{mode}` needs --config"))),
    };
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    if args.out.is_some() {
        config.out.clone_from(&args.out);
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Estimate(a) => (Mode::Estimate, a),
        Command::Verify(a) => (Mode::Verify, a),
        Command::Convergence(a) => (Mode::Convergence, a),
    };
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let outcome = load(mode, args).and_then(|config| {
        let rows = run(&config, jobs)?;
        if let Some(path) = &config.out {
            emit_csv(&rows, path)?;
        }
        Ok(rows)
    });
    match outcome {
        Ok(rows) => {
            print!("{}", summary(&rows));
            if rows.iter().all(|r| r.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
