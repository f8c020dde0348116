//! Command-line driver for the billiard pipeline.
//!
//! Reads a TOML run configuration, optionally overrides the output
//! directory, base seed and thread count, and executes either the full
//! enabled stage sequence or one named stage. Exit codes: 0 on success,
//! 2 for configuration problems (including missing stage inputs), 3 for
//! numerical or I/O failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use billiard::cli::{self, RunConfig, Stage};

#[derive(Parser)]
#[command(
    name = "billiard",
    about = "Classical-to-quantum pipeline for the quadratic conformal billiard family",
    version
)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Run exactly one stage instead of every enabled stage.
    #[arg(long, value_enum)]
    stage: Option<Stage>,

    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override the configured base seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (defaults to the number of logical CPUs).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();

    if let Some(threads) = args.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("billiard: cannot configure {threads} threads: {err}");
            return ExitCode::from(2);
        }
    }

    let mut config = match RunConfig::load(&args.config) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("billiard: {err}");
            return ExitCode::from(2);
        }
    };
    if let Some(out) = args.out {
        config.out_dir = out;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
        config.transport.seed = seed;
    }

    match cli::run(&config, args.stage) {
        Ok(manifest) => {
            println!("run-{}", manifest.config_hash);
            for stage in &manifest.stages {
                println!(
                    "  {:<12} {:>8} ms  {} artifacts",
                    stage.stage,
                    stage.millis,
                    stage.artifacts.len()
                );
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("billiard: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
