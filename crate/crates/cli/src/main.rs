use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use floqlab_cli::{parse_config, run, RunError};

/// Reproduce driven-spin Floquet experiments from a key = value config.
#[derive(Parser, Debug)]
#[command(name = "floqlab", version)]
struct Args {
    /// Path to the run configuration.
    config: PathBuf,

    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    threads: Option<usize>,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

const CONFIG_ERROR: u8 = 1;
const NUMERICAL_FAILURE: u8 = 2;

fn load(args: &Args) -> anyhow::Result<floqlab_cli::RunConfig> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let cfg = parse_config(&text).with_context(|| format!("in {}", args.config.display()))?;
    if let Some(n) = args.threads {
        anyhow::ensure!(n > 0, "--threads must be positive");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match load(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    match run(&cfg, &args.out) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ RunError::Io { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(CONFIG_ERROR)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(NUMERICAL_FAILURE)
        }
    }
}
