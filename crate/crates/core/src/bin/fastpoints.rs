use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fastpoints::harness::{self, ExperimentConfig};
use fastpoints::Error;

#[derive(Parser)]
#[command(name = "fastpoints", version, about = "Fast times of Brownian motion with variable drift")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` file; flags given here override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Master seed (default: $FASTPOINTS_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    paths: Option<usize>,
    /// Detector levels as MIN:MAX.
    #[arg(long, global = true)]
    levels: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// e.g. `cantor:gamma=0.1111,depth=20`
    #[arg(long, global = true)]
    drift: Option<String>,
    #[arg(long, global = true)]
    hurst: Option<f64>,
    /// CSV destination (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured preset and emit CSV.
    Run,
    /// Report the effective configuration and its violations.
    Validate,
    /// Closed-form dimension values only.
    Dims,
}

fn config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::default();
    if let Ok(seed) = std::env::var("FASTPOINTS_SEED") {
        cfg.set("seed", &seed)?;
    }
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    let overrides = [
        ("preset", cli.preset.clone()),
        ("seed", cli.seed.map(|v| v.to_string())),
        ("paths", cli.paths.map(|v| v.to_string())),
        ("levels", cli.levels.clone()),
        ("a", cli.a.map(|v| v.to_string())),
        ("epsilon", cli.epsilon.map(|v| v.to_string())),
        ("drift", cli.drift.clone()),
        ("hurst", cli.hurst.map(|v| v.to_string())),
        ("out", cli.out.as_ref().map(|p| p.display().to_string())),
        ("workers", cli.workers.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(&cli).and_then(|cfg| match cli.command {
        Command::Validate => {
            let (report, violations) = harness::validate(&cfg);
            print!("{report}");
            Ok(if violations.is_empty() { 0 } else { 3 })
        }
        Command::Run | Command::Dims => {
            let rows = match cli.command {
                Command::Dims => harness::dims(&cfg)?,
                _ => harness::run(&cfg)?,
            };
            if cfg.output_path.is_none() {
                print!("{}", harness::to_csv(&rows));
            }
            Ok(0)
        }
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fastpoints: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
