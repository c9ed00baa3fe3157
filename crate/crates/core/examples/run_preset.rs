//! Running a harness preset from code, as the CLI does.

use fastpoints::harness::{self, ExperimentConfig};

fn main() -> fastpoints::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.apply_text("preset = cantor-drift\npaths = 100\nlevels = 8:12\nseed = 1\n")?;
    cfg.set("a", "0.4")?;
    let rows = harness::run(&cfg)?;
    print!("{}", harness::to_csv(&rows));
    Ok(())
}
