//! Experiment presets, configuration and CSV output behind the `fastpoints`
//! binary.
//!
//! Every row is a pure function of the [`ExperimentConfig`]; the worker count
//! only changes how fast it is produced.

mod config;
mod presets;

use std::fmt::Write as _;

pub use config::{parse_levels, ExperimentConfig, Preset};

use crate::ensemble::with_workers;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "preset,level,stat,value,stderr,oracle,n_paths,seed";

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub preset: Preset,
    pub level: Option<u32>,
    pub stat: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub oracle: Option<f64>,
    pub n_paths: usize,
    pub seed: u64,
}

fn opt<T: std::fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

/// Header plus one line per row. Floats use the shortest round-trip form.
pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.preset,
            opt(&r.level),
            r.stat,
            r.value,
            opt(&r.stderr),
            opt(&r.oracle),
            r.n_paths,
            r.seed
        );
    }
    out
}

fn check_rows(rows: &[ResultRow]) -> Result<()> {
    for r in rows {
        let finite = r.value.is_finite()
            && r.stderr.is_none_or(f64::is_finite)
            && r.oracle.is_none_or(f64::is_finite);
        if !finite {
            return Err(Error::Numeric(format!(
                "non-finite result in {} row `{}` at level {:?}",
                r.preset, r.stat, r.level
            )));
        }
    }
    Ok(())
}

/// Runs the configured preset and, when an output path is set, writes the
/// CSV there.
pub fn run(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if let Some(v) = config.violations().into_iter().next() {
        return Err(match config.drift_spec() {
            Err(e) => e,
            Ok(_) => Error::Config(v),
        });
    }
    let rows = with_workers(config.workers, || presets::run_preset(config))??;
    check_rows(&rows)?;
    if let Some(path) = &config.output_path {
        std::fs::write(path, to_csv(&rows))?;
    }
    Ok(rows)
}

/// Human-readable report: the effective configuration and its violations.
pub fn validate(config: &ExperimentConfig) -> (String, Vec<String>) {
    let c = config;
    let mut report = String::new();
    let _ = writeln!(report, "preset = {}", c.preset);
    let _ = writeln!(report, "seed = {}", c.master_seed);
    let _ = writeln!(report, "paths = {}", c.n_paths);
    let _ = writeln!(report, "levels = {}:{}", c.level_min, c.level_max);
    let _ = writeln!(report, "a = {}", c.a);
    let _ = writeln!(report, "epsilon = {}", c.epsilon);
    let _ = writeln!(report, "drift = {}", c.drift);
    let _ = writeln!(report, "hurst = {}", opt(&c.hurst));
    let _ = writeln!(report, "gamma = {}", c.gamma);
    let _ = writeln!(report, "gamma_exp = {}", c.gamma_exp);
    let _ = writeln!(report, "alpha = {}", c.alpha);
    let _ = writeln!(report, "measure = {}", opt(&c.measure));
    let _ = writeln!(report, "out = {}", opt(&c.output_path));
    let violations = c.violations();
    for v in &violations {
        let _ = writeln!(report, "violation: {v}");
    }
    if violations.is_empty() {
        report.push_str("ok\n");
    }
    (report, violations)
}

/// The closed-form dimension rows, whatever the configured preset.
pub fn dims(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut c = config.clone();
    c.preset = Preset::Dims;
    run(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_always_present() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
        let row = ResultRow {
            preset: Preset::Dims,
            level: None,
            stat: "dim_fast".into(),
            value: 0.75,
            stderr: None,
            oracle: Some(0.75),
            n_paths: 0,
            seed: 3,
        };
        assert_eq!(to_csv(&[row]).lines().nth(1), Some("dims,,dim_fast,0.75,,0.75,0,3"));
    }
}
