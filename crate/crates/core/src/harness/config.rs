use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::fbm::MAX_FBM_LEVEL;
use crate::path::MAX_BM_LEVEL;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    OreyTaylor,
    ZeroIntersection,
    CantorDrift,
    LoudDrift,
    Fbm,
    HolderSandwich,
    Covering,
    Jlab,
    LimsupVariance,
    Dims,
}

impl Preset {
    pub const ALL: [Preset; 10] = [
        Preset::OreyTaylor,
        Preset::ZeroIntersection,
        Preset::CantorDrift,
        Preset::LoudDrift,
        Preset::Fbm,
        Preset::HolderSandwich,
        Preset::Covering,
        Preset::Jlab,
        Preset::LimsupVariance,
        Preset::Dims,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::OreyTaylor => "orey-taylor",
            Preset::ZeroIntersection => "zero-intersection",
            Preset::CantorDrift => "cantor-drift",
            Preset::LoudDrift => "loud-drift",
            Preset::Fbm => "fbm",
            Preset::HolderSandwich => "holder-sandwich",
            Preset::Covering => "covering",
            Preset::Jlab => "jlab",
            Preset::LimsupVariance => "limsup-variance",
            Preset::Dims => "dims",
        }
    }

    /// Deepest detector level the preset accepts: some presets sample paths
    /// finer than the detector level.
    pub fn max_level(self) -> u32 {
        match self {
            Preset::Fbm => MAX_FBM_LEVEL,
            Preset::ZeroIntersection | Preset::Covering => MAX_BM_LEVEL - 3,
            Preset::Jlab => MAX_BM_LEVEL - 4,
            _ => MAX_BM_LEVEL,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.as_str()).collect();
                Error::Usage(format!("unknown preset `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// Flat experiment description. Fields are checked by [`validate`] and
/// parsed lazily where parsing can fail for reasons other than syntax (the
/// drift descriptor may violate its own constraints).
///
/// [`validate`]: super::validate
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub master_seed: u64,
    pub n_paths: usize,
    pub level_min: u32,
    pub level_max: u32,
    pub a: f64,
    pub epsilon: f64,
    /// Drift descriptor as written, e.g. `cantor:gamma=0.1111,depth=20`.
    pub drift: String,
    pub hurst: Option<f64>,
    pub output_path: Option<String>,
    /// Cantor ratio for `cantor-drift`, `jlab` and `dims`.
    pub gamma: f64,
    /// Exponent of the covering sum.
    pub gamma_exp: f64,
    /// Cantor parameter α in the fBm dimension formula.
    pub alpha: f64,
    /// Measure for `jlab`: `cantor:gamma=G,n=N`, `uniform:level=L` or a file.
    pub measure: Option<String>,
    /// Not part of the experiment: output never depends on it.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            preset: Preset::OreyTaylor,
            master_seed: 0,
            n_paths: 100,
            level_min: 8,
            level_max: 12,
            a: 0.5,
            epsilon: 0.0,
            drift: "zero".into(),
            hurst: None,
            output_path: None,
            gamma: 1.0 / 9.0,
            gamma_exp: 0.2,
            alpha: 0.5,
            measure: None,
            workers: None,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Usage(format!("bad value for {key}: `{value}`")))
}

/// Parses `MIN:MAX`.
pub fn parse_levels(s: &str) -> Result<(u32, u32)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Usage(format!("levels must look like MIN:MAX, got `{s}`")))?;
    Ok((num("levels", lo.trim())?, num("levels", hi.trim())?))
}

/// Accepts `1/9` as well as decimals.
fn real(key: &str, value: &str) -> Result<f64> {
    if let Some((p, q)) = value.split_once('/') {
        let p: f64 = num(key, p.trim())?;
        let q: f64 = num(key, q.trim())?;
        return Ok(p / q);
    }
    num(key, value)
}

impl ExperimentConfig {
    /// Sets one field from its textual key. Keys match the command-line
    /// flags without dashes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "preset" => self.preset = value.parse()?,
            "seed" | "master_seed" => self.master_seed = num(key, value)?,
            "paths" | "n_paths" => self.n_paths = num(key, value)?,
            "levels" => (self.level_min, self.level_max) = parse_levels(value)?,
            "level_min" => self.level_min = num(key, value)?,
            "level_max" => self.level_max = num(key, value)?,
            "a" => self.a = real(key, value)?,
            "epsilon" => self.epsilon = real(key, value)?,
            "drift" => self.drift = value.to_string(),
            "hurst" => self.hurst = Some(real(key, value)?),
            "out" | "output_path" => self.output_path = Some(value.to_string()),
            "gamma" => self.gamma = real(key, value)?,
            "gamma_exp" => self.gamma_exp = real(key, value)?,
            "alpha" => self.alpha = real(key, value)?,
            "measure" => self.measure = Some(value.to_string()),
            "workers" => self.workers = Some(num(key, value)?),
            other => return Err(Error::Usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn levels(&self) -> Vec<u32> {
        (self.level_min..=self.level_max).collect()
    }

    pub fn drift_spec(&self) -> Result<DriftSpec> {
        self.drift.parse()
    }

    /// Violations of the config's own constraints, without running anything.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.level_min > self.level_max {
            v.push(format!("level_min {} > level_max {}", self.level_min, self.level_max));
        }
        if self.level_max > MAX_BM_LEVEL {
            v.push(format!("level_max {} exceeds {MAX_BM_LEVEL}", self.level_max));
        } else if self.level_max > self.preset.max_level() {
            v.push(format!(
                "level_max {} exceeds {} for preset {}",
                self.level_max,
                self.preset.max_level(),
                self.preset
            ));
        }
        if self.level_min < 2 && self.preset != Preset::Dims {
            v.push(format!("level_min {} is below 2", self.level_min));
        }
        if self.n_paths < 1 {
            v.push("n_paths must be at least 1".into());
        }
        if !(self.a >= 0.0) || !self.a.is_finite() {
            v.push(format!("a = {} must be a finite nonnegative number", self.a));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            v.push(format!("epsilon = {} must be a finite nonnegative number", self.epsilon));
        }
        if let Some(h) = self.hurst {
            if !(h > 0.0 && h < 1.0) {
                v.push(format!("hurst {h} outside (0, 1)"));
            }
        }
        if !(self.gamma > 0.0 && self.gamma < 0.5) {
            v.push(format!("gamma {} outside (0, 1/2)", self.gamma));
        }
        if self.workers == Some(0) {
            v.push("workers must be at least 1".into());
        }
        if let Err(e) = self.drift_spec() {
            v.push(format!("drift `{}`: {e}", self.drift));
        }
        match self.preset {
            Preset::Jlab if self.n_paths < 100 => {
                v.push(format!("jlab needs at least 100 paths, got {}", self.n_paths))
            }
            Preset::LimsupVariance if self.n_paths < 2 => {
                v.push("limsup-variance needs at least 2 paths".into())
            }
            _ => {}
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn later_settings_win() {
        let mut c = ExperimentConfig::default();
        c.apply_text("preset = dims\nseed = 5 # comment\nlevels = 3:9\ngamma = 1/9\n").unwrap();
        c.set("seed", "7").unwrap();
        assert_eq!(c.preset, Preset::Dims);
        assert_eq!(c.master_seed, 7);
        assert_eq!((c.level_min, c.level_max), (3, 9));
        assert_eq!(c.gamma, 1.0 / 9.0);
        assert!(matches!(c.set("nope", "1"), Err(Error::Usage(_))));
        assert!(matches!(c.set("preset", "nope"), Err(Error::Usage(_))));
    }

    #[test]
    fn violations_listed() {
        assert!(ExperimentConfig::default().violations().is_empty());
        let mut c = ExperimentConfig::default();
        c.level_max = 30;
        assert_eq!(c.violations().len(), 1);
        c.level_max = 12;
        c.drift = "loud:alpha=0.9,A=2,terms=4".into();
        let v = c.violations();
        assert!(v.len() == 1 && v[0].contains("2A(1-alpha)"), "{v:?}");
    }
}
