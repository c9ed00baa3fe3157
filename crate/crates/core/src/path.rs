//! Sample paths on the dyadic grid `k·2^-N`, `0 ≤ k ≤ 2·2^N`, of `[0, 2]`.
//!
//! The analysis window is `[0, 1]`; the extra unit of horizon guarantees that
//! every forward window `t + m·2^-m` with `t ∈ [0, 1)` stays on the grid.

use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::fbm::FbmMethod;
use crate::rng::CounterRng;

pub const HORIZON: f64 = 2.0;
pub const MAX_BM_LEVEL: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PathKind {
    Bm,
    Fbm,
    Drifted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplePath {
    pub(crate) kind: PathKind,
    pub(crate) hurst: Option<f64>,
    pub(crate) level: u32,
    pub(crate) values: Vec<f64>,
    pub(crate) seed: u64,
    pub(crate) drift_id: Option<String>,
    pub(crate) fbm_method: Option<FbmMethod>,
    pub(crate) bridge_seeds: Vec<u64>,
    pub(crate) flipped: bool,
}

/// Number of grid points of a level-`level` path on `[0, 2]`.
pub fn grid_len(level: u32) -> usize {
    (2usize << level) + 1
}

impl SamplePath {
    /// Wraps externally produced values (e.g. synthetic test paths).
    pub fn from_values(kind: PathKind, level: u32, values: Vec<f64>, seed: u64) -> Result<Self> {
        if values.len() != grid_len(level) {
            return Err(Error::Config(format!(
                "level {level} path needs {} values, got {}",
                grid_len(level),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("path values must be finite".into()));
        }
        Ok(Self {
            kind,
            hurst: None,
            level,
            values,
            seed,
            drift_id: None,
            fbm_method: None,
            bridge_seeds: Vec::new(),
            flipped: false,
        })
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn hurst(&self) -> Option<f64> {
        self.hurst
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn drift_id(&self) -> Option<&str> {
        self.drift_id.as_deref()
    }

    pub fn fbm_method(&self) -> Option<FbmMethod> {
        self.fbm_method
    }

    /// Seeds of successive bridge refinements applied after sampling.
    pub fn bridge_seeds(&self) -> &[u64] {
        &self.bridge_seeds
    }

    pub fn is_flipped(&self) -> bool {
        self.flipped
    }

    pub fn step(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step()
    }

    /// Grid index of time `t`, if `t` is a grid point.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = t * (1u64 << self.level) as f64;
        (x.fract() == 0.0 && x >= 0.0 && (x as usize) < self.values.len()).then_some(x as usize)
    }

    /// Values restricted to the level-`level` sub-grid.
    pub fn restrict(&self, level: u32) -> Result<Vec<f64>> {
        if level > self.level {
            return Err(Error::Resolution(format!(
                "cannot restrict level {} path to finer level {level}",
                self.level
            )));
        }
        let stride = 1usize << (self.level - level);
        Ok(self.values.iter().step_by(stride).copied().collect())
    }
}

fn check_bm_level(level: u32) -> Result<()> {
    if !(1..=MAX_BM_LEVEL).contains(&level) {
        return Err(Error::Config(format!(
            "path level {level} outside 1..={MAX_BM_LEVEL}"
        )));
    }
    Ok(())
}

/// Standard Brownian motion on `[0, 2]` at grid step `2^-level`.
///
/// Increment `k` is `2^{-level/2}` times the `k`-th counter-based normal of
/// `seed`, so the path is a pure function of `(seed, level)`.
pub fn sample_bm(seed: u64, level: u32) -> Result<SamplePath> {
    check_bm_level(level)?;
    let n = 2usize << level;
    let mut values = vec![0.0; n + 1];
    CounterRng::new(seed).fill_normals(0, &mut values[1..]);
    let sd = (-(level as f64) / 2.0).exp2();
    let mut acc = 0.0;
    for v in values[1..].iter_mut() {
        acc += *v * sd;
        *v = acc;
    }
    SamplePath::from_values(PathKind::Bm, level, values, seed)
}

/// Inserts Brownian-bridge midpoints, doubling the resolution.
///
/// The refined path agrees with the input on every coarse grid point; the
/// midpoint of segment `k` is the neighbour average plus `2^{-(N+2)/2}` times
/// normal `k` of `seed2`.
pub fn refine_bridge(path: &SamplePath, seed2: u64) -> Result<SamplePath> {
    if path.kind != PathKind::Bm {
        return Err(Error::UnsupportedKind(format!(
            "bridge refinement needs a Brownian path, got {:?}",
            path.kind
        )));
    }
    let level = path.level + 1;
    check_bm_level(level)?;
    let segments = path.values.len() - 1;
    let mut noise = vec![0.0; segments];
    CounterRng::new(seed2).fill_normals(0, &mut noise);
    let sd = (-((level + 1) as f64) / 2.0).exp2();
    let mut values = Vec::with_capacity(2 * segments + 1);
    for (w, z) in path.values.windows(2).zip(&noise) {
        values.push(w[0]);
        values.push(0.5 * (w[0] + w[1]) + sd * z);
    }
    values.push(path.values[segments]);
    let mut out = path.clone();
    out.level = level;
    out.values = values;
    out.bridge_seeds.push(seed2);
    Ok(out)
}

/// `X(t) = V(t) - f(t)` on the path's grid.
pub fn apply_drift(path: &SamplePath, f: &DriftSpec) -> Result<SamplePath> {
    if path.kind == PathKind::Drifted {
        return Err(Error::UnsupportedKind("path already carries a drift".into()));
    }
    f.validate()?;
    let step = path.step();
    let values: Vec<f64> = path
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v - f.eval(k as f64 * step))
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("drift {f} produced non-finite values")));
    }
    let mut out = path.clone();
    out.kind = PathKind::Drifted;
    out.values = values;
    out.drift_id = Some(f.to_string());
    Ok(out)
}

/// Returns `B` for `coin = false` and `-B` for `coin = true`.
pub fn flip_sign(path: &SamplePath, coin: bool) -> Result<SamplePath> {
    if path.kind != PathKind::Bm {
        return Err(Error::UnsupportedKind(format!(
            "sign flip needs a Brownian path, got {:?}",
            path.kind
        )));
    }
    let mut out = path.clone();
    if coin {
        out.values.iter_mut().for_each(|v| *v = -*v);
        out.flipped = !out.flipped;
    }
    Ok(out)
}

/// Largest `|V(s) - V(t)| / sqrt(|s-t| ln(1/|s-t|))` over grid pairs in
/// `[0, 1]` with `h_min ≤ |s-t| ≤ 1/2`.
pub fn modulus_coefficient(path: &SamplePath, h_min: f64) -> Result<f64> {
    let step = path.step();
    if h_min < step * (1.0 - 1e-12) {
        return Err(Error::Resolution(format!(
            "h_min {h_min} below grid step {step}"
        )));
    }
    let lag_min = (h_min / step - 1e-9).ceil().max(1.0) as usize;
    let lag_max = 1usize << (path.level - 1);
    if lag_min > lag_max {
        return Err(Error::Domain(format!("no grid pairs with {h_min} ≤ |s-t| ≤ 1/2")));
    }
    let window = &path.values[..=(1usize << path.level)];
    let mut best = 0.0f64;
    for lag in lag_min..=lag_max {
        let h = lag as f64 * step;
        let mut m = 0.0f64;
        for (a, b) in window[lag..].iter().zip(window) {
            m = m.max((a - b).abs());
        }
        best = best.max(m / (h * (1.0 / h).ln()).sqrt());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bm_shape_and_determinism() {
        let p = sample_bm(11, 6).unwrap();
        assert_eq!(p.values().len(), 2 * 64 + 1);
        assert_eq!(p.values()[0], 0.0);
        assert_eq!(p, sample_bm(11, 6).unwrap());
        assert_ne!(p.values(), sample_bm(12, 6).unwrap().values());
        assert!(matches!(sample_bm(1, 0), Err(Error::Config(_))));
        assert!(matches!(sample_bm(1, 25), Err(Error::Config(_))));
    }

    #[test]
    fn bridge_restricts_exactly() {
        let p = sample_bm(3, 8).unwrap();
        let r = refine_bridge(&p, 99).unwrap();
        assert_eq!(r.level(), 9);
        for (k, v) in p.values().iter().enumerate() {
            assert_eq!(r.values()[2 * k].to_bits(), v.to_bits());
        }
        assert_eq!(r.restrict(8).unwrap(), p.values());
        let d = apply_drift(&p, &DriftSpec::Zero).unwrap();
        assert!(matches!(refine_bridge(&d, 1), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn bridge_midpoint_mean_is_average() {
        // segment (0, 1): midpoints over many seeds average to 1/2
        let mut values = vec![0.0; grid_len(1)];
        values[1] = 1.0;
        values[2] = 1.0;
        values[3] = 1.0;
        values[4] = 1.0;
        let p = SamplePath::from_values(PathKind::Bm, 1, values, 0).unwrap();
        let n = 20_000;
        let mean = (0..n)
            .map(|s| refine_bridge(&p, s).unwrap().values()[1])
            .sum::<f64>()
            / n as f64;
        // midpoint sd is 2^{-3/2}
        assert!((mean - 0.5).abs() < 4.0 * 0.3536 / (n as f64).sqrt());
    }

    #[test]
    fn drift_and_flip() {
        let p = sample_bm(5, 7).unwrap();
        let z = apply_drift(&p, &DriftSpec::Zero).unwrap();
        assert_eq!(z.values(), p.values());
        assert_eq!(z.kind(), PathKind::Drifted);
        let lin = apply_drift(&p, &DriftSpec::Linear { c: 2.0 }).unwrap();
        for k in 0..p.values().len() {
            assert_eq!(lin.values()[k], p.values()[k] - 2.0 * (k as f64 / 128.0));
        }
        let c = apply_drift(&p, &DriftSpec::Linear { c: 2.0 }).unwrap();
        assert_eq!(c.values()[0], 0.0);
        let shifted = DriftSpec::Tabulated(crate::drift::DriftTable::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap());
        assert_eq!(apply_drift(&p, &shifted).unwrap().values()[0], -0.5);

        assert_eq!(flip_sign(&p, false).unwrap(), p);
        let f = flip_sign(&p, true).unwrap();
        assert!(f.values().iter().zip(p.values()).all(|(a, b)| *a == -*b));
        assert_eq!(flip_sign(&f, true).unwrap().values(), p.values());
        assert!(flip_sign(&lin, true).is_err());
    }

    #[test]
    fn modulus_edge_cases() {
        let zero = SamplePath::from_values(PathKind::Bm, 6, vec![0.0; grid_len(6)], 0).unwrap();
        assert_eq!(modulus_coefficient(&zero, 1.0 / 64.0).unwrap(), 0.0);
        assert!(matches!(modulus_coefficient(&zero, 0.75), Err(Error::Domain(_))));
        assert!(matches!(modulus_coefficient(&zero, 1e-4), Err(Error::Resolution(_))));
        let p = sample_bm(8, 10).unwrap();
        let a = modulus_coefficient(&p, 1.0 / 1024.0).unwrap();
        let b = modulus_coefficient(&flip_sign(&p, true).unwrap(), 1.0 / 1024.0).unwrap();
        assert_eq!(a, b);
    }
}
