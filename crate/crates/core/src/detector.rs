//! Dyadic-interval detectors: fast increments, near-zero values and their
//! intersection.
//!
//! All fast detectors use a strict `>` against the threshold; the boundary
//! event has probability zero for Gaussian paths. Near-zero detectors use
//! `≤`. Every detector reads only grid values, so suprema are grid maxima.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::gaussian::{gaussian_tail_q, prob_abs_normal_le};
use crate::path::SamplePath;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlagKind {
    FastL,
    FastSup,
    ZeroNear,
    Intersect,
}

impl FlagKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FlagKind::FastL => "FAST_L",
            FlagKind::FastSup => "FAST_SUP",
            FlagKind::ZeroNear => "ZERO_NEAR",
            FlagKind::Intersect => "INTERSECT",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "FAST_L" => Ok(FlagKind::FastL),
            "FAST_SUP" => Ok(FlagKind::FastSup),
            "ZERO_NEAR" => Ok(FlagKind::ZeroNear),
            "INTERSECT" => Ok(FlagKind::Intersect),
            _ => Err(Error::Parse(format!("unknown flag kind `{s}`"))),
        }
    }
}

/// Where the near-zero test looks inside an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ZeroMode {
    /// `|V(k·2^-m)| ≤ threshold` at the left endpoint only.
    #[default]
    LeftEndpoint,
    /// Smallest `|V|` over the interval's grid points.
    IntervalMinimum,
}

/// Everything that determines a detector's predicate.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FlagParams {
    pub a: f64,
    pub epsilon: f64,
    pub c: f64,
    /// Slack multiplier on fast thresholds (1 = exact threshold).
    pub theta: f64,
    /// Window length in time units.
    pub window: f64,
    /// Threshold actually compared against.
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalFlags {
    level: u32,
    kind: FlagKind,
    params: FlagParams,
    words: Vec<u64>,
}

impl IntervalFlags {
    pub fn from_fn(level: u32, kind: FlagKind, params: FlagParams, mut f: impl FnMut(usize) -> bool) -> Self {
        let n = 1usize << level;
        let mut words = vec![0u64; n.div_ceil(64)];
        for k in 0..n {
            if f(k) {
                words[k / 64] |= 1 << (k % 64);
            }
        }
        Self { level, kind, params, words }
    }

    pub fn zeros(level: u32, kind: FlagKind) -> Self {
        Self::from_fn(level, kind, FlagParams::default(), |_| false)
    }

    pub fn ones(level: u32, kind: FlagKind) -> Self {
        Self::from_fn(level, kind, FlagParams::default(), |_| true)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn kind(&self) -> FlagKind {
        self.kind
    }

    pub fn params(&self) -> &FlagParams {
        &self.params
    }

    /// Number of intervals, `2^level`.
    pub fn len(&self) -> usize {
        1usize << self.level
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, k: usize) -> bool {
        self.words[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |k| self.get(k))
    }

    /// Indices of flagged intervals.
    pub fn ones_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.get(k))
    }

    /// `self ⊆ other` as sets of flagged intervals.
    pub fn is_subset_of(&self, other: &IntervalFlags) -> bool {
        self.level == other.level && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

/// `a·sqrt(2h ln(1/h))`.
pub fn fast_threshold(a: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("fast threshold needs 0 < h < 1, got {h}")));
    }
    if a < 0.0 {
        return Err(Error::Domain(format!("fast threshold needs a ≥ 0, got {a}")));
    }
    Ok(a * (2.0 * h * (1.0 / h).ln()).sqrt())
}

/// Window `m·2^-m` of the level-`m` increment detector.
pub fn l_window(m: u32) -> f64 {
    m as f64 * (-(m as f64)).exp2()
}

/// `a(1+ε)·sqrt(m·2^{-m+1}·ln(2^m/m))`.
pub fn l_threshold(m: u32, a: f64, epsilon: f64) -> f64 {
    let h = l_window(m);
    a * (1.0 + epsilon) * (2.0 * h * (1.0 / h).ln()).sqrt()
}

/// Increment-detector options beyond `(m, a, ε)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LOptions {
    /// Multiplier on the threshold; 1 reproduces the exact detector.
    pub theta: f64,
    /// Normalize by `sqrt(2)·h^H·sqrt(ln(1/h))` instead of `sqrt(2h ln(1/h))`.
    pub hurst: f64,
}

impl Default for LOptions {
    fn default() -> Self {
        Self { theta: 1.0, hurst: 0.5 }
    }
}

fn check_resolution(path: &SamplePath, m: u32, extra: u32, what: &str) -> Result<()> {
    if path.level() < m + extra {
        return Err(Error::Resolution(format!(
            "{what} at level {m} needs a path of level ≥ {}, got {}",
            m + extra,
            path.level()
        )));
    }
    Ok(())
}

/// Flags interval `k` of level `m` when the increment over the window
/// `[k·2^-m, k·2^-m + m·2^-m]` exceeds [`l_threshold`] in absolute value.
pub fn l_flags(path: &SamplePath, m: u32, a: f64, epsilon: f64) -> Result<IntervalFlags> {
    l_flags_with(path, m, a, epsilon, LOptions::default())
}

pub fn l_flags_with(path: &SamplePath, m: u32, a: f64, epsilon: f64, opts: LOptions) -> Result<IntervalFlags> {
    if m < 2 {
        return Err(Error::Domain(format!("increment detector needs m ≥ 2, got {m}")));
    }
    check_resolution(path, m, 0, "increment detector")?;
    let h = l_window(m);
    let threshold = opts.theta
        * a
        * (1.0 + epsilon)
        * std::f64::consts::SQRT_2
        * h.powf(opts.hurst)
        * (1.0 / h).ln().sqrt();
    let stride = 1usize << (path.level() - m);
    let offset = m as usize * stride;
    let v = path.values();
    let params = FlagParams {
        a,
        epsilon,
        c: 0.0,
        theta: opts.theta,
        window: h,
        threshold,
    };
    Ok(IntervalFlags::from_fn(m, FlagKind::FastL, params, |k| {
        let i = k * stride;
        (v[i + offset] - v[i]).abs() > threshold
    }))
}

/// `b·sqrt(2·2^-j·j·ln 2)`, the fast threshold at `h = 2^-j`.
pub fn sup_threshold(j: u32, b: f64) -> f64 {
    b * (2.0 * (-(j as f64)).exp2() * j as f64 * LN_2).sqrt()
}

/// Flags interval `k` of level `j` when the grid maximum of
/// `|V(s) - V(k·2^-j)|` over `s ∈ [k·2^-j, (k+1)·2^-j]` reaches
/// [`sup_threshold`]. Needs at least 8 grid steps per interval.
pub fn sup_flags(path: &SamplePath, j: u32, b: f64) -> Result<IntervalFlags> {
    check_resolution(path, j, 3, "sup detector")?;
    let threshold = sup_threshold(j, b);
    let w = 1usize << (path.level() - j);
    let v = path.values();
    let params = FlagParams {
        a: b,
        epsilon: 0.0,
        c: 0.0,
        theta: 1.0,
        window: (-(j as f64)).exp2(),
        threshold,
    };
    Ok(IntervalFlags::from_fn(j, FlagKind::FastSup, params, |k| {
        let i = k * w;
        let base = v[i];
        v[i..=i + w].iter().any(|x| (x - base).abs() >= threshold)
    }))
}

/// `max{2c0, 2√2}`, the default near-zero constant for a drift whose
/// 1/2-Hölder coefficient is `c0`.
pub fn default_zero_constant(c0: f64) -> f64 {
    (2.0 * c0).max(2.0 * std::f64::consts::SQRT_2)
}

/// `c·sqrt(m·2^-m·ln 2)`.
pub fn zero_threshold(m: u32, c: f64) -> f64 {
    c * (m as f64 * (-(m as f64)).exp2() * LN_2).sqrt()
}

/// Flags interval `k` of level `m` when `|V(k·2^-m)| ≤` [`zero_threshold`].
pub fn zero_near_flags(path: &SamplePath, m: u32, c: f64) -> Result<IntervalFlags> {
    zero_near_flags_with(path, m, c, ZeroMode::LeftEndpoint)
}

pub fn zero_near_flags_with(path: &SamplePath, m: u32, c: f64, mode: ZeroMode) -> Result<IntervalFlags> {
    check_resolution(path, m, 0, "near-zero detector")?;
    let threshold = zero_threshold(m, c);
    let stride = 1usize << (path.level() - m);
    let v = path.values();
    let params = FlagParams {
        a: 0.0,
        epsilon: 0.0,
        c,
        theta: 1.0,
        window: (-(m as f64)).exp2(),
        threshold,
    };
    Ok(IntervalFlags::from_fn(m, FlagKind::ZeroNear, params, |k| {
        let i = k * stride;
        match mode {
            ZeroMode::LeftEndpoint => v[i].abs() <= threshold,
            ZeroMode::IntervalMinimum => v[i..=i + stride].iter().any(|x| x.abs() <= threshold),
        }
    }))
}

/// Bitwise conjunction of two flag sets of the same level.
pub fn intersect_flags(x: &IntervalFlags, y: &IntervalFlags) -> Result<IntervalFlags> {
    if x.level != y.level {
        return Err(Error::Usage(format!(
            "cannot intersect flags of levels {} and {}",
            x.level, y.level
        )));
    }
    let params = FlagParams {
        a: x.params.a.max(y.params.a),
        epsilon: x.params.epsilon.max(y.params.epsilon),
        c: x.params.c.max(y.params.c),
        theta: x.params.theta.max(y.params.theta),
        window: x.params.window.max(y.params.window),
        threshold: 0.0,
    };
    Ok(IntervalFlags {
        level: x.level,
        kind: FlagKind::Intersect,
        params,
        words: x.words.iter().zip(&y.words).map(|(a, b)| a & b).collect(),
    })
}

/// Number of flagged intervals.
pub fn count(flags: &IntervalFlags) -> u64 {
    flags.words.iter().map(|w| w.count_ones() as u64).sum()
}

/// Probability that one level-`m` interval is flagged by [`l_flags`] on a
/// Brownian path: `2·Q(a(1+ε)·sqrt(2 ln(2^m/m)))`.
pub fn l_flag_probability(m: u32, a: f64, epsilon: f64) -> f64 {
    let l = (1.0 / l_window(m)).ln();
    2.0 * gaussian_tail_q(a * (1.0 + epsilon) * (2.0 * l).sqrt())
}

/// Exact expectation of `count(l_flags(B, m, a, ε))` for Brownian `B`.
pub fn expected_l_count(m: u32, a: f64, epsilon: f64) -> f64 {
    (m as f64).exp2() * l_flag_probability(m, a, epsilon)
}

/// Exact expectation of `count(zero_near_flags(B, m, c))` for Brownian `B`.
pub fn expected_zero_count(m: u32, c: f64) -> f64 {
    let thr = zero_threshold(m, c);
    let step = (-(m as f64)).exp2();
    (0..1usize << m)
        .map(|k| prob_abs_normal_le(thr, k as f64 * step))
        .sum()
}

/// `2c·k^{-1/2}·sqrt(m ln 2)`: upper bound for the probability that
/// interval `k ≥ 1` is flagged by [`zero_near_flags`] on a Brownian path.
pub fn zero_probability_bound(m: u32, c: f64, k: usize) -> f64 {
    2.0 * c * (m as f64 * LN_2 / k as f64).sqrt()
}

/// `δ = c0 / sqrt(2 ln(1/h))`: shifting `a` by `δ` absorbs a drift whose
/// 1/2-Hölder coefficient is `c0` over a window of length `h`.
pub fn holder_sandwich_delta(c0: f64, h: f64) -> f64 {
    c0 / (2.0 * (1.0 / h).ln()).sqrt()
}
