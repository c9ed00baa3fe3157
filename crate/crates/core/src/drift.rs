//! Deterministic drift functions and their Hölder behaviour.
//!
//! The drifts are the ones whose perturbation of Brownian fast times is
//! interesting: Cantor staircases (which change the fast-time dimension),
//! Loud's lacunary triangle-wave series (reverse Hölder at every point), and
//! plain linear or tabulated probes.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest `depth` accepted for a Cantor drift. Beyond this the recursion only
/// amplifies rounding error.
pub const MAX_CANTOR_DEPTH: u32 = 40;

/// Largest generation for [`cantor_components`] (2^n intervals are materialized).
pub const MAX_CANTOR_GENERATION: u32 = 26;

/// Grid level cap for the quadratic-cost Hölder scan.
pub const MAX_HOLDER_LEVEL: u32 = 16;

/// Witness scans give up after this many grid steps without a hit.
pub const WITNESS_SCAN_BUDGET: u64 = 1 << 26;

#[derive(Clone, Debug, PartialEq)]
pub enum DriftSpec {
    Zero,
    Linear { c: f64 },
    /// Middle-(1-2γ) Cantor function truncated at `depth` generations.
    Cantor { gamma: f64, depth: u32 },
    /// Partial sum of Loud's series `Σ 2^{-2Aαk} g0(2^{2Ak} t)`, `k = 1..=terms`.
    Loud { alpha: f64, a: u32, terms: u32 },
    Tabulated(DriftTable),
}

/// Piecewise-linear drift through `(t, f(t))` pairs at dyadic times.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftTable {
    ts: Vec<f64>,
    values: Vec<f64>,
}

impl DriftTable {
    pub fn new(ts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if ts.is_empty() || ts.len() != values.len() {
            return Err(Error::Config("drift table needs matching non-empty columns".into()));
        }
        for w in ts.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config(format!(
                    "drift table times must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        for (&t, &v) in ts.iter().zip(&values) {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::Config("drift table entries must be finite".into()));
            }
            if (t * (1u64 << 40) as f64).fract() != 0.0 {
                return Err(Error::Config(format!("drift table time {t} is not dyadic")));
            }
        }
        Ok(Self { ts, values })
    }

    /// Reads a whitespace-separated two-column text table. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let (ts, values) = crate::textio::parse_two_columns(&text)?;
        Self::new(ts, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.ts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.ts.len();
        if t <= self.ts[0] {
            return self.values[0];
        }
        if t >= self.ts[n - 1] {
            return self.values[n - 1];
        }
        let i = self.ts.partition_point(|&x| x <= t);
        let (t0, t1) = (self.ts[i - 1], self.ts[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

impl DriftSpec {
    pub fn linear(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Config("linear drift slope must be finite".into()));
        }
        Ok(DriftSpec::Linear { c })
    }

    pub fn cantor(gamma: f64, depth: u32) -> Result<Self> {
        check_gamma(gamma)?;
        if depth > MAX_CANTOR_DEPTH {
            return Err(Error::Config(format!(
                "cantor depth {depth} exceeds {MAX_CANTOR_DEPTH}"
            )));
        }
        Ok(DriftSpec::Cantor { gamma, depth })
    }

    pub fn loud(alpha: f64, a: u32, terms: u32) -> Result<Self> {
        check_loud(alpha, a, terms)?;
        Ok(DriftSpec::Loud { alpha, a, terms })
    }

    /// Checks the variant's parameter constraints.
    pub fn validate(&self) -> Result<()> {
        match *self {
            DriftSpec::Zero | DriftSpec::Tabulated(_) => Ok(()),
            DriftSpec::Linear { c } => Self::linear(c).map(|_| ()),
            DriftSpec::Cantor { gamma, depth } => Self::cantor(gamma, depth).map(|_| ()),
            DriftSpec::Loud { alpha, a, terms } => check_loud(alpha, a, terms),
        }
    }

    /// Value at time `t`. Cantor drifts are 0 left of 0 and 1 right of 1.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            DriftSpec::Zero => 0.0,
            DriftSpec::Linear { c } => c * t,
            DriftSpec::Cantor { gamma, depth } => cantor_eval(*gamma, *depth, t),
            DriftSpec::Loud { alpha, a, terms } => loud_eval(*alpha, *a, *terms, t),
            DriftSpec::Tabulated(table) => table.eval(t),
        }
    }

    /// Evaluates on `k·2^-level` for `k = 0..count`.
    pub fn tabulate(&self, level: u32, count: usize) -> Vec<f64> {
        let step = (-(level as f64)).exp2();
        (0..count).map(|k| self.eval(k as f64 * step)).collect()
    }

    /// Whether this is a Cantor drift in the regime `γ < 1/4` where the
    /// fast-time dimension formula `max{1-a², -log2/logγ}` is known.
    pub fn in_cantor_dimension_regime(&self) -> bool {
        matches!(self, DriftSpec::Cantor { gamma, .. } if *gamma < 0.25)
    }

    /// Pointwise error bound of a depth-truncated Cantor function.
    pub fn truncation_error(&self) -> f64 {
        match self {
            DriftSpec::Cantor { depth, .. } => (-(*depth as f64)).exp2(),
            _ => 0.0,
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::Config(format!("cantor gamma {gamma} outside (0, 1/2)")));
    }
    Ok(())
}

fn check_loud(alpha: f64, a: u32, terms: u32) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("loud alpha {alpha} outside (0, 1)")));
    }
    if a == 0 || terms == 0 {
        return Err(Error::Config("loud A and terms must be positive".into()));
    }
    if 2.0 * a as f64 * (1.0 - alpha) <= 1.0 {
        return Err(Error::Config(format!(
            "loud parameters violate 2A(1-alpha) > 1 (A={a}, alpha={alpha})"
        )));
    }
    Ok(())
}

impl fmt::Display for DriftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriftSpec::Zero => write!(f, "zero"),
            DriftSpec::Linear { c } => write!(f, "linear:c={c}"),
            DriftSpec::Cantor { gamma, depth } => write!(f, "cantor:gamma={gamma},depth={depth}"),
            DriftSpec::Loud { alpha, a, terms } => {
                write!(f, "loud:alpha={alpha},A={a},terms={terms}")
            }
            DriftSpec::Tabulated(t) => write!(f, "table:points={}", t.ts.len()),
        }
    }
}

/// Parses descriptors such as `zero`, `linear:c=0.5`,
/// `cantor:gamma=0.1111,depth=20`, `loud:alpha=0.4,A=2,terms=6` or
/// `table:path=drift.txt`.
impl FromStr for DriftSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = Vec::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("drift parameter `{part}` is not key=value")))?;
            kv.push((k.trim().to_string(), v.trim().to_string()));
        }
        let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let num = |key: &str, default: Option<f64>| -> Result<f64> {
            match get(key) {
                Some(v) => v
                    .parse::<f64>()
                    .map_err(|_| Error::Usage(format!("drift parameter {key}={v} is not a number"))),
                None => default.ok_or_else(|| Error::Usage(format!("drift `{name}` needs {key}="))),
            }
        };
        let int = |key: &str, default: u32| -> Result<u32> {
            match get(key) {
                Some(v) => v
                    .parse::<u32>()
                    .map_err(|_| Error::Usage(format!("drift parameter {key}={v} is not an integer"))),
                None => Ok(default),
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "zero" | "none" => Ok(DriftSpec::Zero),
            "linear" => DriftSpec::linear(num("c", None)?),
            "cantor" => DriftSpec::cantor(num("gamma", None)?, int("depth", 20)?),
            "loud" => {
                let a = match get("A").or_else(|| get("a")) {
                    Some(v) => v
                        .parse::<u32>()
                        .map_err(|_| Error::Usage(format!("drift parameter A={v} is not an integer")))?,
                    None => 2,
                };
                DriftSpec::loud(num("alpha", None)?, a, int("terms", 6)?)
            }
            "table" | "tabulated" => {
                let path = get("path").ok_or_else(|| Error::Usage("table drift needs path=".into()))?;
                Ok(DriftSpec::Tabulated(DriftTable::load(Path::new(path))?))
            }
            other => Err(Error::Usage(format!("unknown drift `{other}`"))),
        }
    }
}

fn cantor_eval(gamma: f64, depth: u32, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let mut x = t;
    let mut acc = 0.0;
    let mut weight = 1.0;
    for _ in 0..depth {
        if x <= gamma {
            x /= gamma;
        } else if x < 1.0 - gamma {
            return acc + 0.5 * weight;
        } else {
            acc += 0.5 * weight;
            x = (x - 1.0 + gamma) / gamma;
        }
        weight *= 0.5;
    }
    acc + weight * x.clamp(0.0, 1.0)
}

/// Depth-`depth` approximation of the middle-(1-2γ) Cantor function at `t`.
///
/// Inside each generation-`depth` component the function is interpolated
/// linearly, which is within `2^-depth` of the limit everywhere. Values for
/// `t > 1` extend constantly at 1.
pub fn cantor_value(gamma: f64, depth: u32, t: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(cantor_eval(gamma, depth, t))
}

/// Triangle wave: 0 at even integers, 1 at odd integers, linear between.
pub fn triangle_wave(x: f64) -> f64 {
    let r = x.abs().rem_euclid(2.0);
    if r <= 1.0 {
        r
    } else {
        2.0 - r
    }
}

fn loud_eval(alpha: f64, a: u32, terms: u32, t: f64) -> f64 {
    let mut sum = 0.0;
    for k in 1..=terms {
        let e = 2.0 * a as f64 * k as f64;
        sum += (-e * alpha).exp2() * triangle_wave(e.exp2() * t);
    }
    sum
}

/// Partial sum of Loud's series at `t`.
pub fn loud_value(alpha: f64, a: u32, terms: u32, t: f64) -> Result<f64> {
    check_loud(alpha, a, terms)?;
    Ok(loud_eval(alpha, a, terms, t))
}

/// `Σ_{k=1}^{terms} 2^{-2Aαk}`, the sup-norm bound of the partial sum.
pub fn loud_sup_bound(alpha: f64, a: u32, terms: u32) -> f64 {
    (1..=terms)
        .map(|k| (-2.0 * a as f64 * alpha * k as f64).exp2())
        .sum()
}

/// Sorted, disjoint closed subintervals of `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalList {
    intervals: Vec<(f64, f64)>,
}

impl IntervalList {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(l, r) in &intervals {
            if !(0.0..=1.0).contains(&l) || !(0.0..=1.0).contains(&r) || l >= r {
                return Err(Error::Domain(format!("bad interval [{l}, {r}]")));
            }
        }
        for w in intervals.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(Error::Domain("intervals overlap or are unsorted".into()));
            }
        }
        Ok(Self { intervals })
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn as_slice(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(l, r)| r - l).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        let i = self.intervals.partition_point(|&(l, _)| l <= t);
        i > 0 && t <= self.intervals[i - 1].1
    }

    /// Open gaps between consecutive intervals.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }
}

/// Components of the generation-`n` approximation of the middle-(1-2γ) Cantor
/// set: `2^n` intervals of length `γ^n`.
pub fn cantor_components(gamma: f64, n: u32) -> Result<IntervalList> {
    check_gamma(gamma)?;
    let len = gamma.powi(n as i32);
    if n > MAX_CANTOR_GENERATION || !len.is_normal() {
        return Err(Error::Range(format!(
            "cantor generation {n} too deep for gamma {gamma}"
        )));
    }
    let mut lefts = vec![0.0f64];
    let mut scale = 1.0;
    for _ in 0..n {
        let shift = (1.0 - gamma) * scale;
        let mut next = Vec::with_capacity(lefts.len() * 2);
        // left endpoints of generation g+1 are x and x + (1-γ)γ^g
        next.extend(lefts.iter().copied());
        next.extend(lefts.iter().map(|x| x + shift));
        next.sort_by(|a, b| a.total_cmp(b));
        lefts = next;
        scale *= gamma;
    }
    Ok(IntervalList {
        intervals: lefts.into_iter().map(|l| (l, (l + len).min(1.0))).collect(),
    })
}

/// Largest `|f(t) - f(s)| / |t - s|^θ` over grid pairs in `[0, 1]` at
/// `grid_level`. This is a lower bound for the true Hölder coefficient.
pub fn holder_coefficient(f: &DriftSpec, theta: f64, grid_level: u32) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Domain(format!("holder exponent {theta} outside (0, 1]")));
    }
    if grid_level > MAX_HOLDER_LEVEL {
        return Err(Error::Config(format!(
            "holder grid level {grid_level} exceeds {MAX_HOLDER_LEVEL}"
        )));
    }
    let n = 1usize << grid_level;
    let values = f.tabulate(grid_level, n + 1);
    Ok(holder_coefficient_of_values(&values, grid_level, theta))
}

/// Same scan over an already tabulated function `values[k] = f(k·2^-level)`.
pub fn holder_coefficient_of_values(values: &[f64], level: u32, theta: f64) -> f64 {
    let step = (-(level as f64)).exp2();
    let n = values.len();
    let mut best = 0.0f64;
    for lag in 1..n {
        let mut m = 0.0f64;
        for (a, b) in values[lag..].iter().zip(values) {
            m = m.max((a - b).abs());
        }
        best = best.max(m / (lag as f64 * step).powf(theta));
    }
    best
}

/// Smallest grid increment `h = k·2^-grid_level ≤ h_max` with
/// `|f(t+h) - f(t)| ≥ c·h^β`, or `None` if there is none at this resolution.
///
/// Candidate increments are trimmed so that `t + h ≤ 1`. A `None` says
/// nothing about smaller, off-grid increments.
pub fn reverse_holder_witness(
    f: &DriftSpec,
    beta: f64,
    c: f64,
    t: f64,
    h_max: f64,
    grid_level: u32,
) -> Result<Option<f64>> {
    reverse_holder_witness_from(f, beta, c, t, 0.0, h_max, grid_level)
}

/// As [`reverse_holder_witness`], restricted to increments `h ≥ h_min`.
pub fn reverse_holder_witness_from(
    f: &DriftSpec,
    beta: f64,
    c: f64,
    t: f64,
    h_min: f64,
    h_max: f64,
    grid_level: u32,
) -> Result<Option<f64>> {
    if !(beta > 0.0 && beta < 1.0) || !(c > 0.0) {
        return Err(Error::Domain(format!("need 0 < beta < 1 and c > 0 (beta={beta}, c={c})")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("witness time {t} outside [0, 1]")));
    }
    let step = (-(grid_level as f64)).exp2();
    let h_max = h_max.min(1.0 - t);
    let k_min = ((h_min / step).ceil() as u64).max(1);
    let k_max = (h_max / step).floor() as u64;
    let ft = f.eval(t);
    let mut scanned = 0u64;
    for k in k_min..=k_max {
        let h = k as f64 * step;
        if (f.eval(t + h) - ft).abs() >= c * h.powf(beta) {
            return Ok(Some(h));
        }
        scanned += 1;
        if scanned >= WITNESS_SCAN_BUDGET {
            return Err(Error::Resolution(format!(
                "witness scan exceeded {WITNESS_SCAN_BUDGET} steps; lower grid_level or h_max"
            )));
        }
    }
    Ok(None)
}

/// Which of the sign sets `{f(t+h)-f(t) ≥ 0}` / `{f(t+h)-f(t) ≤ 0}` contain `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignSet {
    Plus,
    Minus,
    Both,
}

pub fn sign_set_indicator(f: &DriftSpec, h: f64, t: f64) -> SignSet {
    let d = f.eval(t + h) - f.eval(t);
    if d > 0.0 {
        SignSet::Plus
    } else if d < 0.0 {
        SignSet::Minus
    } else {
        SignSet::Both
    }
}
