//! Scaling exponents from per-level counts and the closed-form dimension
//! formulas they are compared against.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Correction {
    #[default]
    None,
    /// Divide each count by `sqrt(max(ln(2^m/m), 1))` before fitting.
    SqrtLog,
}

impl Correction {
    pub fn factor(self, m: u32) -> f64 {
        match self {
            Correction::None => 1.0,
            Correction::SqrtLog => {
                let m = m as f64;
                (m * std::f64::consts::LN_2 - m.ln()).max(1.0).sqrt()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    /// Levels that entered the regression (positive counts only).
    pub levels: Vec<u32>,
    pub counts: Vec<f64>,
    /// Levels skipped because their count was not positive.
    pub dropped: Vec<u32>,
    pub correction: Correction,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
}

/// Least-squares slope of `log2(count_m / correction(m))` against `m`.
pub fn fit_exponent(levels: &[u32], counts: &[f64], correction: Correction) -> Result<ScalingFit> {
    if levels.len() != counts.len() {
        return Err(Error::Usage(format!(
            "{} levels but {} counts",
            levels.len(),
            counts.len()
        )));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Usage("levels must be strictly increasing".into()));
    }
    let mut used = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (&m, &c) in levels.iter().zip(counts) {
        if c > 0.0 && c.is_finite() {
            used.push(m);
            kept.push(c);
        } else {
            dropped.push(m);
        }
    }
    if used.len() < 3 {
        return Err(Error::Fit {
            reason: format!("need 3 levels with positive counts, have {}", used.len()),
            levels: levels.to_vec(),
            counts: counts.to_vec(),
        });
    }
    let xs: Vec<f64> = used.iter().map(|&m| m as f64).collect();
    let ys: Vec<f64> = used
        .iter()
        .zip(&kept)
        .map(|(&m, &c)| (c / correction.factor(m)).log2())
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if n > 2.0 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { (1.0 - rss / syy).clamp(0.0, 1.0) } else { 1.0 };
    if !slope.is_finite() {
        return Err(Error::Numeric("non-finite regression slope".into()));
    }
    Ok(ScalingFit {
        levels: used,
        counts: kept,
        dropped,
        correction,
        slope,
        intercept,
        stderr,
        r_squared,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimResult {
    pub value: f64,
    pub formula_id: &'static str,
}

fn dim(value: f64, formula_id: &'static str) -> DimResult {
    DimResult {
        value: value.clamp(0.0, 1.0),
        formula_id,
    }
}

/// `1 - a²`: dimension of the a-fast times of Brownian motion.
pub fn dim_fast(a: f64) -> Result<DimResult> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("dim_fast needs a in [0, 1], got {a}")));
    }
    Ok(dim(1.0 - a * a, "fast"))
}

/// `max{1/2 - a², 0}`: fast times intersected with the zero set.
pub fn dim_fast_zero(a: f64) -> Result<DimResult> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("dim_fast_zero needs a in (0, 1], got {a}")));
    }
    Ok(dim((0.5 - a * a).max(0.0), "fast_zero"))
}

/// `-ln 2 / ln γ`: middle-(1-2γ) Cantor set.
pub fn dim_cantor(gamma: f64) -> Result<DimResult> {
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::Domain(format!("dim_cantor needs gamma in (0, 1/2), got {gamma}")));
    }
    Ok(dim(-std::f64::consts::LN_2 / gamma.ln(), "cantor"))
}

/// `max{1 - a², -ln 2/ln γ}`: fast times of Brownian motion minus a Cantor
/// function with `γ < 1/4`.
pub fn dim_fast_cantor_drift(a: f64, gamma: f64) -> Result<DimResult> {
    if !(gamma > 0.0 && gamma < 0.25) {
        return Err(Error::Domain(format!(
            "dim_fast_cantor_drift needs gamma in (0, 1/4), got {gamma}"
        )));
    }
    let fast = dim_fast(a)?.value;
    let cantor = dim_cantor(gamma)?.value;
    Ok(dim(fast.max(cantor), "fast_cantor_drift"))
}

#[derive(Clone, Debug, PartialEq)]
pub enum FbmCantorDim {
    Value(DimResult),
    /// `α > 1 - 2^{1-1/H}` fails; the formula does not apply.
    ConditionViolated { alpha: f64, hurst: f64, bound: f64 },
}

/// `max{1 - a², ln 2 / (ln 2 - ln(1-α))}` for fBm minus a middle-α Cantor
/// function, valid when `α > 1 - 2^{1-1/H}`.
pub fn dim_fbm_cantor_drift(a: f64, alpha: f64, hurst: f64) -> Result<FbmCantorDim> {
    if !(alpha > 0.0 && alpha < 1.0) || !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Domain(format!(
            "need alpha, hurst in (0, 1), got alpha={alpha}, hurst={hurst}"
        )));
    }
    let bound = 1.0 - (1.0 - 1.0 / hurst).exp2();
    if alpha <= bound {
        return Ok(FbmCantorDim::ConditionViolated { alpha, hurst, bound });
    }
    let ln2 = std::f64::consts::LN_2;
    let cantor = ln2 / (ln2 - (1.0 - alpha).ln());
    let fast = dim_fast(a)?.value;
    Ok(FbmCantorDim::Value(dim(fast.max(cantor), "fbm_cantor_drift")))
}

/// Per-interval flag frequencies at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelFrequencies {
    pub level: u32,
    pub freqs: Vec<f64>,
}

impl LevelFrequencies {
    pub fn total(&self) -> f64 {
        self.freqs.iter().sum()
    }
}

/// Per-level terms `2^{-jγ}·Σ_k freq(k, j)` of the covering sum.
pub fn covering_terms(levels: &[LevelFrequencies], gamma_exp: f64) -> Vec<(u32, f64)> {
    levels
        .iter()
        .map(|l| (l.level, (-(l.level as f64) * gamma_exp).exp2() * l.total()))
        .collect()
}

/// `Σ_{j ≥ i_start} Σ_k 2^{-jγ}·freq(k, j)` over the available levels.
///
/// With finitely many levels this is a partial sum, even when the full
/// series diverges.
pub fn covering_sum(levels: &[LevelFrequencies], gamma_exp: f64, i_start: u32) -> f64 {
    covering_terms(levels, gamma_exp)
        .into_iter()
        .filter(|(j, _)| *j >= i_start)
        .map(|(_, t)| t)
        .sum()
}
