//! Nested counts `M_n(I)` of flagged level-`n` subintervals, the variance
//! bound `(2n+1)·p_n·2^{n-m}`, and the dimension condition of the counting
//! theorem.

use rayon::prelude::*;

use crate::detector::{l_flag_probability, l_flags, IntervalFlags};
use crate::error::{Error, Result};
use crate::path::{sample_bm, SamplePath};
use crate::rng::derive_seed;

/// Correlation range `η_n = 2n+1`: level-`n` intervals more than `n` apart
/// carry independent increment events.
pub fn eta_n(n: u32) -> f64 {
    2.0 * n as f64 + 1.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub m: u32,
    pub n: u32,
    pub a: f64,
    pub epsilon: f64,
    pub per_interval_counts: Vec<u64>,
    pub p_n_hat: f64,
    pub p_n_analytic: f64,
    pub var_hat: f64,
    pub var_bound: f64,
}

/// `(2n+1)·p_n·2^{n-m}`.
pub fn variance_bound(m: u32, n: u32, a: f64, epsilon: f64) -> f64 {
    eta_n(n) * l_flag_probability(n, a, epsilon) * ((n - m) as f64).exp2()
}

/// Block sums of level-`n` flags over level-`m` parents.
pub fn m_n_from_flags(flags: &IntervalFlags, m: u32) -> Result<Vec<u64>> {
    let n = flags.level();
    if m > n {
        return Err(Error::Domain(format!("parent level {m} exceeds flag level {n}")));
    }
    let block = 1usize << (n - m);
    let mut counts = vec![0u64; 1 << m];
    for k in flags.ones_indices() {
        counts[k / block] += 1;
    }
    Ok(counts)
}

fn check_levels(m: u32, n: u32) -> Result<()> {
    if m < 2 || n < m {
        return Err(Error::Domain(format!("need n ≥ m ≥ 2, got m = {m}, n = {n}")));
    }
    Ok(())
}

fn mean_var(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    (mean, xs.map(|x| (x - mean).powi(2)).sum::<f64>() / n)
}

/// `M_n(I)` for every level-`m` interval `I` of one path. `var_hat` is the
/// spread of the counts across intervals of this path.
pub fn m_n_counts(path: &SamplePath, m: u32, n: u32, a: f64, epsilon: f64) -> Result<CountReport> {
    check_levels(m, n)?;
    let flags = l_flags(path, n, a, epsilon)?;
    let counts = m_n_from_flags(&flags, m)?;
    let total: u64 = counts.iter().sum();
    let (_, var) = mean_var(counts.iter().map(|&c| c as f64));
    Ok(CountReport {
        m,
        n,
        a,
        epsilon,
        p_n_hat: total as f64 / (n as f64).exp2(),
        p_n_analytic: l_flag_probability(n, a, epsilon),
        var_hat: var,
        var_bound: variance_bound(m, n, a, epsilon),
        per_interval_counts: counts,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceReport {
    /// Counts summed over paths, one per level-`m` interval.
    pub pooled: CountReport,
    pub n_paths: usize,
    /// Mean of `M_n(I)` over all (path, interval) pairs.
    pub mean_hat: f64,
    /// Per-path blocked standard error of `mean_hat`.
    pub mean_stderr: f64,
    /// `p_n·2^{n-m}`.
    pub mean_oracle: f64,
    /// Per-path blocked standard error of `var_hat`.
    pub var_stderr: f64,
    /// `var_hat / var_bound`; `None` when the bound is vacuous
    /// (`p_n·2^{n-m} < 1e-3`).
    pub ratio: Option<f64>,
}

impl VarianceReport {
    /// `var_hat ≤ var_bound·(1 + 3·relative stderr)`, or vacuous.
    pub fn bound_holds(&self) -> bool {
        let p = &self.pooled;
        if self.ratio.is_none() || p.var_hat == 0.0 {
            return true;
        }
        p.var_hat <= p.var_bound * (1.0 + 3.0 * self.var_stderr / p.var_hat)
    }

    /// Mean within three standard errors of the oracle.
    pub fn mean_agrees(&self) -> bool {
        (self.mean_hat - self.mean_oracle).abs() <= 3.0 * self.mean_stderr.max(1e-12)
    }
}

/// Ensemble of `M_n(I)` over `n_paths` Brownian paths of level `n`, pooled
/// over `(path, I)`.
pub fn variance_report(
    master_seed: u64,
    n_paths: usize,
    m: u32,
    n: u32,
    a: f64,
    epsilon: f64,
) -> Result<VarianceReport> {
    check_levels(m, n)?;
    if n_paths < 2 {
        return Err(Error::Config(format!("variance report needs ≥ 2 paths, got {n_paths}")));
    }
    let per_path: Vec<Vec<u64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let path = sample_bm(derive_seed(master_seed, i as u64), n)?;
            Ok(m_n_counts(&path, m, n, a, epsilon)?.per_interval_counts)
        })
        .collect::<Result<_>>()?;
    let intervals = 1usize << m;
    let all = per_path.iter().flatten().map(|&c| c as f64);
    let (mean, var) = mean_var(all);
    let np = n_paths as f64;
    let path_means: Vec<f64> = per_path
        .iter()
        .map(|c| c.iter().sum::<u64>() as f64 / intervals as f64)
        .collect();
    let path_sq: Vec<f64> = per_path
        .iter()
        .map(|c| c.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / intervals as f64)
        .collect();
    let se = |xs: &[f64]| {
        let (_, v) = mean_var(xs.iter().copied());
        (v / (np - 1.0)).sqrt()
    };
    let mut pooled_counts = vec![0u64; intervals];
    for c in &per_path {
        for (p, x) in pooled_counts.iter_mut().zip(c) {
            *p += x;
        }
    }
    let p_n = l_flag_probability(n, a, epsilon);
    let mean_oracle = p_n * ((n - m) as f64).exp2();
    let var_bound = variance_bound(m, n, a, epsilon);
    Ok(VarianceReport {
        pooled: CountReport {
            m,
            n,
            a,
            epsilon,
            per_interval_counts: pooled_counts,
            p_n_hat: mean / ((n - m) as f64).exp2(),
            p_n_analytic: p_n,
            var_hat: var,
            var_bound,
        },
        n_paths,
        mean_hat: mean,
        mean_stderr: se(&path_means),
        mean_oracle,
        var_stderr: se(&path_sq),
        ratio: (mean_oracle >= 1e-3).then(|| var / var_bound),
    })
}

/// Empirical covariance of `L(I1)` and `L(I2)` at level `n` with its
/// standard error.
pub fn l_covariance(
    master_seed: u64,
    n_paths: usize,
    n: u32,
    a: f64,
    epsilon: f64,
    i1: usize,
    i2: usize,
) -> Result<(f64, f64)> {
    if i1.max(i2) >= 1 << n {
        return Err(Error::Domain(format!("interval index out of range for level {n}")));
    }
    let pairs: Vec<(f64, f64)> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let path = sample_bm(derive_seed(master_seed, i as u64), n)?;
            let f = l_flags(&path, n, a, epsilon)?;
            Ok((f.get(i1) as u8 as f64, f.get(i2) as u8 as f64))
        })
        .collect::<Result<_>>()?;
    let np = n_paths as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / np;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / np;
    let prods: Vec<f64> = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).collect();
    let (cov, var) = mean_var(prods.iter().copied());
    Ok((cov, (var / (np - 1.0)).sqrt()))
}

/// `a·ε·sqrt(2m·ln(2^m/m)) ≥ 2c1·sqrt(ln 2^m)`: the drift-free slack in the
/// level-`m` threshold covers a modulus of continuity with coefficient `c1`.
pub fn absorption_holds(m: u32, a: f64, epsilon: f64, c1: f64) -> bool {
    let mf = m as f64;
    let lhs = a * epsilon * (2.0 * mf * (mf.exp2() / mf).ln()).sqrt();
    let rhs = 2.0 * c1 * (mf * std::f64::consts::LN_2).sqrt();
    lhs >= rhs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    DecreasingToZero,
    Diverging,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::DecreasingToZero => "DECREASING-TO-ZERO",
            Verdict::Diverging => "DIVERGING",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionCondition {
    /// `(n, 2^{(γ-1)n}·(2n+1)/p_n)`.
    pub rows: Vec<(u32, f64)>,
    pub verdict: Verdict,
}

/// Tabulates `2^{(γ-1)n}·(2n+1)/p_n` over `n_range` with the exact `p_n`.
///
/// The verdict looks at the second half of the range: strictly decreasing
/// with final value below `10^-3` times the first is
/// [`Verdict::DecreasingToZero`]; strictly increasing is
/// [`Verdict::Diverging`].
pub fn dimension_condition(gamma_target: f64, a: f64, epsilon: f64, n_range: &[u32]) -> Result<DimensionCondition> {
    if !(gamma_target > 0.0 && gamma_target < 1.0) {
        return Err(Error::Domain(format!("gamma must lie in (0,1), got {gamma_target}")));
    }
    if n_range.len() < 2 {
        return Err(Error::Domain("n_range needs at least two levels".into()));
    }
    let rows: Vec<(u32, f64)> = n_range
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let log = (gamma_target - 1.0) * nf * std::f64::consts::LN_2 + eta_n(n).ln()
                - l_flag_probability(n, a, epsilon).ln();
            (n, log.exp())
        })
        .collect();
    let tail = &rows[rows.len() / 2..];
    let dec = tail.windows(2).all(|w| w[1].1 < w[0].1);
    let inc = tail.windows(2).all(|w| w[1].1 > w[0].1);
    let verdict = if dec && rows[rows.len() - 1].1 < rows[0].1 * 1e-3 {
        Verdict::DecreasingToZero
    } else if inc {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    };
    Ok(DimensionCondition { rows, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::PathKind;

    #[test]
    fn n_equals_m_is_own_flag() {
        let p = sample_bm(3, 10).unwrap();
        let r = m_n_counts(&p, 8, 8, 0.4, 0.0).unwrap();
        let f = l_flags(&p, 8, 0.4, 0.0).unwrap();
        assert_eq!(r.per_interval_counts, f.iter().map(|b| b as u64).collect::<Vec<_>>());
    }

    #[test]
    fn zero_path_has_no_counts() {
        let z = SamplePath::from_values(PathKind::Bm, 8, vec![0.0; crate::path::grid_len(8)], 0).unwrap();
        let r = m_n_counts(&z, 4, 8, 0.1, 0.0).unwrap();
        assert!(r.per_interval_counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn dimension_condition_verdicts() {
        let long: Vec<u32> = (20..=400).collect();
        let short: Vec<u32> = (20..=60).collect();
        assert_eq!(dimension_condition(0.9, 0.0, 0.0, &long).unwrap().verdict, Verdict::DecreasingToZero);
        assert_eq!(dimension_condition(0.7, 0.5, 0.01, &long).unwrap().verdict, Verdict::DecreasingToZero);
        assert_eq!(dimension_condition(0.7, 0.5, 0.01, &short).unwrap().verdict, Verdict::Inconclusive);
        assert_eq!(dimension_condition(0.9, 0.5, 0.01, &short).unwrap().verdict, Verdict::Diverging);
        assert!(dimension_condition(1.0, 0.5, 0.01, &short).is_err());
    }

    #[test]
    fn absorption_grows_with_m() {
        assert!(!absorption_holds(4, 0.5, 0.05, 1.0));
        assert!(absorption_holds(4, 0.5, 0.05, 0.0));
    }
}
