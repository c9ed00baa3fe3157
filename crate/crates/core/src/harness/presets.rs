use crate::detector::{
    count, default_zero_constant, expected_l_count, expected_zero_count, holder_sandwich_delta,
    intersect_flags, l_flags, l_flags_with, l_window, sup_flags, zero_near_flags, IntervalFlags,
    LOptions,
};
use crate::drift::{holder_coefficient, holder_coefficient_of_values, DriftSpec, MAX_HOLDER_LEVEL};
use crate::ensemble::{map_paths, mean_stderr};
use crate::error::{Error, Result};
use crate::fbm::FbmGenerator;
use crate::gaussian::phi;
use crate::limsup::{absorption_holds, variance_report};
use crate::measure::{expected_j, j_mu_estimate, paley_zygmund_check, parse_measure, select_sign_set};
use crate::path::{apply_drift, grid_len, modulus_coefficient, sample_bm, SamplePath};
use crate::rng::derive_seed;
use crate::scaling::{
    dim_cantor, dim_fast, dim_fast_cantor_drift, dim_fast_zero, dim_fbm_cantor_drift, fit_exponent,
    covering_sum, covering_terms, Correction, FbmCantorDim, LevelFrequencies,
};

use super::{ExperimentConfig, Preset, ResultRow};

struct Rows<'a> {
    cfg: &'a ExperimentConfig,
    n_paths: usize,
    rows: Vec<ResultRow>,
}

impl<'a> Rows<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Self {
            cfg,
            n_paths: cfg.n_paths,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, level: Option<u32>, stat: &str, value: f64, stderr: Option<f64>, oracle: Option<f64>) {
        self.rows.push(ResultRow {
            preset: self.cfg.preset,
            level,
            stat: stat.to_string(),
            value,
            stderr,
            oracle,
            n_paths: self.n_paths,
            seed: self.cfg.master_seed,
        });
    }

    /// Fit row, or nothing when too few levels carry positive counts.
    fn push_fit(&mut self, stat: &str, levels: &[u32], counts: &[f64], corr: Correction, oracle: Option<f64>) -> Result<()> {
        if levels.len() < 3 {
            return Ok(());
        }
        match fit_exponent(levels, counts, corr) {
            Ok(fit) => {
                self.push(None, stat, fit.slope, Some(fit.stderr), oracle);
                Ok(())
            }
            Err(Error::Fit { .. }) => Ok(()),
            Err(e) => Err(e),
        }
    }
}

pub(super) fn run_preset(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    match cfg.preset {
        Preset::OreyTaylor => orey_taylor(cfg),
        Preset::ZeroIntersection => zero_intersection(cfg),
        Preset::CantorDrift => cantor_drift(cfg),
        Preset::LoudDrift => loud_drift(cfg),
        Preset::Fbm => fbm(cfg),
        Preset::HolderSandwich => holder_sandwich(cfg),
        Preset::Covering => covering(cfg),
        Preset::Jlab => jlab(cfg),
        Preset::LimsupVariance => limsup(cfg),
        Preset::Dims => dims(cfg),
    }
}

fn drifted_bm(seed: u64, level: u32, drift: &DriftSpec) -> Result<SamplePath> {
    let b = sample_bm(seed, level)?;
    match drift {
        DriftSpec::Zero => Ok(b),
        f => apply_drift(&b, f),
    }
}

/// Column means and standard errors of per-path statistic vectors.
fn columns(samples: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let width = samples.first().map_or(0, Vec::len);
    (0..width)
        .map(|j| mean_stderr(&samples.iter().map(|s| s[j]).collect::<Vec<_>>()))
        .collect()
}

fn l_count_rows(
    cfg: &ExperimentConfig,
    drift: &DriftSpec,
    slope_oracle: Option<f64>,
) -> Result<Vec<ResultRow>> {
    let levels = cfg.levels();
    let samples = map_paths(cfg.master_seed, cfg.n_paths, |_, seed| {
        let p = drifted_bm(seed, cfg.level_max, drift)?;
        levels
            .iter()
            .map(|&m| Ok(count(&l_flags(&p, m, cfg.a, cfg.epsilon)?) as f64))
            .collect()
    })?;
    let stats = columns(&samples);
    let plain = *drift == DriftSpec::Zero;
    let mut rows = Rows::new(cfg);
    for (&m, &(mean, se)) in levels.iter().zip(&stats) {
        let oracle = plain.then(|| expected_l_count(m, cfg.a, cfg.epsilon));
        rows.push(Some(m), "mean_count", mean, Some(se), oracle);
    }
    let means: Vec<f64> = stats.iter().map(|s| s.0).collect();
    rows.push_fit("slope", &levels, &means, Correction::SqrtLog, slope_oracle)?;
    if plain {
        let exact: Vec<f64> = levels.iter().map(|&m| expected_l_count(m, cfg.a, cfg.epsilon)).collect();
        rows.push_fit("slope_analytic", &levels, &exact, Correction::SqrtLog, slope_oracle)?;
    }
    Ok(rows.rows)
}

fn orey_taylor(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let drift = cfg.drift_spec()?;
    let oracle = if drift == DriftSpec::Zero {
        dim_fast(cfg.a).ok().map(|d| d.value)
    } else {
        None
    };
    l_count_rows(cfg, &drift, oracle)
}

fn cantor_drift(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let drift = match cfg.drift_spec()? {
        DriftSpec::Zero => DriftSpec::cantor(cfg.gamma, 20)?,
        d => d,
    };
    let oracle = match drift {
        DriftSpec::Cantor { gamma, .. } => dim_fast_cantor_drift(cfg.a, gamma).ok().map(|d| d.value),
        _ => None,
    };
    let mut rows = l_count_rows(cfg, &drift, oracle)?;
    if let DriftSpec::Cantor { gamma, .. } = drift {
        let mut extra = Rows::new(cfg);
        extra.push(None, "dim_cantor", dim_cantor(gamma)?.value, None, None);
        rows.extend(extra.rows);
    }
    Ok(rows)
}

fn loud_drift(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let drift = match cfg.drift_spec()? {
        DriftSpec::Zero => DriftSpec::loud(0.5, 2, 4)?,
        d => d,
    };
    let mut rows = l_count_rows(cfg, &drift, None)?;
    if let DriftSpec::Loud { alpha, a, terms } = drift {
        let mut extra = Rows::new(cfg);
        let level = cfg.level_max.min(12);
        extra.push(Some(level), "holder_coefficient", holder_coefficient(&drift, alpha, level)?, None, None);
        extra.push(None, "sup_bound", crate::drift::loud_sup_bound(alpha, a, terms), None, None);
        rows.extend(extra.rows);
    }
    Ok(rows)
}

/// Near-zero constant `max{2c0, 2√2}` with `c0` the drift's grid
/// 1/2-Hölder coefficient.
fn zero_constant(drift: &DriftSpec, level: u32) -> Result<f64> {
    let c0 = match drift {
        DriftSpec::Zero => 0.0,
        f => holder_coefficient(f, 0.5, level.min(12))?,
    };
    Ok(default_zero_constant(c0))
}

fn intersection_flags(p: &SamplePath, m: u32, a: f64, c: f64) -> Result<(IntervalFlags, IntervalFlags)> {
    let z = zero_near_flags(p, m, c)?;
    let i = intersect_flags(&sup_flags(p, m, a)?, &z)?;
    Ok((z, i))
}

fn zero_intersection(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let drift = cfg.drift_spec()?;
    let levels = cfg.levels();
    let path_level = cfg.level_max + 3;
    let c = zero_constant(&drift, path_level)?;
    let samples = map_paths(cfg.master_seed, cfg.n_paths, |_, seed| {
        let p = drifted_bm(seed, path_level, &drift)?;
        let mut out = Vec::with_capacity(2 * levels.len());
        for &m in &levels {
            let (z, i) = intersection_flags(&p, m, cfg.a, c)?;
            out.push(count(&z) as f64);
            out.push(count(&i) as f64);
        }
        Ok(out)
    })?;
    let stats = columns(&samples);
    let plain = drift == DriftSpec::Zero;
    let mut rows = Rows::new(cfg);
    for (j, &m) in levels.iter().enumerate() {
        let (zm, zs) = stats[2 * j];
        let (im, is) = stats[2 * j + 1];
        rows.push(Some(m), "mean_zero_count", zm, Some(zs), plain.then(|| expected_zero_count(m, c)));
        rows.push(Some(m), "mean_intersect_count", im, Some(is), None);
    }
    let zero: Vec<f64> = (0..levels.len()).map(|j| stats[2 * j].0).collect();
    let inter: Vec<f64> = (0..levels.len()).map(|j| stats[2 * j + 1].0).collect();
    rows.push_fit("slope_zero", &levels, &zero, Correction::SqrtLog, plain.then_some(0.5))?;
    let oracle = if plain { dim_fast_zero(cfg.a).ok().map(|d| d.value) } else { None };
    rows.push_fit("slope_intersect", &levels, &inter, Correction::None, oracle)?;
    Ok(rows.rows)
}

fn fbm(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let hurst = cfg.hurst.unwrap_or(0.7);
    let drift = cfg.drift_spec()?;
    let levels = cfg.levels();
    let gen = FbmGenerator::new(hurst, cfg.level_max)?;
    let opts = LOptions { theta: 1.0, hurst };
    let samples = map_paths(cfg.master_seed, cfg.n_paths, |_, seed| {
        let mut p = gen.sample(seed)?;
        if drift != DriftSpec::Zero {
            p = apply_drift(&p, &drift)?;
        }
        let v = p.values();
        let mut out = Vec::with_capacity(2 * levels.len());
        for &m in &levels {
            let stride = 1usize << (cfg.level_max - m);
            let n = 1usize << m;
            let var = (0..n).map(|k| (v[(k + 1) * stride] - v[k * stride]).powi(2)).sum::<f64>() / n as f64;
            out.push(var);
            out.push(count(&l_flags_with(&p, m, cfg.a, cfg.epsilon, opts)?) as f64);
        }
        Ok(out)
    })?;
    let stats = columns(&samples);
    let plain = drift == DriftSpec::Zero;
    let mut rows = Rows::new(cfg);
    for (j, &m) in levels.iter().enumerate() {
        let (vm, vs) = stats[2 * j];
        let (cm, cs) = stats[2 * j + 1];
        let var_oracle = (-2.0 * hurst * m as f64).exp2();
        rows.push(Some(m), "incr_var", vm, Some(vs), plain.then_some(var_oracle));
        rows.push(Some(m), "mean_count", cm, Some(cs), plain.then(|| expected_l_count(m, cfg.a, cfg.epsilon)));
    }
    let vars: Vec<f64> = (0..levels.len()).map(|j| stats[2 * j].0).collect();
    if levels.len() >= 3 {
        let fit = fit_exponent(&levels, &vars, Correction::None)?;
        rows.push(None, "var_slope", -fit.slope, Some(fit.stderr), plain.then_some(2.0 * hurst));
    }
    let counts: Vec<f64> = (0..levels.len()).map(|j| stats[2 * j + 1].0).collect();
    let oracle = if plain { dim_fast(cfg.a).ok().map(|d| d.value) } else { None };
    rows.push_fit("slope", &levels, &counts, Correction::SqrtLog, oracle)?;
    Ok(rows.rows)
}

fn holder_sandwich(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let drift = match cfg.drift_spec()? {
        DriftSpec::Zero => DriftSpec::cantor(0.25, 20)?,
        d => d,
    };
    let level = cfg.level_max;
    if level > MAX_HOLDER_LEVEL {
        return Err(Error::Config(format!(
            "holder-sandwich scans the drift on the path grid; level {level} exceeds {MAX_HOLDER_LEVEL}"
        )));
    }
    // Scanning the whole horizon covers windows that stick out past t = 1.
    let c0 = holder_coefficient_of_values(&drift.tabulate(level, grid_len(level)), level, 0.5);
    let levels = cfg.levels();
    let samples = map_paths(cfg.master_seed, cfg.n_paths, |_, seed| {
        let b = sample_bm(seed, level)?;
        let x = apply_drift(&b, &drift)?;
        let mut out = Vec::with_capacity(4 * levels.len());
        for &m in &levels {
            let delta = holder_sandwich_delta(c0, l_window(m));
            let fx = l_flags(&x, m, cfg.a, cfg.epsilon)?;
            let inner = l_flags(&b, m, cfg.a + delta, cfg.epsilon)?;
            let outer = l_flags(&b, m, cfg.a - delta, cfg.epsilon)?;
            let bad = inner.ones_indices().filter(|&k| !fx.get(k)).count()
                + fx.ones_indices().filter(|&k| !outer.get(k)).count();
            out.extend([bad as f64, count(&fx) as f64, count(&inner) as f64, count(&outer) as f64]);
        }
        Ok(out)
    })?;
    let stats = columns(&samples);
    let mut rows = Rows::new(cfg);
    rows.push(Some(level), "holder_c0", c0, None, None);
    for (j, &m) in levels.iter().enumerate() {
        let total: f64 = samples.iter().map(|s| s[4 * j]).sum();
        rows.push(Some(m), "delta", holder_sandwich_delta(c0, l_window(m)), None, None);
        rows.push(Some(m), "violations", total, None, Some(0.0));
        rows.push(Some(m), "mean_count_x", stats[4 * j + 1].0, Some(stats[4 * j + 1].1), None);
        rows.push(Some(m), "mean_count_b_inner", stats[4 * j + 2].0, Some(stats[4 * j + 2].1), None);
        rows.push(Some(m), "mean_count_b_outer", stats[4 * j + 3].0, Some(stats[4 * j + 3].1), None);
    }
    Ok(rows.rows)
}

fn covering(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let drift = cfg.drift_spec()?;
    let levels = cfg.levels();
    let path_level = cfg.level_max + 3;
    let c = zero_constant(&drift, path_level)?;
    let per_path = map_paths(cfg.master_seed, cfg.n_paths, |_, seed| {
        let p = drifted_bm(seed, path_level, &drift)?;
        levels
            .iter()
            .map(|&m| Ok(intersection_flags(&p, m, cfg.a, c)?.1))
            .collect::<Result<Vec<_>>>()
    })?;
    let n = cfg.n_paths as f64;
    let freqs: Vec<LevelFrequencies> = levels
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let mut hits = vec![0u32; 1 << m];
            for flags in &per_path {
                for k in flags[j].ones_indices() {
                    hits[k] += 1;
                }
            }
            LevelFrequencies {
                level: m,
                freqs: hits.into_iter().map(|h| h as f64 / n).collect(),
            }
        })
        .collect();
    let mut rows = Rows::new(cfg);
    for (m, term) in covering_terms(&freqs, cfg.gamma_exp) {
        rows.push(Some(m), "covering_term", term, None, None);
    }
    for &i in &levels {
        rows.push(Some(i), "covering_sum", covering_sum(&freqs, cfg.gamma_exp, i), None, None);
    }
    Ok(rows.rows)
}

fn jlab(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let drift = cfg.drift_spec()?;
    let desc = cfg
        .measure
        .clone()
        .unwrap_or_else(|| format!("cantor:gamma={},n=6", cfg.gamma));
    let mu = parse_measure(&desc)?;
    let path_level = cfg.level_max + 4;
    let mut rows = Rows::new(cfg);
    for m in cfg.levels() {
        let h = (-(m as f64)).exp2();
        let est = j_mu_estimate(cfg.master_seed, cfg.n_paths, path_level, &mu, h, cfg.a, &drift)?;
        let pz = paley_zygmund_check(&est);
        let p = phi(h, cfg.a)?;
        let lvl = Some(m);
        rows.push(lvl, "sign_mass", select_sign_set(&drift, h, &mu).selected_mass(), None, None);
        rows.push(lvl, "ej", est.ej, Some(est.stderr_ej), Some(expected_j(&mu, path_level, h, cfg.a, &drift)?));
        rows.push(lvl, "ej2", est.ej2, None, None);
        rows.push(lvl, "p_positive", est.p_positive, Some(est.stderr_p_positive), None);
        rows.push(lvl, "pz_lower", est.pz_lower, Some(est.stderr_pz), None);
        rows.push(lvl, "pz_margin", pz.margin, Some(pz.stderr), None);
        rows.push(lvl, "ej_over_h_phi", est.ej / (h * p), Some(est.stderr_ej / (h * p)), None);
    }
    Ok(rows.rows)
}

fn limsup(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let (m, n) = (cfg.level_min, cfg.level_max);
    let rep = variance_report(cfg.master_seed, cfg.n_paths, m, n, cfg.a, cfg.epsilon)?;
    let mut rows = Rows::new(cfg);
    let lvl = Some(n);
    rows.push(lvl, "p_n", rep.pooled.p_n_hat, None, Some(rep.pooled.p_n_analytic));
    rows.push(lvl, "mean_m_n", rep.mean_hat, Some(rep.mean_stderr), Some(rep.mean_oracle));
    rows.push(lvl, "var_m_n", rep.pooled.var_hat, Some(rep.var_stderr), Some(rep.pooled.var_bound));
    if let Some(r) = rep.ratio {
        rows.push(lvl, "var_ratio", r, None, None);
    }
    let path = sample_bm(derive_seed(cfg.master_seed, 0), n)?;
    let c1 = modulus_coefficient(&path, (-(n as f64)).exp2())?;
    rows.push(lvl, "modulus_c1", c1, None, None);
    for level in m..=n {
        let ok = absorption_holds(level, cfg.a, cfg.epsilon, c1);
        rows.push(Some(level), "absorption_holds", ok as u8 as f64, None, None);
    }
    Ok(rows.rows)
}

fn dims(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Rows::new(cfg);
    rows.n_paths = 0;
    if let Ok(d) = dim_fast(cfg.a) {
        rows.push(None, "dim_fast", d.value, None, None);
    }
    if let Ok(d) = dim_fast_zero(cfg.a) {
        rows.push(None, "dim_fast_zero", d.value, None, None);
    }
    if let Ok(d) = dim_cantor(cfg.gamma) {
        rows.push(None, "dim_cantor", d.value, None, None);
    }
    if let Ok(d) = dim_fast_cantor_drift(cfg.a, cfg.gamma) {
        rows.push(None, "dim_fast_cantor_drift", d.value, None, None);
    }
    match dim_fbm_cantor_drift(cfg.a.min(1.0), cfg.alpha, cfg.hurst.unwrap_or(0.7)) {
        Ok(FbmCantorDim::Value(d)) => rows.push(None, "dim_fbm_cantor_drift", d.value, None, None),
        Ok(FbmCantorDim::ConditionViolated { bound, .. }) => {
            rows.push(None, "fbm_cantor_condition_violated_bound", bound, None, None)
        }
        Err(_) => {}
    }
    Ok(rows.rows)
}
