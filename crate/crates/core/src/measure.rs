//! Discrete stand-ins for Frostman measures and the functionals evaluated on
//! them: the regularity constant `A_η`, the singular integrals `S_h` and
//! `S̃_h`, energies, and the fast-time/zero-set functional `J_μ(h, a)` with
//! its Paley–Zygmund check.
//!
//! Supremum-type functionals are maxima over finite candidate sets and hence
//! lower bounds at the measure's resolution.

use std::path::Path;

use rayon::prelude::*;

use crate::drift::{sign_set_indicator, DriftSpec, SignSet};
use crate::error::{Error, Result};
use crate::gaussian::{gaussian_tail_q, phi};
use crate::path::sample_bm;
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<(f64, f64)>,
    label: String,
    /// Length of the cell each atom stands for.
    resolution: f64,
    prefix: Vec<f64>,
}

impl DiscreteMeasure {
    /// Atoms must have strictly increasing positions in `[0, 1]`, positive
    /// weights, and total mass 1 within `1e-12`.
    pub fn new(atoms: Vec<(f64, f64)>, label: impl Into<String>, resolution: f64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::DegenerateMeasure("measure has no atoms".into()));
        }
        for &(t, w) in &atoms {
            if !(0.0..=1.0).contains(&t) || !(w > 0.0) || !w.is_finite() {
                return Err(Error::DegenerateMeasure(format!("bad atom ({t}, {w})")));
            }
        }
        for pair in atoms.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::DegenerateMeasure(format!(
                    "atom positions not strictly increasing at {}",
                    pair[1].0
                )));
            }
        }
        let mut prefix = Vec::with_capacity(atoms.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &(_, w) in &atoms {
            acc += w;
            prefix.push(acc);
        }
        if (acc - 1.0).abs() > 1e-12 {
            return Err(Error::DegenerateMeasure(format!("total mass {acc} is not 1")));
        }
        if !(resolution > 0.0) {
            return Err(Error::DegenerateMeasure(format!("resolution {resolution} must be positive")));
        }
        Ok(Self {
            atoms,
            label: label.into(),
            resolution,
            prefix,
        })
    }

    /// Rescales positive weights to unit mass first.
    pub fn normalized(atoms: Vec<(f64, f64)>, label: impl Into<String>, resolution: f64) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if !(total > 0.0) {
            return Err(Error::DegenerateMeasure("no positive mass".into()));
        }
        Self::new(
            atoms.into_iter().map(|(t, w)| (t, w / total)).collect(),
            label,
            resolution,
        )
    }

    /// Unit mass at `t`.
    pub fn point_mass(t: f64) -> Result<Self> {
        Self::new(vec![(t, 1.0)], format!("point({t})"), 1.0)
    }

    /// Lebesgue proxy: weight `2^-level` at each cell midpoint `(k+½)·2^-level`.
    pub fn uniform_grid(level: u32) -> Result<Self> {
        if level > 24 {
            return Err(Error::Range(format!("uniform grid level {level} exceeds 24")));
        }
        let n = 1usize << level;
        let step = 1.0 / n as f64;
        Self::new(
            (0..n).map(|k| ((k as f64 + 0.5) * step, step)).collect(),
            format!("uniform({level})"),
            step,
        )
    }

    /// Reads two-column `t w` text. The resolution is the smallest gap
    /// between atoms (1 for a single atom).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let (ts, ws) = crate::textio::parse_two_columns(&text)?;
        let resolution = ts
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(1.0f64, f64::min);
        Self::normalized(
            ts.into_iter().zip(ws).collect(),
            path.display().to_string(),
            resolution,
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, crate::textio::format_two_columns("t w", &self.atoms))?;
        Ok(())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `μ[lo, hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        let i = self.atoms.partition_point(|a| a.0 < lo);
        let j = self.atoms.partition_point(|a| a.0 <= hi);
        if j > i {
            self.prefix[j] - self.prefix[i]
        } else {
            0.0
        }
    }

    /// `μ(A ∩ ·)/μ(A)` for `A = {t : keep(t)}`.
    pub fn conditioned(&self, keep: impl Fn(f64) -> bool) -> Result<Self> {
        let atoms: Vec<_> = self.atoms.iter().copied().filter(|a| keep(a.0)).collect();
        if atoms.is_empty() {
            return Err(Error::DegenerateMeasure("conditioning set has zero mass".into()));
        }
        Self::normalized(atoms, format!("{}|cond", self.label), self.resolution)
    }
}

/// Natural measure of the generation-`n` Cantor set: weight `2^-n` at each
/// component midpoint.
pub fn cantor_natural_measure(gamma: f64, n: u32) -> Result<DiscreteMeasure> {
    let comps = crate::drift::cantor_components(gamma, n)?;
    let w = (-(n as f64)).exp2();
    let len = gamma.powi(n as i32);
    DiscreteMeasure::new(
        comps.as_slice().iter().map(|&(l, r)| (0.5 * (l + r), w)).collect(),
        format!("cantor(gamma={gamma},n={n})"),
        len,
    )
}

/// Builds a measure from `cantor:gamma=G,n=N`, `uniform:level=L`,
/// `point:t=T`, or a path to a two-column file.
pub fn parse_measure(desc: &str) -> Result<DiscreteMeasure> {
    let desc = desc.trim();
    let Some((name, rest)) = desc.split_once(':') else {
        return DiscreteMeasure::load(Path::new(desc));
    };
    let get = |key: &str| -> Result<&str> {
        rest.split(',')
            .filter_map(|kv| kv.split_once('='))
            .find(|(k, _)| k.trim() == key)
            .map(|(_, v)| v.trim())
            .ok_or_else(|| Error::Usage(format!("measure `{desc}` needs {key}=")))
    };
    let bad = |key: &str| Error::Usage(format!("bad {key} in measure `{desc}`"));
    match name {
        "cantor" => {
            let g: f64 = get("gamma")?.parse().map_err(|_| bad("gamma"))?;
            let n: u32 = get("n")?.parse().map_err(|_| bad("n"))?;
            cantor_natural_measure(g, n)
        }
        "uniform" => DiscreteMeasure::uniform_grid(get("level")?.parse().map_err(|_| bad("level"))?),
        "point" => DiscreteMeasure::point_mass(get("t")?.parse().map_err(|_| bad("t"))?),
        _ => DiscreteMeasure::load(Path::new(desc)),
    }
}

/// Lower bound for `A_η(μ) = sup_{h ≤ 1/2} sup_{t ∈ [h, 1-h]} μ[t-h, t+h]/h^η`.
///
/// Scales are `h = 2^-ℓ` for `ℓ ∈ h_levels` (those above 1/2 are skipped);
/// centres are the level-`t_grid_level` grid points plus the atoms, clamped
/// into `[h, 1-h]`.
pub fn a_eta(mu: &DiscreteMeasure, eta: f64, h_levels: &[u32], t_grid_level: u32) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    let grid = 1usize << t_grid_level;
    let step = 1.0 / grid as f64;
    let mut best = 0.0f64;
    for &l in h_levels {
        let h = (-(l as f64)).exp2();
        if h > 0.5 {
            continue;
        }
        let scale = h.powf(-eta);
        let mut eval = |t: f64| {
            let t = t.clamp(h, 1.0 - h);
            best = best.max(mu.mass_in(t - h, t + h) * scale);
        };
        for k in 0..=grid {
            eval(k as f64 * step);
        }
        for &(t, _) in mu.atoms() {
            eval(t);
        }
    }
    Ok(best)
}

fn singular_sup(mu: &DiscreteMeasure, candidates: &[f64], upper: impl Fn(f64) -> f64) -> f64 {
    let atoms = mu.atoms();
    let mut best = 0.0f64;
    for &s in candidates {
        let hi = upper(s);
        let start = atoms.partition_point(|a| a.0 <= s);
        let mut sum = 0.0;
        for &(t, w) in &atoms[start..] {
            if t > hi {
                break;
            }
            sum += w / (t - s).sqrt();
        }
        best = best.max(sum);
    }
    best
}

/// Offset below an atom at which `s` candidates are placed: half a cell.
fn candidate_offset(mu: &DiscreteMeasure) -> f64 {
    0.5 * mu.resolution()
}

/// `S_h(μ) = sup_{0 ≤ s ≤ h} ∫_{(s, h]} (t-s)^{-1/2} dμ(t)`, with `s` ranging
/// over `0` and the points half a cell below each atom.
pub fn s_h(mu: &DiscreteMeasure, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::Domain(format!("S_h needs 0 < h ≤ 1, got {h}")));
    }
    let eps = candidate_offset(mu);
    let mut cands = vec![0.0];
    cands.extend(
        mu.atoms()
            .iter()
            .map(|a| a.0 - eps)
            .filter(|&s| s > 0.0 && s <= h),
    );
    Ok(singular_sup(mu, &cands, |_| h))
}

/// `S̃_h(μ) = sup_{0 ≤ s ≤ 1} ∫_{(s, (s+h) ∧ 1]} (t-s)^{-1/2} dμ(t)`.
pub fn s_tilde_h(mu: &DiscreteMeasure, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::Domain(format!("S~_h needs 0 < h ≤ 1, got {h}")));
    }
    let eps = candidate_offset(mu);
    let mut cands = vec![0.0];
    cands.extend(
        mu.atoms()
            .iter()
            .map(|a| a.0 - eps)
            .filter(|&s| s > 0.0 && s <= 1.0),
    );
    Ok(singular_sup(mu, &cands, |s| (s + h).min(1.0)))
}

/// Right-hand side `2e^η/(2η-1)·A_η·h^{η-1/2}` of the bound on `S_h` and `S̃_h`.
pub fn singular_integral_bound(eta: f64, a_eta: f64, h: f64) -> f64 {
    2.0 * eta.exp() / (2.0 * eta - 1.0) * a_eta * h.powf(eta - 0.5)
}

/// `Σ_{i≠j} w_i w_j |t_i - t_j|^{-e}`.
pub fn energy(mu: &DiscreteMeasure, e: f64) -> Result<f64> {
    if !(e >= 0.0) {
        return Err(Error::Domain(format!("energy exponent must be ≥ 0, got {e}")));
    }
    let atoms = mu.atoms();
    let mut total = 0.0;
    for (i, &(ti, wi)) in atoms.iter().enumerate() {
        let mut row = 0.0;
        for &(tj, wj) in &atoms[i + 1..] {
            let d = tj - ti;
            if d <= 0.0 {
                return Err(Error::DegenerateMeasure(format!("coincident atoms at {ti}")));
            }
            row += wj * d.powf(-e);
        }
        total += 2.0 * wi * row;
    }
    if !total.is_finite() {
        return Err(Error::DegenerateMeasure("energy is not finite".into()));
    }
    Ok(total)
}

/// Which sign set carries the fast-increment event in `J_μ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignChoice {
    /// `S⁻`: look for large positive Brownian increments.
    Minus,
    /// `S⁺`: look for large negative Brownian increments.
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignSelection {
    pub choice: SignChoice,
    pub mass_minus: f64,
    pub mass_plus: f64,
}

impl SignSelection {
    /// `μ(S°(h))`.
    pub fn selected_mass(&self) -> f64 {
        match self.choice {
            SignChoice::Minus => self.mass_minus,
            SignChoice::Plus => self.mass_plus,
        }
    }
}

/// Chooses `S⁻(h)` when `μ(S⁻) ≥ μ(S⁺)`, else `S⁺(h)`.
pub fn select_sign_set(f: &DriftSpec, h: f64, mu: &DiscreteMeasure) -> SignSelection {
    let mut minus = 0.0;
    let mut plus = 0.0;
    for &(t, w) in mu.atoms() {
        match sign_set_indicator(f, h, t) {
            SignSet::Plus => plus += w,
            SignSet::Minus => minus += w,
            SignSet::Both => {
                plus += w;
                minus += w;
            }
        }
    }
    SignSelection {
        choice: if minus >= plus { SignChoice::Minus } else { SignChoice::Plus },
        mass_minus: minus,
        mass_plus: plus,
    }
}

/// Ensemble statistics of `J_μ(h, a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JEstimate {
    pub ej: f64,
    pub ej2: f64,
    pub p_positive: f64,
    pub pz_lower: f64,
    pub n_paths: usize,
    pub stderr_ej: f64,
    pub stderr_p_positive: f64,
    /// Delta-method standard error of `pz_lower`.
    pub stderr_pz: f64,
}

impl JEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let m = |p: i32| samples.iter().map(|x| x.powi(p)).sum::<f64>() / n;
        let (m1, m2, m3, m4) = (m(1), m(2), m(3), m(4));
        let p = samples.iter().filter(|&&x| x > 0.0).count() as f64 / n;
        let var1 = (m2 - m1 * m1).max(0.0);
        let var2 = (m4 - m2 * m2).max(0.0);
        let cov12 = m3 - m1 * m2;
        let (pz, se_pz) = if m2 > 0.0 {
            let g1 = 2.0 * m1 / m2;
            let g2 = -m1 * m1 / (m2 * m2);
            let v = g1 * g1 * var1 + g2 * g2 * var2 + 2.0 * g1 * g2 * cov12;
            (m1 * m1 / m2, (v.max(0.0) / n).sqrt())
        } else {
            (0.0, 0.0)
        };
        let unbiased = if n > 1.0 { var1 * n / (n - 1.0) } else { 0.0 };
        Self {
            ej: m1,
            ej2: m2,
            p_positive: p,
            pz_lower: pz,
            n_paths: samples.len(),
            stderr_ej: (unbiased / n).sqrt(),
            stderr_p_positive: (p * (1.0 - p) / n).sqrt(),
            stderr_pz: se_pz,
        }
    }
}

/// Atom positions snapped to the level-`level` grid, as grid indices.
fn snap_atoms(mu: &DiscreteMeasure, level: u32, tolerance: f64) -> Result<Vec<(usize, f64)>> {
    let scale = (level as f64).exp2();
    mu.atoms()
        .iter()
        .map(|&(t, w)| {
            let k = (t * scale).round();
            if (k / scale - t).abs() >= tolerance {
                return Err(Error::Resolution(format!(
                    "atom {t} moves by ≥ {tolerance} when snapped to level {level}"
                )));
            }
            Ok((k as usize, w))
        })
        .collect()
}

struct JSetup {
    atoms: Vec<(usize, f64)>,
    drift_at_atoms: Vec<f64>,
    h: f64,
    h_steps: usize,
    threshold: f64,
    choice: SignChoice,
}

fn j_setup(mu: &DiscreteMeasure, level: u32, h: f64, a: f64, f: &DriftSpec) -> Result<JSetup> {
    let step = (-(level as f64)).exp2();
    if !(h >= step) || h >= 1.0 {
        return Err(Error::Resolution(format!(
            "h = {h} must lie in [2^-{level}, 1)"
        )));
    }
    let h_steps = (h / step).round() as usize;
    let h_grid = h_steps as f64 * step;
    if (h_grid - h).abs() >= h / 8.0 {
        return Err(Error::Resolution(format!("h = {h} is not representable at level {level}")));
    }
    let atoms = snap_atoms(mu, level, h / 8.0)?;
    let drift_at_atoms = atoms.iter().map(|&(k, _)| f.eval(k as f64 * step)).collect();
    Ok(JSetup {
        atoms,
        drift_at_atoms,
        h: h_grid,
        h_steps,
        threshold: a * (2.0 * h_grid * (1.0 / h_grid).ln()).sqrt(),
        choice: select_sign_set(f, h, mu).choice,
    })
}

impl JSetup {
    fn evaluate(&self, values: &[f64]) -> f64 {
        let mut j = 0.0;
        for (&(k, w), &fk) in self.atoms.iter().zip(&self.drift_at_atoms) {
            if (values[k] - fk).abs() >= self.h {
                continue;
            }
            let inc = values[k + self.h_steps] - values[k];
            let fast = match self.choice {
                SignChoice::Minus => inc > self.threshold,
                SignChoice::Plus => inc < -self.threshold,
            };
            if fast {
                j += w;
            }
        }
        j
    }
}

/// Samples of `J_μ(h, a)` on `n_paths` Brownian paths of level `level`.
pub fn j_mu_samples(
    master_seed: u64,
    n_paths: usize,
    level: u32,
    mu: &DiscreteMeasure,
    h: f64,
    a: f64,
    f: &DriftSpec,
) -> Result<Vec<f64>> {
    let setup = j_setup(mu, level, h, a, f)?;
    (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let path = sample_bm(derive_seed(master_seed, i as u64), level)?;
            Ok(setup.evaluate(path.values()))
        })
        .collect()
}

/// Monte Carlo estimate of `E J`, `E J²`, `P(J > 0)` and the Paley–Zygmund
/// ratio for
/// `J = Σ_i w_i·1{|B(s_i) - f(s_i)| < h}·1{K_a(s_i, h)}`,
/// where `K_a` asks for an increment beyond `±a·sqrt(2h ln(1/h))` in the
/// direction chosen by [`select_sign_set`].
pub fn j_mu_estimate(
    master_seed: u64,
    n_paths: usize,
    level: u32,
    mu: &DiscreteMeasure,
    h: f64,
    a: f64,
    f: &DriftSpec,
) -> Result<JEstimate> {
    if n_paths < 100 {
        return Err(Error::Config(format!("J estimate needs ≥ 100 paths, got {n_paths}")));
    }
    let samples = j_mu_samples(master_seed, n_paths, level, mu, h, a, f)?;
    Ok(JEstimate::from_samples(&samples))
}

/// Exact `E J_μ(h, a)` for the grid-snapped atoms:
/// `Φ(h, a)·Σ_i w_i·P(|B(s_i) - f(s_i)| < h)`.
pub fn expected_j(mu: &DiscreteMeasure, level: u32, h: f64, a: f64, f: &DriftSpec) -> Result<f64> {
    let setup = j_setup(mu, level, h, a, f)?;
    let step = (-(level as f64)).exp2();
    let p_fast = phi(setup.h, a)?;
    let near: f64 = setup
        .atoms
        .iter()
        .zip(&setup.drift_at_atoms)
        .map(|(&(k, w), &fk)| {
            let s = k as f64 * step;
            let p = if s == 0.0 {
                if fk.abs() < setup.h { 1.0 } else { 0.0 }
            } else {
                let sd = s.sqrt();
                gaussian_tail_q((fk - setup.h) / sd) - gaussian_tail_q((fk + setup.h) / sd)
            };
            w * p
        })
        .sum();
    Ok(p_fast * near)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PzReport {
    /// `P(J > 0) - (E J)²/E J²`.
    pub margin: f64,
    pub stderr: f64,
    /// Margin is at least `-3·stderr`.
    pub holds: bool,
    /// `E J² = 0`: nothing to compare.
    pub inconclusive: bool,
}

pub fn paley_zygmund_check(est: &JEstimate) -> PzReport {
    if !(est.ej2 > 0.0) {
        return PzReport {
            margin: 0.0,
            stderr: 0.0,
            holds: true,
            inconclusive: true,
        };
    }
    let margin = est.p_positive - est.pz_lower;
    let stderr = (est.stderr_p_positive.powi(2) + est.stderr_pz.powi(2)).sqrt();
    PzReport {
        margin,
        stderr,
        holds: margin >= -3.0 * stderr,
        inconclusive: false,
    }
}
