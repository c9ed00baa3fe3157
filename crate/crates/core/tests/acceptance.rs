//! Acceptance suite. Runs every criterion, prints one line per check and
//! exits non-zero if any check fails.

use std::time::Instant;

use fastpoints::detector::{count, expected_l_count, l_flags, zero_near_flags};
use fastpoints::drift::{cantor_components, reverse_holder_witness, DriftSpec};
use fastpoints::ensemble::{map_paths, mean_stderr};
use fastpoints::gaussian::{gaussian_tail_integral, mills_lower, mills_upper};
use fastpoints::harness::{self, ExperimentConfig, Preset, ResultRow};
use fastpoints::limsup::{dimension_condition, variance_report, Verdict};
use fastpoints::measure::{
    a_eta, cantor_natural_measure, expected_j, j_mu_estimate, paley_zygmund_check, s_h, s_tilde_h,
    select_sign_set, singular_integral_bound, DiscreteMeasure,
};
use fastpoints::path::sample_bm;
use fastpoints::rng::CounterRng;
use fastpoints::scaling::{dim_fast_cantor_drift, fit_exponent, Correction};

const SEED: u64 = 0x5eed_2024;

struct Suite {
    failed: Vec<String>,
}

impl Suite {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        println!("[{}] {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id.to_string());
        }
    }
}

fn config(preset: Preset, paths: usize, levels: (u32, u32), a: f64) -> ExperimentConfig {
    ExperimentConfig {
        preset,
        master_seed: SEED,
        n_paths: paths,
        level_min: levels.0,
        level_max: levels.1,
        a,
        ..ExperimentConfig::default()
    }
}

fn stat<'a>(rows: &'a [ResultRow], stat: &str) -> &'a ResultRow {
    rows.iter().find(|r| r.stat == stat).unwrap_or_else(|| panic!("no `{stat}` row"))
}

fn c1_oracle_equivalence(s: &mut Suite) {
    let levels = [8u32, 10, 12];
    let avals = [0.3, 0.5, 0.7];
    let counts = map_paths(SEED, 500, |_, seed| {
        let p = sample_bm(seed, 12)?;
        let mut out = Vec::new();
        for &a in &avals {
            for &m in &levels {
                out.push(count(&l_flags(&p, m, a, 0.0)?) as f64);
            }
        }
        Ok(out)
    })
    .unwrap();
    let mut worst = 0.0f64;
    let mut all = true;
    for (i, &a) in avals.iter().enumerate() {
        for (j, &m) in levels.iter().enumerate() {
            let col: Vec<f64> = counts.iter().map(|c| c[i * levels.len() + j]).collect();
            let (mean, se) = mean_stderr(&col);
            let z = (mean - expected_l_count(m, a, 0.0)) / se;
            worst = worst.max(z.abs());
            all &= z.abs() <= 3.0;
        }
    }
    s.check("C1 oracle equivalence", all, format!("9 (a, m) cells, worst |z| = {worst:.2}"));
}

fn c2_orey_taylor(s: &mut Suite) {
    let rows = harness::run(&config(Preset::OreyTaylor, 500, (10, 18), 0.5)).unwrap();
    let fit = stat(&rows, "slope");
    s.check(
        "C2 Orey-Taylor empirical slope",
        (0.63..=0.87).contains(&fit.value),
        format!("slope {:.4} ± {:.4}, bracket [0.63, 0.87]", fit.value, fit.stderr.unwrap()),
    );
    let exact = stat(&rows, "slope_analytic");
    s.check(
        "C2 Orey-Taylor analytic slope",
        (0.70..=0.78).contains(&exact.value),
        format!("slope {:.4}, bracket [0.70, 0.78]", exact.value),
    );
}

fn c3_zero_set(s: &mut Suite) {
    let levels: Vec<u32> = (10..=18).collect();
    let c = fastpoints::detector::default_zero_constant(0.0);
    let counts: Vec<Vec<f64>> = map_paths(SEED, 500, |_, seed| {
        let p = sample_bm(seed, 18)?;
        levels.iter().map(|&m| Ok(count(&zero_near_flags(&p, m, c)?) as f64)).collect()
    })
    .unwrap();
    let means: Vec<f64> = (0..levels.len())
        .map(|j| counts.iter().map(|c| c[j]).sum::<f64>() / counts.len() as f64)
        .collect();
    let fit = fit_exponent(&levels, &means, Correction::SqrtLog).unwrap();
    s.check(
        "C3 zero-set slope",
        (0.40..=0.60).contains(&fit.slope),
        format!("slope {:.4} ± {:.4}, bracket [0.40, 0.60]", fit.slope, fit.stderr),
    );
}

fn c4_intersection(s: &mut Suite) {
    let rows = harness::run(&config(Preset::ZeroIntersection, 500, (10, 16), 0.4)).unwrap();
    let fit = stat(&rows, "slope_intersect");
    s.check(
        "C4 intersection slope a=0.4",
        (0.22..=0.46).contains(&fit.value),
        format!("slope {:.4} ± {:.4}, bracket [0.22, 0.46]", fit.value, fit.stderr.unwrap()),
    );
    let rows = harness::run(&config(Preset::ZeroIntersection, 500, (14, 16), 0.9)).unwrap();
    let deep = rows
        .iter()
        .find(|r| r.stat == "mean_intersect_count" && r.level == Some(16))
        .unwrap();
    s.check(
        "C4 intersection degenerate a=0.9",
        deep.value < 1.0,
        format!("mean count at level 16 = {:.4} ± {:.4}", deep.value, deep.stderr.unwrap()),
    );
}

fn c5_holder_sandwich(s: &mut Suite) {
    let mut total = 0.0;
    let mut cells = 0;
    for drift in ["cantor:gamma=0.25,depth=20", "linear:c=0.5"] {
        for a in [0.3, 0.5, 0.8] {
            let mut cfg = config(Preset::HolderSandwich, 100, (8, 14), a);
            cfg.drift = drift.into();
            let rows = harness::run(&cfg).unwrap();
            for r in rows.iter().filter(|r| r.stat == "violations") {
                total += r.value;
                cells += 1;
            }
        }
    }
    s.check(
        "C5 Hölder sandwich",
        total == 0.0 && cells == 42,
        format!("{total} violations over {cells} (drift, a, level) cells x 100 paths"),
    );
}

fn c6_cantor_witness(s: &mut Suite) {
    let gamma: f64 = 1.0 / 9.0;
    let gamma1: f64 = 0.15;
    let beta = gamma1.ln() / (2.0 * gamma.ln());
    let c = gamma1.sqrt();
    let f = DriftSpec::cantor(gamma, 30).unwrap();
    let comps = cantor_components(gamma, 6).unwrap();
    let scale = 2f64.powi(40);
    let mut missing = 0;
    let mut tested = 0;
    for &(left, _) in comps.as_slice() {
        // Grid point at or just left of the component, i.e. in the flat gap.
        let t = (left * scale).floor() / scale;
        for l in 1..=8 {
            let h_max = gamma.powi(l);
            // Fine enough for the scale and for the room left before t = 1.
            let grid = (-(gamma.powi(l + 1)).log2()).max(-(1.0 - t).log2()).ceil() as u32 + 4;
            tested += 1;
            if reverse_holder_witness(&f, beta, c, t, h_max, grid).unwrap().is_none() {
                missing += 1;
            }
        }
    }
    s.check(
        "C6 Cantor reverse-Hölder witness",
        missing == 0 && tested == 64 * 8,
        format!("{missing} of {tested} (t, ℓ) pairs without witness, beta = {beta:.4}, c = {c:.4}"),
    );
    let d = dim_fast_cantor_drift(0.95, gamma).unwrap().value;
    s.check(
        "C6 dim_fast_cantor_drift(0.95, 1/9)",
        (d - 0.31547).abs() < 1e-5,
        format!("{d:.6}"),
    );
}

fn c7_measure_inequalities(s: &mut Suite) {
    let mut bad = 0;
    let mut n = 0;
    for i in 0..=118 {
        let x = 0.1 + 0.05 * i as f64;
        let q = gaussian_tail_integral(x);
        n += 1;
        if !(mills_lower(x) <= q && q <= mills_upper(x)) {
            bad += 1;
        }
    }
    s.check("C7 Mills sandwich", bad == 0 && n == 119, format!("{bad} violations on {n} grid points"));

    let mut bad = 0;
    let mut n = 0;
    let h_levels: Vec<u32> = (1..=24).collect();
    for (gamma, gen) in [(0.25, 8), (1.0 / 9.0, 6)] {
        let mu = cantor_natural_measure(gamma, gen).unwrap();
        for eta in [0.55, 0.6] {
            let a = a_eta(&mu, eta, &h_levels, 12).unwrap();
            for e in 4..=10 {
                let h = 2f64.powi(-e);
                let bound = singular_integral_bound(eta, a, h);
                for v in [s_h(&mu, h).unwrap(), s_tilde_h(&mu, h).unwrap()] {
                    n += 1;
                    if v > bound {
                        bad += 1;
                    }
                }
            }
        }
    }
    s.check("C7 singular-integral bound", bad == 0, format!("{bad} violations in {n} cases"));

    let rng = CounterRng::new(SEED);
    let mut bad = 0;
    for case in 0..1000u64 {
        let u = |k: u64| rng.uniform_at(case * 16 + k);
        let drift = match case % 4 {
            0 => DriftSpec::linear(8.0 * u(0) - 4.0).unwrap(),
            1 => DriftSpec::cantor(0.05 + 0.4 * u(0), 20).unwrap(),
            2 => DriftSpec::loud(0.3 + 0.4 * u(0), 2, 4).unwrap(),
            _ => DriftSpec::Zero,
        };
        let mu = match case % 3 {
            0 => cantor_natural_measure(0.05 + 0.4 * u(1), 1 + (u(2) * 7.0) as u32).unwrap(),
            1 => DiscreteMeasure::uniform_grid(1 + (u(2) * 9.0) as u32).unwrap(),
            _ => {
                let atoms: Vec<(f64, f64)> = (0..8).map(|k| ((k as f64 + u(3 + k)) / 8.0, u(11) + 0.1)).collect();
                DiscreteMeasure::normalized(atoms, "random", 1.0 / 64.0).unwrap()
            }
        };
        let h = 2f64.powf(-1.0 - 11.0 * u(12));
        // Weights sum to 1 only within 1e-12, and so do the two sign-set masses.
        if select_sign_set(&drift, h, &mu).selected_mass() < 0.5 - 1e-12 {
            bad += 1;
        }
    }
    s.check("C7 sign-set mass ≥ 1/2", bad == 0, format!("{bad} violations in 1000 fuzz cases"));
}

fn c8_j_functional(s: &mut Suite) {
    let mu = DiscreteMeasure::uniform_grid(6).unwrap();
    let zero = DriftSpec::Zero;
    let est = j_mu_estimate(SEED, 2000, 14, &mu, 2f64.powi(-6), 0.0, &zero).unwrap();
    // Frozen closed form 0.5·(1/64)·Σ_k P(|N(0, (k+1/2)/64)| < 2^-6).
    let oracle = 0.011986495220906146;
    let lib = expected_j(&mu, 14, 2f64.powi(-6), 0.0, &zero).unwrap();
    let z = (est.ej - oracle) / est.stderr_ej;
    s.check(
        "C8 E J closed form at a=0",
        z.abs() <= 3.0 && (lib - oracle).abs() < 1e-12,
        format!("E J = {:.6} ± {:.6}, oracle {oracle:.6} (z = {z:.2})", est.ej, est.stderr_ej),
    );

    let cantor = cantor_natural_measure(0.25, 6).unwrap();
    let est = j_mu_estimate(SEED, 2000, 14, &cantor, 2f64.powi(-8), 0.3, &zero).unwrap();
    let pz = paley_zygmund_check(&est);
    s.check(
        "C8 Paley-Zygmund margin",
        !pz.inconclusive && pz.margin >= -3.0 * pz.stderr,
        format!("P(J>0) - (EJ)²/EJ² = {:.5} ± {:.5}", pz.margin, pz.stderr),
    );

    let mut ratios = Vec::new();
    for e in 6..=8 {
        let h = 2f64.powi(-e);
        let est = j_mu_estimate(SEED, 2000, 14, &mu, h, 0.3, &zero).unwrap();
        ratios.push(est.ej / (h * fastpoints::gaussian::phi(h, 0.3).unwrap()));
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max) / ratios.iter().cloned().fold(f64::MAX, f64::min);
    s.check(
        "C8 first-moment shape",
        spread <= 2.0,
        format!("E J/(hΦ) = {ratios:.4?}, max/min = {spread:.3}"),
    );
}

fn c9_limsup(s: &mut Suite) {
    for (m, n) in [(6, 12), (8, 14)] {
        let rep = variance_report(SEED, 500, m, n, 0.5, 0.05).unwrap();
        s.check(
            &format!("C9 E M_n oracle (m={m}, n={n})"),
            rep.mean_agrees(),
            format!("{:.4} ± {:.4} vs {:.4}", rep.mean_hat, rep.mean_stderr, rep.mean_oracle),
        );
        s.check(
            &format!("C9 variance bound (m={m}, n={n})"),
            rep.bound_holds(),
            format!("var {:.4} ± {:.4} vs bound {:.4}", rep.pooled.var_hat, rep.var_stderr, rep.pooled.var_bound),
        );
    }
    let range: Vec<u32> = (20..=400).collect();
    let dec = dimension_condition(0.70, 0.5, 0.01, &range).unwrap().verdict;
    let div = dimension_condition(0.90, 0.5, 0.01, &range).unwrap().verdict;
    s.check(
        "C9 dimension condition verdicts",
        dec == Verdict::DecreasingToZero && div == Verdict::Diverging,
        format!("gamma 0.70: {}, gamma 0.90: {} (n = 20..400)", dec.as_str(), div.as_str()),
    );
}

fn c10_fbm(s: &mut Suite) {
    for (h, target) in [(0.5, 1.0), (0.7, 1.4)] {
        let mut cfg = config(Preset::Fbm, 200, (4, 12), 0.5);
        cfg.hurst = Some(h);
        let rows = harness::run(&cfg).unwrap();
        let v = stat(&rows, "var_slope").value;
        s.check(
            &format!("C10 fBm increment-variance slope H={h}"),
            (v - target).abs() <= 0.05,
            format!("{v:.4}, target {target} ± 0.05"),
        );
    }
    let mut cfg = config(Preset::Fbm, 500, (10, 14), 0.5);
    cfg.hurst = Some(0.5);
    let rows = harness::run(&cfg).unwrap();
    let fit = stat(&rows, "slope");
    s.check(
        "C10 fBm fast-count slope H=0.5",
        (0.63..=0.87).contains(&fit.value),
        format!("slope {:.4} ± {:.4}, bracket [0.63, 0.87]", fit.value, fit.stderr.unwrap()),
    );
}

fn c11_determinism(s: &mut Suite) {
    let mut differing = Vec::new();
    for preset in Preset::ALL {
        let mut cfg = config(preset, 120, (6, 9), 0.4);
        if preset == Preset::LimsupVariance {
            cfg.level_min = 4;
        }
        let run = |workers| {
            let mut c = cfg.clone();
            c.workers = Some(workers);
            harness::to_csv(&harness::run(&c).unwrap())
        };
        let (one, three, again) = (run(1), run(3), run(1));
        if one != three || one != again || one.lines().count() < 2 {
            differing.push(preset.as_str());
        }
    }
    s.check(
        "C11 determinism across worker counts",
        differing.is_empty(),
        format!("{} presets, differing: {differing:?}", Preset::ALL.len()),
    );
}

fn main() {
    let mut suite = Suite { failed: Vec::new() };
    let criteria: [(&str, fn(&mut Suite)); 11] = [
        ("C1", c1_oracle_equivalence),
        ("C2", c2_orey_taylor),
        ("C3", c3_zero_set),
        ("C4", c4_intersection),
        ("C5", c5_holder_sandwich),
        ("C6", c6_cantor_witness),
        ("C7", c7_measure_inequalities),
        ("C8", c8_j_functional),
        ("C9", c9_limsup),
        ("C10", c10_fbm),
        ("C11", c11_determinism),
    ];
    for (id, run) in criteria {
        let start = Instant::now();
        run(&mut suite);
        println!("      {id} took {:.1}s", start.elapsed().as_secs_f64());
    }
    if suite.failed.is_empty() {
        println!("acceptance: all checks passed");
    } else {
        println!("acceptance: {} failed: {}", suite.failed.len(), suite.failed.join(", "));
        std::process::exit(1);
    }
}
