//! Invariants checked over random inputs.

use fastpoints::detector::{
    count, holder_sandwich_delta, intersect_flags, l_flags, l_window, sup_flags, zero_near_flags, FlagKind,
    FlagParams, IntervalFlags,
};
use fastpoints::drift::{holder_coefficient_of_values, DriftSpec};
use fastpoints::limsup::{m_n_counts, m_n_from_flags};
use fastpoints::measure::{cantor_natural_measure, energy, DiscreteMeasure};
use fastpoints::path::{apply_drift, flip_sign, grid_len, modulus_coefficient, refine_bridge, sample_bm};
use fastpoints::scaling::{
    covering_sum, dim_cantor, dim_fast, dim_fast_cantor_drift, fit_exponent, Correction, LevelFrequencies,
};
use fastpoints::textio::{flags_from_rle, flags_to_rle};
use proptest::prelude::*;

fn drift_strategy() -> impl Strategy<Value = DriftSpec> {
    prop_oneof![
        (-3.0..3.0f64).prop_map(|c| DriftSpec::linear(c).unwrap()),
        (0.05..0.45f64).prop_map(|g| DriftSpec::cantor(g, 20).unwrap()),
        (0.1..0.7f64).prop_map(|a| DriftSpec::loud(a, 2, 3).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sample_is_deterministic_and_starts_at_zero(seed in any::<u64>(), level in 1u32..10) {
        let a = sample_bm(seed, level).unwrap();
        let b = sample_bm(seed, level).unwrap();
        prop_assert_eq!(a.values(), b.values());
        prop_assert_eq!(a.values()[0], 0.0);
        prop_assert_eq!(a.values().len(), grid_len(level));
    }

    #[test]
    fn bridge_refinement_keeps_coarse_values(seed in any::<u64>(), seed2 in any::<u64>(), level in 1u32..10) {
        let p = sample_bm(seed, level).unwrap();
        let r = refine_bridge(&p, seed2).unwrap();
        prop_assert_eq!(r.restrict(level).unwrap(), p.values().to_vec());
    }

    #[test]
    fn l_flags_monotone_in_a(seed in any::<u64>(), m in 2u32..10, a in 0.0..1.5f64, da in 0.0..1.0f64, eps in 0.0..0.3f64) {
        let p = sample_bm(seed, 10).unwrap();
        let hi = l_flags(&p, m, a + da, eps).unwrap();
        let lo = l_flags(&p, m, a, eps).unwrap();
        prop_assert!(hi.is_subset_of(&lo));
    }

    #[test]
    fn sup_flags_monotone_and_dominate_endpoint(seed in any::<u64>(), j in 2u32..8, b in 0.0..1.5f64, db in 0.0..1.0f64) {
        let p = sample_bm(seed, 11).unwrap();
        let hi = sup_flags(&p, j, b + db).unwrap();
        let lo = sup_flags(&p, j, b).unwrap();
        prop_assert!(hi.is_subset_of(&lo));
        // Endpoint increment over the same interval at the same threshold.
        let thr = fastpoints::detector::sup_threshold(j, b);
        let stride = 1usize << (11 - j);
        let v = p.values();
        for k in 0..1usize << j {
            if (v[(k + 1) * stride] - v[k * stride]).abs() >= thr {
                prop_assert!(lo.get(k));
            }
        }
    }

    #[test]
    fn flags_invariant_under_flip(seed in any::<u64>(), m in 2u32..8, a in 0.0..1.2f64) {
        let p = sample_bm(seed, 11).unwrap();
        let q = flip_sign(&p, true).unwrap();
        prop_assert_eq!(l_flags(&p, m, a, 0.1).unwrap().iter().collect::<Vec<_>>(), l_flags(&q, m, a, 0.1).unwrap().iter().collect::<Vec<_>>());
        prop_assert_eq!(sup_flags(&p, m, a).unwrap().iter().collect::<Vec<_>>(), sup_flags(&q, m, a).unwrap().iter().collect::<Vec<_>>());
        let back = flip_sign(&q, true).unwrap();
        prop_assert_eq!(back.values(), p.values());
        prop_assert_eq!(modulus_coefficient(&p, 1.0 / 64.0).unwrap(), modulus_coefficient(&q, 1.0 / 64.0).unwrap());
    }

    #[test]
    fn holder_sandwich_holds_per_path(seed in any::<u64>(), f in drift_strategy(), m in 4u32..10, a in 0.0..1.2f64, eps in 0.0..0.2f64) {
        let level = 10;
        let b = sample_bm(seed, level).unwrap();
        let x = apply_drift(&b, &f).unwrap();
        let c0 = holder_coefficient_of_values(&f.tabulate(level, grid_len(level)), level, 0.5);
        let delta = holder_sandwich_delta(c0, l_window(m));
        let fx = l_flags(&x, m, a, eps).unwrap();
        prop_assert!(l_flags(&b, m, a + delta, eps).unwrap().is_subset_of(&fx));
        prop_assert!(fx.is_subset_of(&l_flags(&b, m, a - delta, eps).unwrap()));
    }

    #[test]
    fn rle_round_trip(bits in proptest::collection::vec(any::<bool>(), 256), kind in 0usize..4) {
        let kind = [FlagKind::FastL, FlagKind::FastSup, FlagKind::ZeroNear, FlagKind::Intersect][kind];
        let f = IntervalFlags::from_fn(8, kind, FlagParams::default(), |k| bits[k]);
        let g = flags_from_rle(&flags_to_rle(&f)).unwrap();
        prop_assert_eq!(g.kind(), kind);
        prop_assert_eq!(g.iter().collect::<Vec<_>>(), bits);
    }

    #[test]
    fn intersection_laws(seed in any::<u64>(), m in 2u32..8, a in 0.0..1.0f64) {
        let p = sample_bm(seed, 11).unwrap();
        let x = sup_flags(&p, m, a).unwrap();
        let y = zero_near_flags(&p, m, 2.0).unwrap();
        let xy = intersect_flags(&x, &y).unwrap();
        prop_assert_eq!(xy.iter().collect::<Vec<_>>(), intersect_flags(&y, &x).unwrap().iter().collect::<Vec<_>>());
        prop_assert_eq!(count(&intersect_flags(&x, &x).unwrap()), count(&x));
        prop_assert!(xy.is_subset_of(&x) && xy.is_subset_of(&y));
    }

    #[test]
    fn m_n_additive_over_children(seed in any::<u64>(), m in 2u32..7, extra in 0u32..4, a in 0.0..1.0f64) {
        let n = m + 1 + extra;
        let p = sample_bm(seed, n).unwrap();
        let parent = m_n_counts(&p, m, n, a, 0.05).unwrap().per_interval_counts;
        let child = m_n_counts(&p, m + 1, n, a, 0.05).unwrap().per_interval_counts;
        for (k, c) in parent.iter().enumerate() {
            prop_assert_eq!(*c, child[2 * k] + child[2 * k + 1]);
            prop_assert!(*c <= 1u64 << (n - m));
        }
    }

    #[test]
    fn m_n_monotone_coupling(seed in any::<u64>(), a in 0.0..1.0f64, da in 0.0..0.5f64) {
        let p = sample_bm(seed, 10).unwrap();
        let lo = m_n_counts(&p, 4, 10, a, 0.05).unwrap().per_interval_counts;
        let hi = m_n_counts(&p, 4, 10, a + da, 0.05).unwrap().per_interval_counts;
        prop_assert!(hi.iter().zip(&lo).all(|(h, l)| h <= l));
        let flags = l_flags(&p, 10, a, 0.05).unwrap();
        prop_assert_eq!(m_n_from_flags(&flags, 4).unwrap(), lo);
    }

    #[test]
    fn energy_nondecreasing_in_exponent(gamma in 0.05..0.45f64, n in 1u32..7, e in 0.0..0.9f64, de in 0.0..0.5f64) {
        let mu = cantor_natural_measure(gamma, n).unwrap();
        prop_assert!(energy(&mu, e).unwrap() <= energy(&mu, e + de).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn uniform_measure_mass_matches_length(level in 4u32..10, lo in 0.0..0.5f64, len in 0.1..0.5f64) {
        let mu = DiscreteMeasure::uniform_grid(level).unwrap();
        let step = (-(level as f64)).exp2();
        prop_assert!((mu.mass_in(lo, lo + len) - len).abs() <= step + 1e-12);
    }

    #[test]
    fn fit_exact_on_power_laws(slope in -1.0..1.0f64, c in 0.1..10.0f64) {
        let levels: Vec<u32> = (8..=16).collect();
        let counts: Vec<f64> = levels.iter().map(|&m| c * (slope * m as f64).exp2()).collect();
        let fit = fit_exponent(&levels, &counts, Correction::None).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!(fit.stderr < 1e-9);
    }

    #[test]
    fn cantor_drift_dimension_is_a_max(a in 0.0..1.0f64, gamma in 0.01..0.249f64) {
        let d = dim_fast_cantor_drift(a, gamma).unwrap().value;
        prop_assert_eq!(d, dim_fast(a).unwrap().value.max(dim_cantor(gamma).unwrap().value));
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn covering_sum_nonincreasing(freqs in proptest::collection::vec(0.0..1.0f64, 6), g in 0.0..1.0f64) {
        let levels: Vec<LevelFrequencies> = (0..6)
            .map(|j| LevelFrequencies { level: 4 + j as u32, freqs: vec![freqs[j]; 1 << (4 + j)] })
            .collect();
        for i in 4..9 {
            prop_assert!(covering_sum(&levels, g, i + 1) <= covering_sum(&levels, g, i));
        }
    }
}
