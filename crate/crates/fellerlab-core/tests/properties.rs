//! Randomized invariants for the core library.

use fellerlab_core::{
    f_closed, f_series, simulate, FellerParams, JumpingMeasure, P4Measure, Regime,
    ScalingScheme,
};
use proptest::prelude::*;

fn arb_atoms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec(((0.01f64..10.0), (0.01f64..2.0)), 0..5)
}

fn arb_measure() -> impl Strategy<Value = JumpingMeasure> {
    // random sub-probability vector over states 0..8 plus killing remainder
    proptest::collection::vec(0.0f64..1.0, 1..8).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        let scale = 0.95 / total.max(1.0);
        let probs: Vec<f64> = raw.iter().map(|v| v * scale).collect();
        let kill = 1.0 - probs.iter().sum::<f64>();
        JumpingMeasure::new(kill, probs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interval_mass_is_additive(atoms in arb_atoms(),
                                 a in 0.01f64..5.0,
                                 mid in 0.1f64..1.0,
                                 len in 0.1f64..5.0) {
        let p4 = P4Measure::Atoms(atoms);
        let b = a + mid;
        let c = b + len;
        let whole = p4.interval_mass(a, c).unwrap();
        let split = p4.interval_mass(a, b).unwrap() + p4.interval_mass(b, c).unwrap();
        prop_assert!((whole - split).abs() <= 1e-12);
    }

    #[test]
    fn power_interval_mass_is_additive(c in 0.1f64..5.0,
                                       alpha in -1.9f64..2.0,
                                       a in 0.01f64..1.0,
                                       mid in 0.1f64..1.0,
                                       len in 0.1f64..2.0) {
        let p4 = P4Measure::Power { c, alpha, upper: 10.0 };
        let b = a + mid;
        let d = b + len;
        let whole = p4.interval_mass(a, d).unwrap();
        let split = p4.interval_mass(a, b).unwrap() + p4.interval_mass(b, d).unwrap();
        prop_assert!((whole - split).abs() <= 1e-12 * (1.0 + whole.abs()));
    }

    #[test]
    fn jump_law_weights_sum_to_one(p1 in 0.1f64..10.0, atoms in arb_atoms()) {
        let params = FellerParams::new(p1, 0.0, 1.0, P4Measure::Atoms(atoms)).unwrap();
        let law = params.fbm_jump_law().unwrap();
        prop_assert!((law.kill + law.jump_total - 1.0).abs() <= 1e-12);
        if let Some(atoms) = &law.atoms {
            let s: f64 = atoms.iter().map(|&(_, w)| w).sum();
            prop_assert!((s - law.jump_total).abs() <= 1e-12);
        }
    }

    #[test]
    fn validate_is_scale_covariant(p1 in 0.0f64..5.0,
                                   p2 in 0.0f64..5.0,
                                   p3 in 0.0f64..5.0,
                                   scale in 0.01f64..100.0,
                                   atoms in arb_atoms()) {
        let p4 = P4Measure::Atoms(atoms.clone());
        let scaled_atoms: Vec<(f64, f64)> =
            atoms.iter().map(|&(x, m)| (x, m * scale)).collect();
        let a = FellerParams::new(p1, p2, p3, p4).unwrap().validate();
        let b = FellerParams::new(p1 * scale, p2 * scale, p3 * scale,
                                  P4Measure::Atoms(scaled_atoms))
            .unwrap()
            .validate();
        prop_assert_eq!(a.is_admissible(), b.is_admissible());
    }

    #[test]
    fn built_measures_are_probabilities(p1 in 0.0f64..2.0,
                                        p3 in 0.5f64..3.0,
                                        n in 10u32..200,
                                        atoms in arb_atoms()) {
        let params = FellerParams::new(p1, 0.0, p3, P4Measure::Atoms(atoms)).unwrap();
        if let Ok(scheme) = ScalingScheme::new(Regime::Sojourn, n, params) {
            if let Ok(m) = fellerlab_core::build_measure(&scheme) {
                let mut total = m.kill();
                for &p in m.probs() {
                    prop_assert!((0.0..=1.0).contains(&p));
                    total += p;
                }
                prop_assert!((total - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn simulation_is_reproducible_and_nearest_neighbor(m in arb_measure(),
                                                       seed in any::<u64>(),
                                                       start in 0u32..5) {
        let a = simulate(&m, start, 50, 20, seed);
        let b = simulate(&m, start, 50, 20, seed);
        prop_assert_eq!(&a.paths, &b.paths);
        for path in &a.paths {
            for w in path.states.windows(2) {
                if w[0] >= 1 {
                    // interior steps are nearest-neighbor
                    prop_assert_eq!(w[0].abs_diff(w[1]), 1);
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_series_with_tail_bound(m in arb_measure(),
                                                  xi in 1u32..10) {
        let x = xi as f64 * 0.1;
        let k = 400usize;
        let series = f_series(&m, k);
        let closed = f_closed(&m, x).unwrap();
        let partial = series.eval(x);
        let tail = series.tail_bound(x);
        prop_assert!((closed - partial).abs() <= tail + 1e-9,
                     "x={} gap={} tail={}", x, (closed - partial).abs(), tail);
    }
}
