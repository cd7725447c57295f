use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pisot_core::measures::{detect_cycle, ks_distance, star_discrepancy, CycleParams, EmpiricalMeasure};

fn cycle_sample(values: &[f64], n: usize, decay: f64) -> Vec<f64> {
    (0..n).map(|k| values[k % values.len()] + 0.5 * decay.powi(k as i32)).collect()
}

#[test]
fn smallest_period_wins() {
    let params = CycleParams::default();
    for ell in 1..=6 {
        let values: Vec<f64> = (0..ell).map(|i| (i as f64 * 0.37).sin()).collect();
        let x = cycle_sample(&values, 600, 0.9);
        let r = detect_cycle(&x, 1, &params).unwrap();
        assert_eq!(r.period, Some(ell));
        // every multiple within range fits as well
        for diag in r.diagnostics.iter().filter(|d| d.period % ell == 0) {
            assert!(diag.max_residue_diameter <= params.tol, "period {} of {ell}", diag.period);
        }
        for diag in r.diagnostics.iter().filter(|d| d.period % ell != 0) {
            assert!(diag.max_residue_diameter > params.tol);
        }
    }
}

#[test]
fn birkhoff_mass_concentrates_on_the_limit_set() {
    let limits = [0.1, 0.45, 0.8];
    let tol = 1e-6;
    let mut last = 0.0;
    for n in [100, 1000, 10_000] {
        // the k-th point is 1/k^2 away from its limit
        let x: Vec<f64> = (1..=n).map(|k| limits[k % 3] + 1.0 / (k as f64).powi(2)).collect();
        let mass = EmpiricalMeasure::new(&x).unwrap().mass_within(&limits, 2.0 * tol);
        assert!(mass >= last);
        last = mass;
    }
    assert!(last > 0.9, "{last}");
}

proptest! {
    #[test]
    fn discrepancy_ignores_order_and_copies(x in proptest::collection::vec(0.0f64..1.0, 1..300), seed in any::<u64>()) {
        let d = star_discrepancy(&x).unwrap();
        let mut shuffled = x.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(star_discrepancy(&shuffled).unwrap(), d);
        let doubled: Vec<f64> = x.iter().chain(&x).copied().collect();
        prop_assert!((star_discrepancy(&doubled).unwrap() - d).abs() < 1e-12);
    }

    #[test]
    fn ks_triangle(
        a in proptest::collection::vec(-5.0f64..5.0, 1..200),
        b in proptest::collection::vec(-5.0f64..5.0, 1..200),
        c in proptest::collection::vec(-5.0f64..5.0, 1..200),
    ) {
        let (ma, mb, mc) = (EmpiricalMeasure::new(&a).unwrap(), EmpiricalMeasure::new(&b).unwrap(), EmpiricalMeasure::new(&c).unwrap());
        let slack = 1.0 / a.len().min(b.len()).min(c.len()) as f64;
        prop_assert!(ks_distance(&ma, &mc) <= ks_distance(&ma, &mb) + ks_distance(&mb, &mc) + slack);
    }
}
