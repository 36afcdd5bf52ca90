use oldroyd_lab::fit::{fit_against_a, fit_power_law, Criterion, FitResult};
use proptest::prelude::*;

proptest! {
    #[test]
    fn exact_power_laws_are_recovered(p in -3.0f64..1.0, c in 1e-6f64..1e3, lo in 0.5f64..20.0, decades in 1.0f64..3.0) {
        let hi = lo * 10f64.powf(decades);
        let series: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let t = lo * (hi / lo).powf(i as f64 / 39.0);
                (t, c * (1.0 + t).powf(p))
            })
            .collect();
        let f = fit_power_law(&series, (lo, hi)).unwrap();
        prop_assert!((f.exponent - p).abs() < 1e-9);
        prop_assert!(f.residual < 1e-9);
    }

    #[test]
    fn sweep_fits_recover_exponents(q in 0.2f64..1.5, c in 1e-3f64..10.0) {
        let pts: Vec<(f64, f64)> = [1e-3f64, 3e-3, 1e-2, 3e-2, 1e-1].iter().map(|&a| (a, c * a.powf(q))).collect();
        let f = fit_against_a(&pts, (1e-3, 1e-1)).unwrap();
        prop_assert!((f.exponent - q).abs() < 1e-9);
    }

    #[test]
    fn pass_flag_is_reproducible_from_fields(p in -2.0f64..0.0, target in -2.0f64..0.0, tol in 0.01f64..0.3, crit in 0usize..3) {
        let series: Vec<(f64, f64)> = (1..30).map(|i| (i as f64, (1.0 + i as f64).powf(p))).collect();
        let crit = [Criterion::Within, Criterion::AtLeast, Criterion::AtMost][crit];
        let f = fit_power_law(&series, (1.0, 30.0)).unwrap().judged(target, crit, tol, 0.5);
        let back: FitResult = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        prop_assert_eq!(back.evaluate_pass(), f.pass);
        prop_assert_eq!(back, f);
    }
}
