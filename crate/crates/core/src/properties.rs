//! Randomized invariants across modules.

use proptest::prelude::*;

use crate::qseries::{kahan_sum, LogScaledReal};
use crate::repops::{build_operator, RepParams};
use crate::spectral::{spectral_measure, SymTridiagonal};
use crate::ultraspherical::{ctilde_at_node, ctilde_recurrence, recurrence_coeffs, FamilyParams, Node};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_scaled_products_match_f64(x in -1e100f64..1e100, y in -1e100f64..1e100) {
        prop_assume!(x != 0.0 && y != 0.0);
        let p = (LogScaledReal::from_f64(x) * LogScaledReal::from_f64(y)).to_f64();
        prop_assert!((p / (x * y) - 1.0).abs() < 4.0 * f64::EPSILON);
        let d = (LogScaledReal::from_f64(x) / LogScaledReal::from_f64(y)).to_f64();
        prop_assert!((d / (x / y) - 1.0).abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn recurrence_parity(q in 0.05f64..0.95, c in 0.01f64..20.0, x in -3.0f64..3.0, n in 0usize..40) {
        let p = FamilyParams::new(q, c).unwrap();
        let even = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(ctilde_recurrence(n, &p, -x), even * ctilde_recurrence(n, &p, x));
    }

    #[test]
    fn node_values_satisfy_recurrence(q in 0.2f64..0.9, a in 0.1f64..5.0, k in 0usize..12) {
        let p = RepParams::new(q, a).unwrap().family();
        let e = ctilde_at_node(40, &p, Node::plus(k)).unwrap();
        let x = Node::plus(k).value(&p);
        for n in 1..40 {
            let rc = recurrence_coeffs(n, &p);
            let lhs = e.values[n] * x;
            let rhs = e.values[n + 1] * rc.a + e.values[n - 1] * rc.c;
            let scale = [lhs, e.values[n + 1] * rc.a, e.values[n - 1] * rc.c]
                .iter()
                .map(|t| t.log_mag())
                .fold(f64::NEG_INFINITY, f64::max);
            // compare in log-scaled form so deep underflow does not hide a mismatch
            let resid = ((lhs - rhs) / LogScaledReal::from_log(1, scale)).to_f64().abs();
            prop_assert!(resid < 1e-12, "n={} resid={:e}", n, resid);
        }
    }

    #[test]
    fn measure_is_probability_on_the_spectrum(q in 0.2f64..0.85, a in 0.1f64..5.0) {
        let rep = RepParams::new(q, a).unwrap();
        let m = spectral_measure(&build_operator(40, &rep).unwrap(), 1e-15).unwrap();
        prop_assert!((m.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(m.masses.iter().all(|&w| w >= 0.0));
        prop_assert!(m.nodes.iter().all(|&x| x.abs() <= rep.spectral_radius() * (1.0 + 1e-12)));
    }

    #[test]
    fn sturm_count_is_monotone(diag in prop::collection::vec(-2.0f64..2.0, 2..12), a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let n = diag.len();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.3 + 0.1 * i as f64).collect();
        let t = SymTridiagonal::new(diag, off).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(t.sturm_count(lo) <= t.sturm_count(hi));
        prop_assert!(t.sturm_count(hi) <= n);
    }

    #[test]
    fn kahan_sum_ignores_order(mut xs in prop::collection::vec(0.0f64..1e6, 1..200)) {
        let forward = kahan_sum(&xs);
        xs.reverse();
        let backward = kahan_sum(&xs);
        prop_assert!((forward - backward).abs() <= 4.0 * f64::EPSILON * forward);
    }
}
