use proptest::prelude::*;

use grasscurve_core::random::{gaussian_complex, gaussian_matrix, random_curve, random_point, stream_rng};
use grasscurve_core::{angle_metric, flow_length, geodesic_distance, BundleMapSample};

fn dims() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=4, 1usize..=4, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subspace_is_basis_independent((p, q, seed) in dims(), t in -5.0f64..5.0) {
        let mut rng = stream_rng(seed, 0);
        let c = random_curve(&mut rng, p, q);
        let m = gaussian_matrix(&mut rng, p, p);
        prop_assume!(m.determinant().abs() > 1e-3);
        let moved = c.right_multiplied(&m).unwrap();
        let d = angle_metric(&c.point_at(t).unwrap(), &moved.point_at(t).unwrap()).unwrap();
        prop_assert!(d < 1e-8, "{d}");
    }

    #[test]
    fn metrics_are_symmetric_and_ordered((p, q, seed) in dims()) {
        let mut rng = stream_rng(seed, 1);
        let (u, v) = (random_point(&mut rng, p, q), random_point(&mut rng, p, q));
        let g = geodesic_distance(&u, &v).unwrap();
        let a = angle_metric(&u, &v).unwrap();
        prop_assert!((g - geodesic_distance(&v, &u).unwrap()).abs() < 1e-12);
        prop_assert!(a <= g + 1e-12 && g <= (p as f64).sqrt() * a + 1e-12);
        prop_assert!(a <= std::f64::consts::FRAC_PI_2 + 1e-12);
    }

    #[test]
    fn recentered_polynomial_starts_at_one((p, q, seed) in dims(), s in -3.0f64..3.0) {
        let c = random_curve(&mut stream_rng(seed, 2), p, q);
        let poly = c.recenter(s).unwrap().det_polynomial().unwrap();
        prop_assert!((poly.eval(0.0) - 1.0).abs() < 1e-12);
        let part = c.partition().unwrap();
        prop_assert!(part.roots.len() <= p);
        prop_assert_eq!(part.intervals.len(), part.roots.len() + 1);
    }

    #[test]
    fn flow_length_ignores_positive_scale(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=3, k in -6i32..=6) {
        let a = gaussian_complex(&mut stream_rng(seed, 3), n, m);
        let s = BundleMapSample::complex(a).unwrap();
        let base = flow_length(&s).unwrap();
        let scaled = flow_length(&s.scaled(10f64.powi(k))).unwrap();
        prop_assert!((base - scaled).abs() <= 1e-7 * base, "{base} vs {scaled}");
    }

    #[test]
    fn length_splits_additively((p, q, seed) in dims(), a in -4.0f64..0.0, b in 0.0f64..4.0) {
        let c = random_curve(&mut stream_rng(seed, 4), p, q);
        let whole = c.length(a, b).unwrap();
        let parts = c.length(a, 0.0).unwrap() + c.length(0.0, b).unwrap();
        prop_assert!((whole - parts).abs() < 1e-7);
        let chord = geodesic_distance(&c.point_at(a).unwrap(), &c.point_at(b).unwrap()).unwrap();
        prop_assert!(chord <= whole + 1e-8);
    }
}
