//! Library results against closed forms computed independently of the
//! library's own SVD and quadrature.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::SymmetricEigen;

use grasscurve_core::kernel::realify;
use grasscurve_core::random::{gaussian_complex, random_curve, stream_rng};
use grasscurve_core::{flow_length, geodesic_distance, BundleMapSample, LinearCurve, Matrix};

/// `int_0^inf sqrt(sum_i s_i^2 / (1 + t^2 s_i^2)^2) dt` for the squared
/// singular values `s_i^2`, by composite Simpson in `t = tan(theta) / c`.
fn flow_length_from_singular_values(sq: &[f64]) -> f64 {
    let c = sq.iter().cloned().fold(0.0, f64::max).sqrt();
    if c == 0.0 {
        return 0.0;
    }
    let speed = |t: f64| sq.iter().map(|s2| s2 / (1.0 + t * t * s2).powi(2)).sum::<f64>().sqrt();
    let integrand = |theta: f64| {
        if theta >= FRAC_PI_2 {
            // speed ~ sqrt(sum 1 / s_i^2) / t^2 as t -> infinity
            return c * sq.iter().filter(|&&s2| s2 > 0.0).map(|s2| 1.0 / s2).sum::<f64>().sqrt();
        }
        let t = theta.tan() / c;
        speed(t) / (c * theta.cos().powi(2))
    };
    let n = 200_000;
    let h = FRAC_PI_2 / n as f64;
    let mut sum = integrand(0.0) + integrand(FRAC_PI_2);
    for k in 1..n {
        sum += integrand(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[test]
fn flow_length_matches_singular_value_integral() {
    for (i, (m, n)) in [(1, 1), (2, 1), (1, 3), (2, 2), (3, 2)].into_iter().enumerate() {
        let a = gaussian_complex(&mut stream_rng(11, i as u64), n, m);
        let real = realify(&a);
        let gram = real.transpose() * &real;
        let eig = SymmetricEigen::new(gram).eigenvalues;
        let top = eig.max();
        let sq: Vec<f64> = eig.iter().map(|&x| if x > 1e-12 * top { x } else { 0.0 }).collect();
        let want = flow_length_from_singular_values(&sq);
        let got = flow_length(&BundleMapSample::complex(a).unwrap()).unwrap();
        assert!((got - want).abs() < 1e-7, "({m},{n}): {got} vs {want}");
    }
}

#[test]
fn equal_singular_values_give_the_root_sum() {
    // A = I_2 real: two planes turning in step, length sqrt(2) * pi / 2.
    let s = BundleMapSample::real_debug(Matrix::identity(2, 2)).unwrap();
    assert!((flow_length(&s).unwrap() - 2f64.sqrt() * FRAC_PI_2).abs() < 1e-8);
}

#[test]
fn planar_lines_follow_the_arctangent() {
    // span(1, t): angle atan(t), length over the whole line pi.
    let c = LinearCurve::new(Matrix::from_column_slice(2, 1, &[1.0, 0.0]), Matrix::from_column_slice(2, 1, &[0.0, 1.0])).unwrap();
    for (t0, t1) in [(0.0, 1.0), (-2.0, 5.0), (0.3, 0.31)] {
        let d = geodesic_distance(&c.point_at(t0).unwrap(), &c.point_at(t1).unwrap()).unwrap();
        let want = (f64::atan(t1) - f64::atan(t0)).abs();
        // Lines at angle w and pi - w coincide in distance.
        assert!((d - want.min(PI - want)).abs() < 1e-13);
        assert!((c.length(t0, t1).unwrap() - want).abs() < 1e-8);
    }
    assert!((c.total_length().unwrap() - PI).abs() < 1e-8);
}

#[test]
fn line_roots_by_hand() {
    // e = (1, 0), d = (a, b): P(t) = 1 + a t, root -1/a.
    for (a, b) in [(2.0, 1.0), (-0.25, 3.0), (5.0, -1.0)] {
        let c = LinearCurve::new(Matrix::from_column_slice(2, 1, &[1.0, 0.0]), Matrix::from_column_slice(2, 1, &[a, b])).unwrap();
        let part = c.partition().unwrap();
        assert_eq!(part.roots.len(), 1);
        assert!((part.roots[0] + 1.0 / a).abs() < 1e-14);
    }
}

#[test]
fn total_length_of_random_curves_is_bounded_by_p_pi() {
    // Each principal angle sweeps at most pi over the line.
    for i in 0..20u64 {
        let mut rng = stream_rng(12, i);
        let (p, q) = (1 + (i % 3) as usize, 1 + (i % 4) as usize);
        let c = random_curve(&mut rng, p, q);
        let l = c.total_length().unwrap();
        assert!(l.is_finite() && l > 0.0 && l <= p as f64 * PI + 1e-8, "{l}");
    }
}
