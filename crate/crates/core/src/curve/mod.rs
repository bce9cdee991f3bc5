//! Linear curves `V(t) = span(E + t D)` in `G^p_{p+q}`.
//!
//! The columns of `E` are the base vectors `e_i`, the columns of `D` their
//! derivatives `d_i`. The curve is well defined wherever `E + t D` keeps full
//! column rank; elsewhere every operation reports [`Error::RankDrop`].

mod length;
mod partition;
mod report;

pub use length::Charts;
pub use partition::{Direction, Interval, MONO_TOL, ROOT_MERGE_TOL, MonotonicityReport, PartitionReport, SideVerdict};
pub use report::CurveReport;

use crate::error::{Error, Result};
use crate::grassmann::{geodesic_closed_form, geodesic_distance, GrassTangent, GrassmannPoint};
use crate::kernel::{qr_thin, Matrix};
use crate::quadrature::integrate;

/// Speeds at or below this make curvature undefined.
pub const SPEED_FLOOR: f64 = 1e-10;

/// Absolute tolerance of every length integral.
pub const LENGTH_TOL: f64 = 1e-8;

/// Arc-length step used by the curvature estimator.
pub const CURVATURE_ARC_STEP: f64 = 2e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearCurve {
    e: Matrix,
    d: Matrix,
}

/// Point, horizontal velocity and speed of a curve at one parameter.
#[derive(Debug, Clone)]
pub struct SpeedSample {
    pub point: GrassmannPoint,
    pub tangent: GrassTangent,
    pub speed: f64,
}

/// Two Richardson-extrapolated curvature estimates at successive step sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureEstimate {
    pub coarse: f64,
    pub fine: f64,
}

impl CurvatureEstimate {
    pub fn value(&self) -> f64 {
        self.fine
    }

    /// `|coarse - fine|` relative to `max(|fine|, floor)`.
    pub fn relative_gap(&self, floor: f64) -> f64 {
        (self.coarse - self.fine).abs() / self.fine.abs().max(floor)
    }
}

impl LinearCurve {
    pub fn new(e: Matrix, d: Matrix) -> Result<Self> {
        if e.shape() != d.shape() {
            return Err(Error::DimensionMismatch(format!(
                "E is {:?} but D is {:?}",
                e.shape(),
                d.shape()
            )));
        }
        if e.ncols() == 0 || e.nrows() <= e.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "curve matrices must be (p+q) x p with p, q >= 1, got {:?}",
                e.shape()
            )));
        }
        if e.iter().chain(d.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("curve entries must be finite".into()));
        }
        qr_thin(&e)?;
        Ok(Self { e, d })
    }

    /// The graph curve `t -> graph(t A)` of a real `q x p` map:
    /// `E = [I_p; 0]`, `D = [0; A]`.
    pub fn graph(a: &Matrix) -> Self {
        let (q, p) = a.shape();
        let e = Matrix::identity(p + q, p);
        let mut d = Matrix::zeros(p + q, p);
        d.view_mut((p, 0), (q, p)).copy_from(a);
        Self { e, d }
    }

    pub fn base(&self) -> &Matrix {
        &self.e
    }

    pub fn derivative(&self) -> &Matrix {
        &self.d
    }

    pub fn ambient(&self) -> usize {
        self.e.nrows()
    }

    pub fn dim(&self) -> usize {
        self.e.ncols()
    }

    pub fn codim(&self) -> usize {
        self.ambient() - self.dim()
    }

    /// `E + t D`.
    pub fn spanning_at(&self, t: f64) -> Matrix {
        &self.e + &self.d * t
    }

    fn factor_at(&self, t: f64) -> Result<(Matrix, Matrix)> {
        qr_thin(&self.spanning_at(t)).map_err(|err| match err {
            Error::RankDeficient { .. } => Error::RankDrop(t),
            other => other,
        })
    }

    pub fn point_at(&self, t: f64) -> Result<GrassmannPoint> {
        let (q, _) = self.factor_at(t)?;
        Ok(GrassmannPoint::from_orthonormal_unchecked(q))
    }

    /// Velocity of the curve at `t`.
    ///
    /// With `E + t D = Q R`, the horizontal lift is `(I - Q Q^T) D R^{-1}`;
    /// at a point where `E` is orthonormal and `t = 0` this is the horizontal
    /// part of `D` and the speed is its Frobenius norm.
    pub fn speed_at(&self, t: f64) -> Result<SpeedSample> {
        let (q, r) = self.factor_at(t)?;
        let d_r = right_solve_upper(&self.d, &r).ok_or(Error::RankDrop(t))?;
        let point = GrassmannPoint::from_orthonormal_unchecked(q);
        let tangent = GrassTangent::project(&point, &d_r);
        let speed = tangent.norm();
        Ok(SpeedSample { point, tangent, speed })
    }

    /// The same point set reparametrized so that `t = 0` sits at `V(s)`,
    /// with an orthonormal base: `E' = Q`, `D' = D R^{-1}` where `E + s D = Q R`.
    pub fn recenter(&self, s: f64) -> Result<Self> {
        let (q, r) = self.factor_at(s)?;
        let d = right_solve_upper(&self.d, &r).ok_or(Error::RankDrop(s))?;
        Ok(Self { e: q, d })
    }

    /// `(E M, D M)`: same subspaces, different basis.
    pub fn right_multiplied(&self, m: &Matrix) -> Result<Self> {
        Self::new(&self.e * m, &self.d * m)
    }

    /// `(E, lambda D)`: the reparametrization `t -> lambda t`.
    pub fn with_scaled_derivative(&self, lambda: f64) -> Self {
        Self {
            e: self.e.clone(),
            d: &self.d * lambda,
        }
    }

    /// Geodesic curvature at `t`: the finer of the two Richardson estimates.
    pub fn curvature_at(&self, t: f64) -> Result<f64> {
        Ok(self.curvature_estimates(t, CURVATURE_ARC_STEP)?.value())
    }

    /// Curvature from the deviation between the curve and the geodesic with
    /// the same initial point and velocity.
    ///
    /// For arc length `s` along the curve, `dist(V(s), geodesic(s)) = K s^2 / 2
    /// + O(s^3)`. Both are compared at equal arc length so a non-constant speed
    /// does not leak into the quotient. Quotients at arc steps `h`, `h/2`,
    /// `h/4` (in arc length) are linearly extrapolated to `s = 0` in pairs.
    pub fn curvature_estimates(&self, t: f64, arc_step: f64) -> Result<CurvatureEstimate> {
        let sample = self.speed_at(t)?;
        if sample.speed <= SPEED_FLOOR {
            return Err(Error::ZeroSpeed);
        }
        let unit = sample.tangent.scaled(1.0 / sample.speed);
        // Arc lengths only need to be exact relative to the arc itself.
        let tol = 1e-10 * arc_step;
        let h = self.parameter_step(t, sample.speed, arc_step, tol)?;
        let q1 = self.deviation_quotient(t, &sample.point, &unit, h, tol)?;
        // Halve in arc, not in parameter: across a speed spike the two differ wildly.
        let h2 = self.step_within(t, h, q1.0 / 2.0, tol / 2.0)?;
        let q2 = self.deviation_quotient(t, &sample.point, &unit, h2, tol / 2.0)?;
        let h4 = self.step_within(t, h2, q1.0 / 4.0, tol / 4.0)?;
        let q4 = self.deviation_quotient(t, &sample.point, &unit, h4, tol / 4.0)?;
        Ok(CurvatureEstimate {
            coarse: extrapolate_to_zero(q1, q2),
            fine: extrapolate_to_zero(q2, q4),
        })
    }

    /// A signed parameter step `h` whose arc from `t` lies within
    /// `[arc_step / 2, 3 arc_step / 2]`.
    ///
    /// `arc_step / speed` overshoots where the speed spikes ahead of `t`
    /// and undershoots where the remaining arc on one side is short, so the
    /// step is bracketed and bisected, forwards first, then backwards.
    /// Without a bracket on either side, the longest admissible step found
    /// is used.
    fn parameter_step(&self, t: f64, speed: f64, arc_step: f64, tol: f64) -> Result<f64> {
        let (lo_arc, hi_arc) = (0.5 * arc_step, 1.5 * arc_step);
        let arc = |h: f64| match integrate(|x| Ok(self.speed_at(x)?.speed), t, t + h, tol) {
            Ok(a) => Ok(Some(a.abs())),
            Err(Error::Quadrature { .. }) | Err(Error::RankDrop(_)) => Ok(None),
            Err(other) => Err(other),
        };
        let mut fallback: Option<(f64, f64)> = None;
        for sign in [1.0, -1.0] {
            // `short` has too little arc, `long` too much (or failed).
            let mut short = 0.0f64;
            let mut long: Option<f64> = None;
            let mut h = arc_step / speed;
            for _ in 0..200 {
                match arc(sign * h)? {
                    Some(a) if a < lo_arc => {
                        if fallback.is_none_or(|(best, _)| a > best) {
                            fallback = Some((a, sign * h));
                        }
                        short = h;
                    }
                    Some(a) if a <= hi_arc => return Ok(sign * h),
                    _ => long = Some(h),
                }
                h = match long {
                    Some(l) => 0.5 * (short + l),
                    None if h < 1e12 * arc_step / speed => 2.0 * h,
                    None => break,
                };
            }
        }
        fallback.map(|(_, h)| h).ok_or(Error::ZeroSpeed)
    }

    /// A step between `0` and `h_max` (same sign) whose arc from `t` is
    /// within 10% of `target`; the arc over `h_max` must exceed `target`.
    fn step_within(&self, t: f64, h_max: f64, target: f64, tol: f64) -> Result<f64> {
        let (mut lo, mut hi) = (0.0, h_max);
        let mut h = 0.5 * h_max;
        for _ in 0..200 {
            let arc = integrate(|x| Ok(self.speed_at(x)?.speed), t, t + h, tol)?.abs();
            if arc < 0.9 * target {
                lo = h;
            } else if arc > 1.1 * target {
                hi = h;
            } else {
                return Ok(h);
            }
            h = 0.5 * (lo + hi);
        }
        Ok(h)
    }

    /// `(s, 2 dist / s^2)` for the curve advanced by parameter step `h`.
    fn deviation_quotient(
        &self,
        t: f64,
        start: &GrassmannPoint,
        unit: &GrassTangent,
        h: f64,
        tol: f64,
    ) -> Result<(f64, f64)> {
        // Signed like `h`, so backward steps follow the geodesic backwards.
        let signed = integrate(|x| Ok(self.speed_at(x)?.speed), t, t + h, tol)?;
        let arc = signed.abs();
        let moved = self.point_at(t + h)?;
        let reference = geodesic_closed_form(start, unit, signed)?;
        let dist = geodesic_distance(&moved, &reference)?;
        Ok((arc, 2.0 * dist / (arc * arc)))
    }
}

fn extrapolate_to_zero((s1, k1): (f64, f64), (s2, k2): (f64, f64)) -> f64 {
    (s1 * k2 - s2 * k1) / (s1 - s2)
}

/// `m R^{-1}` for upper-triangular `R`.
fn right_solve_upper(m: &Matrix, r: &Matrix) -> Option<Matrix> {
    r.transpose()
        .solve_lower_triangular(&m.transpose())
        .map(|x| x.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::angle_metric;
    use crate::random::{gaussian_matrix, random_curve, random_graph_curve, stream_rng};

    fn curve2(e: [f64; 2], d: [f64; 2]) -> LinearCurve {
        LinearCurve::new(Matrix::from_column_slice(2, 1, &e), Matrix::from_column_slice(2, 1, &d)).unwrap()
    }

    #[test]
    fn point_at_zero_is_base_span() {
        let mut rng = stream_rng(31, 0);
        let c = random_curve(&mut rng, 3, 2);
        let v0 = GrassmannPoint::from_orthonormal(c.base().clone()).unwrap();
        assert!(c.point_at(0.0).unwrap().same_span(&v0).unwrap());
    }

    #[test]
    fn point_at_planar_graph() {
        let a = 1.7;
        let c = curve2([1.0, 0.0], [0.0, a]);
        for t in [-2.0, 0.3, 5.0] {
            let n = (1.0 + t * t * a * a).sqrt();
            let want = GrassmannPoint::from_orthonormal(Matrix::from_column_slice(2, 1, &[1.0 / n, t * a / n])).unwrap();
            assert!(angle_metric(&c.point_at(t).unwrap(), &want).unwrap() < 1e-14);
        }
    }

    #[test]
    fn degenerate_basis_is_a_rank_drop() {
        let c = curve2([1.0, 0.0], [-1.0, 0.0]);
        assert_eq!(c.point_at(1.0), Err(Error::RankDrop(1.0)));
        assert!(matches!(c.speed_at(1.0), Err(Error::RankDrop(_))));
    }

    #[test]
    fn vertical_derivative_has_zero_speed() {
        let mut rng = stream_rng(32, 0);
        let c = random_curve(&mut rng, 2, 3);
        let vertical = c.base() * gaussian_matrix(&mut rng, 2, 2);
        let c = LinearCurve::new(c.base().clone(), vertical).unwrap();
        assert!(c.speed_at(0.0).unwrap().speed < 1e-14);
        assert_eq!(c.curvature_at(0.0), Err(Error::ZeroSpeed));
    }

    #[test]
    fn planar_speed_at_zero_is_normal_component() {
        // theta(t) = atan(t b / (1 + t a)), theta'(0) = b
        let (a, b) = (0.8, -2.5);
        let c = curve2([1.0, 0.0], [a, b]);
        assert!((c.speed_at(0.0).unwrap().speed - b.abs()).abs() < 1e-14);
        // theta'(t) = b / ((1 + t a)^2 + t^2 b^2)
        for t in [-0.4, 0.9, 3.0] {
            let want = b.abs() / ((1.0 + t * a).powi(2) + (t * b).powi(2));
            assert!((c.speed_at(t).unwrap().speed - want).abs() < 1e-13);
        }
    }

    #[test]
    fn speed_matches_central_difference_of_distance() {
        let mut rng = stream_rng(33, 0);
        for _ in 0..30 {
            let c = random_curve(&mut rng, 3, 3);
            let t = 0.37;
            let speed = c.speed_at(t).unwrap().speed;
            let quotient = |h: f64| {
                geodesic_distance(&c.point_at(t - h).unwrap(), &c.point_at(t + h).unwrap()).unwrap() / (2.0 * h)
            };
            let h = 1e-3 / speed;
            let fd = (4.0 * quotient(h / 2.0) - quotient(h)) / 3.0;
            assert!((fd - speed).abs() <= 1e-8 * speed, "{fd} vs {speed}");
        }
    }

    #[test]
    fn recenter_preserves_the_point_set() {
        let mut rng = stream_rng(34, 0);
        for _ in 0..10 {
            let c = random_curve(&mut rng, 2, 3);
            for s in [-1.3, 0.0, 0.6] {
                let r = c.recenter(s).unwrap();
                for t in [-0.7, 0.0, 0.2, 2.0] {
                    let a = r.point_at(t).unwrap();
                    let b = c.point_at(s + t).unwrap();
                    assert!(angle_metric(&a, &b).unwrap() < 1e-8);
                }
            }
        }
        let g = curve2([1.0, 0.0], [0.0, 2.0]);
        let moved = g.recenter(1.0).unwrap();
        assert!(moved.point_at(0.0).unwrap().same_span(&g.point_at(1.0).unwrap()).unwrap());
    }

    #[test]
    fn basis_change_does_not_move_points() {
        let mut rng = stream_rng(35, 0);
        let c = random_curve(&mut rng, 3, 2);
        let m = gaussian_matrix(&mut rng, 3, 3);
        let cm = c.right_multiplied(&m).unwrap();
        for t in [-3.0, -0.5, 0.0, 1.5] {
            assert!(angle_metric(&c.point_at(t).unwrap(), &cm.point_at(t).unwrap()).unwrap() < 1e-8);
        }
    }

    #[test]
    fn planar_curves_have_zero_curvature() {
        let c = curve2([1.0, 0.0], [0.4, 1.3]);
        for t in [-0.5, 0.0, 0.7, 4.0] {
            assert!(c.curvature_at(t).unwrap().abs() <= 1e-4);
        }
    }

    #[test]
    fn curvature_extrapolation_is_self_consistent() {
        let mut rng = stream_rng(36, 0);
        for _ in 0..10 {
            let c = random_graph_curve(&mut rng, 2, 2);
            for t in [0.3, 1.1] {
                let est = c.curvature_estimates(t, CURVATURE_ARC_STEP).unwrap();
                assert!(est.fine.is_finite());
                assert!(est.relative_gap(1e-2) <= 0.01, "{est:?}");
            }
        }
    }
}
