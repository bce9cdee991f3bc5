//! The determinant polynomial `P(t) = det(E^T (E + t D))` and the partition
//! of the parameter line by its real roots.
//!
//! A root of `P` is a parameter where `V(t)` contains a vector orthogonal to
//! `V(0)`. The partition claim is that inside each interval the angle
//! `phi_s(t) = angle(V(s), V(s + t))` grows monotonically in `|t|` up to the
//! interval ends. That is true for lines (`p = 1`) and can fail otherwise;
//! the monotone range that always holds is
//! [`LinearCurve::monotone_horizon`].

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grassmann::angle_metric;
use crate::kernel::{orthonormality_defect, real_roots, Matrix, PolyCoeffs};

use super::LinearCurve;

/// Roots closer than this are merged; narrower intervals are not checked.
pub const ROOT_MERGE_TOL: f64 = 1e-8;

/// Largest tolerated decrease of the angle function inside one interval.
pub const MONO_TOL: f64 = 1e-10;

fn serialize_bound<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_some(x)
    } else {
        s.serialize_none()
    }
}

/// Open interval; infinite ends serialize as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    #[serde(serialize_with = "serialize_bound")]
    pub lo: f64,
    #[serde(serialize_with = "serialize_bound")]
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        self.lo < t && t < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    pub roots: Vec<f64>,
    pub intervals: Vec<Interval>,
    pub poly: PolyCoeffs,
}

impl PartitionReport {
    fn from_roots(poly: PolyCoeffs, roots: Vec<f64>) -> Self {
        let mut bounds = Vec::with_capacity(roots.len() + 2);
        bounds.push(f64::NEG_INFINITY);
        bounds.extend_from_slice(&roots);
        bounds.push(f64::INFINITY);
        let intervals = bounds
            .windows(2)
            .map(|w| Interval { lo: w[0], hi: w[1] })
            .collect();
        Self { roots, intervals, poly }
    }

    pub fn interval_containing(&self, t: f64) -> Option<Interval> {
        self.intervals.iter().copied().find(|i| i.contains(t))
    }

    /// Largest `|P(root)|`.
    pub fn max_residual(&self) -> f64 {
        self.roots
            .iter()
            .map(|&r| self.poly.eval(r).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// Monotonicity of `phi_s` on one side of `s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideVerdict {
    pub direction: Direction,
    /// Interval endpoint on this side in absolute parameters; `null` when unbounded.
    #[serde(serialize_with = "serialize_bound")]
    pub endpoint: f64,
    pub samples: usize,
    /// Largest drop below the running maximum, walking away from `s`.
    pub max_violation: f64,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub s: f64,
    pub interval: Interval,
    pub sides: Vec<SideVerdict>,
}

impl MonotonicityReport {
    pub fn monotone(&self) -> bool {
        self.sides.iter().all(|s| s.monotone)
    }

    pub fn max_violation(&self) -> f64 {
        self.sides.iter().map(|s| s.max_violation).fold(0.0, f64::max)
    }
}

/// Coefficients `a_0..a_p` of `det(x I - M)` by the Faddeev-LeVerrier recursion.
fn characteristic_polynomial(m: &Matrix) -> Vec<f64> {
    let p = m.nrows();
    let mut a = vec![0.0; p + 1];
    a[p] = 1.0;
    let identity = Matrix::identity(p, p);
    let mut acc = Matrix::zeros(p, p);
    for k in 1..=p {
        acc = m * &acc + &identity * a[p - k + 1];
        a[p - k] = -(m * &acc).trace() / k as f64;
    }
    a
}

/// Largest drop below the running maximum of `values` (0 when non-decreasing).
fn max_decrease(values: &[f64]) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for &v in values {
        peak = peak.max(v);
        worst = worst.max(peak - v);
    }
    worst
}

impl LinearCurve {
    /// `P(t) = det(E^T (E + t D)) = det(I + t E^T D)` for orthonormal `E`.
    ///
    /// Coefficient of `t^j` is `(-1)^j a_{p-j}` where `a` is the
    /// characteristic polynomial of `E^T D`; `P(0) = 1`.
    pub fn det_polynomial(&self) -> Result<PolyCoeffs> {
        let defect = orthonormality_defect(&self.e);
        if defect > 1e-10 {
            return Err(Error::NotOrthonormal(defect));
        }
        let m = self.e.transpose() * &self.d;
        let a = characteristic_polynomial(&m);
        let p = m.nrows();
        let coeffs = (0..=p)
            .map(|j| if j % 2 == 0 { a[p - j] } else { -a[p - j] })
            .collect();
        PolyCoeffs::new(coeffs)
    }

    /// Real roots of the determinant polynomial about `t = 0` and the open
    /// intervals between them.
    pub fn partition(&self) -> Result<PartitionReport> {
        self.partition_with_tol(ROOT_MERGE_TOL)
    }

    /// As [`partition`](Self::partition), merging roots closer than `merge_tol`.
    pub fn partition_with_tol(&self, merge_tol: f64) -> Result<PartitionReport> {
        if !(merge_tol > 0.0 && merge_tol.is_finite()) {
            return Err(Error::InvalidInput("root tolerance must be positive".into()));
        }
        let poly = self.recenter(0.0)?.det_polynomial()?;
        let raw = real_roots(&poly)?;
        let mut roots: Vec<f64> = Vec::with_capacity(raw.len());
        for r in raw {
            match roots.last() {
                Some(&last) if r - last < merge_tol => {}
                _ => roots.push(r),
            }
        }
        Ok(PartitionReport::from_roots(poly, roots))
    }

    /// `phi_s(t) = angle(V(s), V(s + t))` at each offset `t`.
    pub fn angle_profile(&self, s: f64, offsets: &[f64]) -> Result<Vec<f64>> {
        let charts = self.recenter(s)?.charts()?;
        let origin = charts.point(0.0)?;
        offsets
            .iter()
            .map(|&t| angle_metric(&origin, &charts.point(t)?))
            .collect()
    }

    /// Largest decrease of `phi_s` on a uniform grid of `grid` points from
    /// `s` to `s + t_end`, regardless of partition roots in between.
    pub fn scan_monotonicity(&self, s: f64, t_end: f64, grid: usize) -> Result<f64> {
        let offsets: Vec<f64> = (0..=grid).map(|k| t_end * k as f64 / grid as f64).collect();
        Ok(max_decrease(&self.angle_profile(s, &offsets)?))
    }

    /// Runs the partition claim from one representative point of every
    /// interval of `partition` wider than the merge tolerance (`0` for the
    /// interval containing it). Empty for a constant curve.
    pub fn check_partition_monotone(&self, partition: &PartitionReport, grid: usize) -> Result<Vec<MonotonicityReport>> {
        let scale = self.charts()?.scale();
        if scale == 0.0 {
            return Ok(Vec::new());
        }
        let step = 1.0 / scale;
        partition
            .intervals
            .iter()
            .filter(|i| i.width() > ROOT_MERGE_TOL)
            .map(|i| {
                let s = match (i.lo.is_finite(), i.hi.is_finite()) {
                    _ if i.contains(0.0) => 0.0,
                    (true, true) => 0.5 * (i.lo + i.hi),
                    (true, false) => i.lo + step,
                    (false, true) => i.hi - step,
                    (false, false) => 0.0,
                };
                self.scan_sides(s, *i, grid)
            })
            .collect()
    }

    /// Checks the partition claim at `s`: `phi_s` increases walking away
    /// from `s` up to the ends of the partition interval containing `s`.
    ///
    /// This holds for `p = 1` but not in general; see
    /// [`monotone_horizon`](Self::monotone_horizon) for the range where
    /// monotonicity is guaranteed.
    pub fn check_angle_monotone(&self, s: f64, grid: usize) -> Result<MonotonicityReport> {
        let interval = self
            .partition()?
            .interval_containing(s)
            .ok_or_else(|| Error::InvalidInput(format!("{s} is a partition root")))?;
        self.scan_sides(s, interval, grid)
    }

    /// The interval around `s` cut out by the roots of the polynomial of the
    /// curve recentered at `s`, in absolute parameters.
    pub fn local_partition_interval(&self, s: f64) -> Result<Interval> {
        let local = self.recenter(s)?.partition()?;
        let i = local.interval_containing(0.0).expect("P(0) = 1 keeps 0 off the roots");
        Ok(Interval { lo: s + i.lo, hi: s + i.hi })
    }

    /// The parameters around `s` where `phi_s` is guaranteed monotone.
    ///
    /// A vector `x = E_s c + tau D_s c` of `V(s + tau)` makes an angle with
    /// `V(s)` that increases in `tau` while `c^T (I + tau M) c > 0`, with
    /// `M = E_s^T D_s` and `E_s` orthonormal. `phi_s` is the largest of these
    /// angles, so it increases on `(0, tau_+)` and decreases on `(tau_-, 0)`
    /// where `I + tau sym(M)` stays positive definite. The determinant roots
    /// of [`partition`](Self::partition) lie outside this interval.
    pub fn monotone_horizon(&self, s: f64) -> Result<Interval> {
        let local = self.recenter(s)?;
        let m = local.e.transpose() * &local.d;
        let sym = (&m + m.transpose()) * 0.5;
        let eig = sym.symmetric_eigenvalues();
        let lowest = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let highest = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let hi = if lowest < 0.0 { s - 1.0 / lowest } else { f64::INFINITY };
        let lo = if highest > 0.0 { s - 1.0 / highest } else { f64::NEG_INFINITY };
        Ok(Interval { lo, hi })
    }

    /// `phi_s` scanned across the whole of [`monotone_horizon`](Self::monotone_horizon).
    pub fn check_horizon_monotone(&self, s: f64, grid: usize) -> Result<MonotonicityReport> {
        let horizon = self.monotone_horizon(s)?;
        self.scan_sides(s, horizon, grid)
    }

    /// Samples `phi_s` walking away from `s` towards both ends of
    /// `interval` (absolute parameters, containing `s`).
    ///
    /// Bounded sides are sampled uniformly in `t`; unbounded sides uniformly
    /// in `atan` of the normalized parameter.
    pub fn scan_sides(&self, s: f64, interval: Interval, grid: usize) -> Result<MonotonicityReport> {
        if !interval.contains(s) {
            return Err(Error::InvalidInput(format!("{s} lies outside {interval:?}")));
        }
        let charts = self.recenter(s)?.charts()?;
        let scale = charts.scale();
        let origin = charts.point(0.0)?;

        let mut sides = Vec::with_capacity(2);
        for (direction, end) in [(Direction::Forward, interval.hi), (Direction::Backward, interval.lo)] {
            let sign = if direction == Direction::Forward { 1.0 } else { -1.0 };
            let reach = end - s;
            let offsets: Vec<f64> = if reach.is_finite() {
                if reach.abs() < ROOT_MERGE_TOL {
                    Vec::new()
                } else {
                    (1..=grid).map(|k| reach * k as f64 / (grid + 1) as f64).collect()
                }
            } else if scale == 0.0 {
                Vec::new()
            } else {
                (1..=grid)
                    .map(|k| {
                        let theta = std::f64::consts::FRAC_PI_2 * k as f64 / (grid + 1) as f64;
                        sign * theta.tan() / scale
                    })
                    .collect()
            };
            let mut values = Vec::with_capacity(offsets.len() + 1);
            values.push(0.0);
            for &t in &offsets {
                values.push(angle_metric(&origin, &charts.point(t)?)?);
            }
            let max_violation = max_decrease(&values);
            sides.push(SideVerdict {
                direction,
                endpoint: end,
                samples: offsets.len(),
                max_violation,
                monotone: max_violation <= MONO_TOL,
            });
        }
        Ok(MonotonicityReport { s, interval, sides })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_curve, stream_rng};
    use std::f64::consts::FRAC_PI_2;

    fn planar(a: f64, b: f64) -> LinearCurve {
        LinearCurve::new(
            Matrix::from_column_slice(2, 1, &[1.0, 0.0]),
            Matrix::from_column_slice(2, 1, &[a, b]),
        )
        .unwrap()
    }

    // Oracle: P(t) = det(I + t M) evaluated directly by LU.
    fn det_direct(c: &LinearCurve, t: f64) -> f64 {
        let m = c.base().transpose() * c.derivative();
        (Matrix::identity(m.nrows(), m.nrows()) + m * t).determinant()
    }

    #[test]
    fn vertical_free_derivative_gives_constant_polynomial() {
        let c = LinearCurve::graph(&Matrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 3.0]));
        let poly = c.det_polynomial().unwrap();
        assert_eq!(poly.coeffs(), &[1.0, 0.0, 0.0]);
        let part = c.partition().unwrap();
        assert!(part.roots.is_empty());
        assert_eq!(part.intervals.len(), 1);
    }

    #[test]
    fn planar_polynomial_is_linear() {
        let (a, b) = (2.0, 0.7);
        let c = planar(a, b);
        assert_eq!(c.det_polynomial().unwrap().coeffs(), &[1.0, a]);
        assert_eq!(c.partition().unwrap().roots, vec![-0.5]);
    }

    #[test]
    fn polynomial_matches_direct_determinant() {
        let mut rng = stream_rng(51, 0);
        for p in 1..=5 {
            let c = random_curve(&mut rng, p, 2);
            let poly = c.det_polynomial().unwrap();
            assert_eq!(poly.degree_bound(), p);
            assert_eq!(poly.eval(0.0), 1.0);
            for t in [-2.0, -0.3, 0.5, 1.7] {
                let want = det_direct(&c, t);
                assert!((poly.eval(t) - want).abs() <= 1e-10 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn non_orthonormal_base_is_rejected() {
        let c = LinearCurve::new(
            Matrix::from_column_slice(2, 1, &[2.0, 0.0]),
            Matrix::from_column_slice(2, 1, &[0.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(c.det_polynomial(), Err(Error::NotOrthonormal(_))));
        // partition recenters first, so it is fine
        assert!(c.partition().is_ok());
    }

    #[test]
    fn random_partitions_have_small_residuals() {
        let mut rng = stream_rng(52, 0);
        for _ in 0..50 {
            let c = random_curve(&mut rng, 3, 2);
            let part = c.partition().unwrap();
            assert!(part.roots.len() <= 3);
            assert!(part.max_residual() <= 1e-6);
            assert_eq!(part.intervals.len(), part.roots.len() + 1);
        }
    }

    #[test]
    fn planar_graph_is_monotone_forward_from_one() {
        let c = LinearCurve::graph(&Matrix::from_element(1, 1, 1.5));
        let report = c.check_angle_monotone(1.0, 200).unwrap();
        let forward = &report.sides[0];
        assert_eq!(forward.direction, Direction::Forward);
        assert!(forward.endpoint.is_infinite());
        assert!(forward.monotone);
        // Walking back from s = 1 the line turns orthogonal to V(1) before
        // t = 0, a root only of the recentered polynomial.
        assert!(!report.sides[1].monotone);
        let local = c.local_partition_interval(1.0).unwrap();
        assert!((local.lo - (1.5f64.atan() - FRAC_PI_2).tan() / 1.5).abs() < 1e-12);
        assert!(c.scan_sides(1.0, local, 200).unwrap().monotone());
    }

    #[test]
    fn sampling_across_a_root_shows_a_violation() {
        let c = planar(1.0, 1.0);
        assert_eq!(c.partition().unwrap().roots, vec![-1.0]);
        assert!(c.check_angle_monotone(0.0, 200).unwrap().monotone());
        let violation = c.scan_monotonicity(0.0, -2.0, 200).unwrap();
        assert!(violation > 0.1, "{violation}");
    }

    // p = 2, q = 1 with no real partition roots near s, yet phi_s turns back.
    fn plane_curve_without_roots() -> LinearCurve {
        LinearCurve::new(
            Matrix::from_column_slice(3, 2, &[0.7021303493523021, -0.059476297348624946, 0.7095601049749856, 0.13329115158175842, 0.9898686666290633, -0.04892332507106977]),
            Matrix::from_column_slice(3, 2, &[-0.1951399395310613, 1.3917534580995596, 1.004561265196703, -0.8884628165264835, -1.2851976137660783, 1.135922036245662]),
        )
        .unwrap()
    }

    #[test]
    fn determinant_partition_is_not_a_monotonicity_guarantee() {
        let c = plane_curve_without_roots();
        let s = -0.45396103641255003;
        assert!(c.recenter(s).unwrap().partition().unwrap().roots.is_empty());
        let local = c.local_partition_interval(s).unwrap();
        assert!(local.lo.is_infinite() && local.hi.is_infinite());
        let claim = c.scan_sides(s, local, 200).unwrap();
        assert!(claim.max_violation() > 0.1, "{claim:?}");
        let horizon = c.monotone_horizon(s).unwrap();
        assert!(horizon.hi.is_finite() && horizon.lo.is_infinite());
        assert!(c.check_horizon_monotone(s, 200).unwrap().monotone());
    }

    #[test]
    fn horizon_of_lines_matches_the_partition() {
        // p = 1: sym(M) = M, so the horizon ends at the determinant root.
        let c = planar(2.0, 0.7);
        let h = c.monotone_horizon(0.0).unwrap();
        assert!((h.lo + 0.5).abs() < 1e-15 && h.hi.is_infinite());
    }

    #[test]
    fn random_horizons_are_monotone() {
        let mut rng = stream_rng(53, 0);
        for _ in 0..40 {
            let c = random_curve(&mut rng, 3, 2);
            for s in [-1.0, 0.0, 0.7] {
                let r = c.check_horizon_monotone(s, 100).unwrap();
                assert!(r.monotone(), "{r:?}");
            }
        }
    }
}
