use crate::error::{Error, Result};
use crate::grassmann::GrassmannPoint;
use crate::kernel::{svd, Matrix, Svd, RANK_TOL};
use crate::quadrature::integrate;

use super::{LinearCurve, LENGTH_TOL};

/// Two affine charts covering the whole parameter line of a curve.
///
/// The parameter line is compactified to a projective line. After
/// orthonormalizing `E` and scaling `D` to unit spectral norm (a
/// reparametrization `tau = sigma t`), the near chart is the curve itself on
/// `tau in [-1, 1]` and the far chart is the curve in `u = 1/tau` on
/// `u in [-1, 1]`:
///
/// `span(E + tau D) = span(u E + D)`, and with `D V = [D1, 0]`, `E V = [E1, E2]`
/// from the SVD of `D`, `span(u E V + D V) = span(D1 + u E1, E2)` for `u != 0`.
/// The far chart is therefore the linear curve `([D1, E2], [E1, 0])`, which
/// stays well conditioned through `u = 0` and reaches the limit point at
/// infinity there.
#[derive(Debug, Clone)]
pub enum Charts {
    /// `D` has no horizontal or vertical content: the curve is a single point.
    Constant(GrassmannPoint),
    Covered {
        near: LinearCurve,
        far: LinearCurve,
        /// Spectral norm of the recentered derivative; `tau = scale * t`.
        scale: f64,
    },
}

impl Charts {
    pub fn new(curve: &LinearCurve) -> Result<Self> {
        let centered = curve.recenter(0.0)?;
        let Svd { u, s, v } = svd(&centered.d)?;
        let scale = s.first().copied().unwrap_or(0.0);
        if scale == 0.0 {
            let point = GrassmannPoint::from_orthonormal_unchecked(centered.e);
            return Ok(Self::Constant(point));
        }
        let near = LinearCurve {
            e: centered.e.clone(),
            d: &centered.d / scale,
        };
        let rank = s.iter().filter(|&&x| x > RANK_TOL * scale).count();
        let (n, p) = centered.e.shape();
        let ev = &centered.e * &v;
        let mut far_e = Matrix::zeros(n, p);
        let mut far_d = Matrix::zeros(n, p);
        for (j, &sj) in s.iter().enumerate().take(rank) {
            let d1 = u.column(j) * (sj / scale);
            far_e.set_column(j, &d1);
            far_d.set_column(j, &ev.column(j));
        }
        for j in rank..p {
            far_e.set_column(j, &ev.column(j));
        }
        let far = LinearCurve::new(far_e, far_d).map_err(|err| match err {
            Error::RankDeficient { .. } => Error::RankDrop(f64::INFINITY),
            other => other,
        })?;
        Ok(Self::Covered { near, far, scale })
    }

    /// The point at original parameter `t`, switching charts at `|tau| = 1`.
    pub fn point(&self, t: f64) -> Result<GrassmannPoint> {
        match self {
            Self::Constant(v) => Ok(v.clone()),
            Self::Covered { near, far, scale } => {
                let tau = scale * t;
                if tau.abs() <= 1.0 {
                    near.point_at(tau)
                } else {
                    far.point_at(1.0 / tau)
                }
            }
        }
    }

    /// The limit of `V(t)` as `t -> +-infinity` (both ends agree).
    pub fn point_at_infinity(&self) -> Result<GrassmannPoint> {
        match self {
            Self::Constant(v) => Ok(v.clone()),
            Self::Covered { far, .. } => far.point_at(0.0),
        }
    }

    pub fn scale(&self) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::Covered { scale, .. } => *scale,
        }
    }

    /// Length over the whole real line.
    pub fn total_length(&self, tol: f64) -> Result<f64> {
        match self {
            Self::Constant(_) => Ok(0.0),
            Self::Covered { near, far, .. } => {
                Ok(near.length_with_tol(-1.0, 1.0, tol / 2.0)? + far.length_with_tol(-1.0, 1.0, tol / 2.0)?)
            }
        }
    }

    /// Length over `t in (0, infinity)`.
    pub fn forward_length(&self, tol: f64) -> Result<f64> {
        match self {
            Self::Constant(_) => Ok(0.0),
            Self::Covered { near, far, .. } => {
                Ok(near.length_with_tol(0.0, 1.0, tol / 2.0)? + far.length_with_tol(0.0, 1.0, tol / 2.0)?)
            }
        }
    }
}

impl LinearCurve {
    /// Arc length over `[t0, t1]` (order-insensitive).
    pub fn length(&self, t0: f64, t1: f64) -> Result<f64> {
        self.length_with_tol(t0, t1, LENGTH_TOL)
    }

    pub fn length_with_tol(&self, t0: f64, t1: f64, tol: f64) -> Result<f64> {
        if !(t0.is_finite() && t1.is_finite()) {
            return Err(Error::InvalidInput("finite bounds required; use total_length".into()));
        }
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        integrate(|t| Ok(self.speed_at(t)?.speed), lo, hi, tol)
    }

    pub fn charts(&self) -> Result<Charts> {
        Charts::new(self)
    }

    /// Length over the whole parameter line.
    pub fn total_length(&self) -> Result<f64> {
        self.charts()?.total_length(LENGTH_TOL)
    }

    /// Length over `(0, infinity)`.
    pub fn forward_length(&self) -> Result<f64> {
        self.charts()?.forward_length(LENGTH_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::angle_metric;
    use crate::random::{gaussian_matrix, random_curve, stream_rng};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn planar_graph(a: f64) -> LinearCurve {
        LinearCurve::graph(&Matrix::from_element(1, 1, a))
    }

    #[test]
    fn finite_length_is_additive() {
        let mut rng = stream_rng(41, 0);
        let c = random_curve(&mut rng, 2, 2);
        let whole = c.length(-0.5, 2.0).unwrap();
        let parts = c.length(-0.5, 0.8).unwrap() + c.length(0.8, 2.0).unwrap();
        assert!((whole - parts).abs() <= 2.0 * LENGTH_TOL);
        assert_eq!(c.length(2.0, -0.5).unwrap(), whole);
    }

    #[test]
    fn planar_graph_lengths_are_arctangents() {
        // theta(t) = atan(a t)
        let a = 3.0;
        let c = planar_graph(a);
        let eps = 1e-2;
        let want = (a / eps).atan() - (a * eps).atan();
        assert!((c.length(eps, 1.0 / eps).unwrap() - want).abs() < 1e-8);
        assert!((c.forward_length().unwrap() - FRAC_PI_2).abs() < 1e-8);
        assert!((c.total_length().unwrap() - PI).abs() < 1e-8);
    }

    #[test]
    fn constant_curve_has_zero_length() {
        let e = Matrix::identity(4, 2);
        let c = LinearCurve::new(e, Matrix::zeros(4, 2)).unwrap();
        assert_eq!(c.total_length().unwrap(), 0.0);
    }

    #[test]
    fn total_length_ignores_derivative_scale() {
        let mut rng = stream_rng(42, 0);
        for _ in 0..5 {
            let c = random_curve(&mut rng, 2, 2);
            let base = c.total_length().unwrap();
            for lambda in [1e-3, 0.5, 7.0, 1e4] {
                let scaled = c.with_scaled_derivative(lambda).total_length().unwrap();
                assert!((scaled - base).abs() <= 1e-7 * base.max(1.0));
            }
        }
    }

    #[test]
    fn length_is_basis_independent() {
        let mut rng = stream_rng(43, 0);
        let c = random_curve(&mut rng, 3, 2);
        let m = gaussian_matrix(&mut rng, 3, 3);
        let a = c.length(-1.0, 1.5).unwrap();
        let b = c.right_multiplied(&m).unwrap().length(-1.0, 1.5).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn far_chart_reaches_the_limit() {
        // Rank-one graph: the limit mixes the kernel (horizontal) and the image.
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let c = LinearCurve::graph(&a);
        let charts = c.charts().unwrap();
        let limit = charts.point_at_infinity().unwrap();
        let probe = charts.point(1e8).unwrap();
        assert!(angle_metric(&limit, &probe).unwrap() < 1e-7);
        let kernel = Matrix::from_column_slice(4, 1, &[2.0, -1.0, 0.0, 0.0]);
        let image = Matrix::from_column_slice(4, 1, &[0.0, 0.0, 1.0, 2.0]);
        for v in [kernel, image] {
            let v = &v / v.norm();
            let outside = limit.horizontal_part(&v).norm();
            assert!(outside < 1e-12);
        }
    }

    #[test]
    fn rank_drop_inside_range_is_reported() {
        let c = LinearCurve::new(
            Matrix::from_column_slice(2, 1, &[1.0, 0.0]),
            Matrix::from_column_slice(2, 1, &[-1.0, 0.0]),
        )
        .unwrap();
        // E + t D = (1 - t) e1 vanishes at t = 1; the span is constant otherwise.
        assert!(c.length(0.0, 0.5).unwrap().abs() < 1e-12);
        assert!(matches!(c.length(0.0, 1.0 + 1e-12).map(|_| ()), Ok(()) | Err(Error::RankDrop(_))));
    }
}
