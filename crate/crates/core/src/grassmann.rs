//! Points of the Grassmannian `G^p_{p+q}`, its two metrics, and geodesics.
//!
//! A point is carried by an orthonormal `(p+q) x p` basis; two points are
//! equal when their column spans agree, never entrywise. Tangent vectors are
//! horizontal lifts `delta` with `basis^T delta = 0`, and their length is the
//! Frobenius norm. With the bi-invariant metric `<S1, S2> = tr(S1^T S2) / 2`
//! on skew matrices the projection `O(p+q) -> G^p_{p+q}` is a Riemannian
//! submersion for exactly this normalization, so the geodesic distance is the
//! 2-norm of the principal angles.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{orthonormality_defect, qr_thin, singular_values, skew_exp, svd, Matrix, Svd};
use crate::random::{gaussian_matrix, stream_rng};

/// Tolerance on `|basis^T basis - I|` for a valid point.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Two points with maximal principal angle below this are the same subspace.
pub const SPAN_EQ_TOL: f64 = 1e-8;

/// Seed of the Gaussian block used to complete frames in `geodesic_via_exp`.
const FRAME_SEED: u64 = 0x6772_6173_736d_616e;

#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPoint {
    basis: Matrix,
}

impl GrassmannPoint {
    pub fn from_orthonormal(basis: Matrix) -> Result<Self> {
        if basis.ncols() == 0 || basis.nrows() < basis.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "basis must be (p+q) x p with p >= 1, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        let defect = orthonormality_defect(&basis);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal(defect));
        }
        Ok(Self { basis })
    }

    pub(crate) fn from_orthonormal_unchecked(basis: Matrix) -> Self {
        debug_assert!(orthonormality_defect(&basis) <= 1e-8);
        Self { basis }
    }

    /// Column span of an arbitrary full-rank matrix.
    pub fn from_spanning(m: &Matrix) -> Result<Self> {
        let (q, _) = qr_thin(m)?;
        Ok(Self { basis: q })
    }

    /// `R^p x {0}` inside `R^(p+q)`.
    pub fn coordinate(p: usize, q: usize) -> Self {
        Self {
            basis: Matrix::identity(p + q, p),
        }
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn codim(&self) -> usize {
        self.ambient() - self.dim()
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> Matrix {
        &self.basis * self.basis.transpose()
    }

    /// `(I - P) m`: the component of `m` normal to the subspace.
    pub fn horizontal_part(&self, m: &Matrix) -> Matrix {
        m - &self.basis * (self.basis.transpose() * m)
    }

    pub fn same_span(&self, other: &Self) -> Result<bool> {
        Ok(angle_metric(self, other)? <= SPAN_EQ_TOL)
    }

    /// Orthonormal basis of the orthogonal complement, `(p+q) x q`.
    ///
    /// Deterministic: completes the frame with a fixed-seed Gaussian block.
    pub fn complement(&self) -> Matrix {
        let (n, p) = (self.ambient(), self.dim());
        let q = n - p;
        if q == 0 {
            return Matrix::zeros(n, 0);
        }
        let mut rng = stream_rng(FRAME_SEED, 0);
        loop {
            let g = gaussian_matrix(&mut rng, n, q);
            let normal = self.horizontal_part(&g);
            // Second pass keeps the complement orthogonal to machine precision.
            let normal = self.horizontal_part(&normal);
            if let Ok((c, _)) = qr_thin(&normal) {
                return c;
            }
        }
    }
}

/// Horizontal tangent vector at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassTangent {
    at: GrassmannPoint,
    delta: Matrix,
}

impl GrassTangent {
    pub fn new(at: GrassmannPoint, delta: Matrix) -> Result<Self> {
        if delta.shape() != at.basis.shape() {
            return Err(Error::DimensionMismatch(format!(
                "tangent has shape {:?}, point basis {:?}",
                delta.shape(),
                at.basis.shape()
            )));
        }
        let vertical = (at.basis.transpose() * &delta).norm();
        if vertical > ORTHONORMAL_TOL * delta.norm().max(1.0) {
            return Err(Error::TangentMismatch);
        }
        Ok(Self { at, delta })
    }

    /// Horizontal projection of an arbitrary `(p+q) x p` matrix.
    pub fn project(at: &GrassmannPoint, m: &Matrix) -> Self {
        Self {
            at: at.clone(),
            delta: at.horizontal_part(m),
        }
    }

    pub fn at(&self) -> &GrassmannPoint {
        &self.at
    }

    pub fn delta(&self) -> &Matrix {
        &self.delta
    }

    /// Riemannian length; Frobenius norm of the horizontal lift.
    pub fn norm(&self) -> f64 {
        self.delta.norm()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            at: self.at.clone(),
            delta: &self.delta * factor,
        }
    }

    /// Re-express the tangent against the basis of `v`, which must span the same subspace.
    fn lifted_to(&self, v: &GrassmannPoint) -> Result<Matrix> {
        if v.basis.shape() != self.at.basis.shape() {
            return Err(Error::DimensionMismatch("tangent and point shapes differ".into()));
        }
        if v.basis == self.at.basis {
            return Ok(self.delta.clone());
        }
        if !v.same_span(&self.at)? {
            return Err(Error::TangentMismatch);
        }
        // v = at * Q with Q orthogonal; the lift transforms the same way.
        let q = self.at.basis.transpose() * &v.basis;
        Ok(&self.delta * q)
    }
}

/// Principal angles `0 <= theta_1 <= ... <= theta_p <= pi/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PrincipalAngles(Vec<f64>);

impl PrincipalAngles {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn largest(&self) -> f64 {
        self.0.last().copied().unwrap_or(0.0)
    }

    pub fn l2(&self) -> f64 {
        self.0.iter().map(|t| t * t).sum::<f64>().sqrt()
    }
}

fn check_same_shape(v: &GrassmannPoint, w: &GrassmannPoint) -> Result<()> {
    if v.basis.shape() != w.basis.shape() {
        return Err(Error::DimensionMismatch(format!(
            "points live in G({}, {}) and G({}, {})",
            v.dim(),
            v.ambient(),
            w.dim(),
            w.ambient()
        )));
    }
    Ok(())
}

/// Principal angles between two subspaces.
///
/// Mathematically `theta_i = arccos(sigma_i(V^T W))`. Cosines come from
/// `V^T W` and sines from `(I - V V^T) W`; pairing them through `atan2`
/// keeps small angles accurate where `arccos` loses half the digits.
pub fn principal_angles(v: &GrassmannPoint, w: &GrassmannPoint) -> Result<PrincipalAngles> {
    check_same_shape(v, w)?;
    let p = v.dim();
    let mut cosines: Vec<f64> = singular_values(&(v.basis.transpose() * &w.basis))?
        .iter()
        .map(|c| c.clamp(0.0, 1.0))
        .collect();
    cosines.sort_by(|a, b| b.total_cmp(a));
    let mut sines: Vec<f64> = singular_values(&v.horizontal_part(&w.basis))?
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    sines.resize(p, 0.0);
    sines.sort_by(f64::total_cmp);
    let mut angles: Vec<f64> = cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| s.atan2(c).clamp(0.0, std::f64::consts::FRAC_PI_2))
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(PrincipalAngles(angles))
}

/// Riemannian distance: the 2-norm of the principal angles.
pub fn geodesic_distance(v: &GrassmannPoint, w: &GrassmannPoint) -> Result<f64> {
    Ok(principal_angles(v, w)?.l2())
}

/// The sup-inf angle metric; equal to the largest principal angle.
pub fn angle_metric(v: &GrassmannPoint, w: &GrassmannPoint) -> Result<f64> {
    Ok(principal_angles(v, w)?.largest())
}

/// Geodesic through `v` with initial velocity `delta`, evaluated at `t`,
/// from the thin SVD of the horizontal lift.
pub fn geodesic_closed_form(v: &GrassmannPoint, delta: &GrassTangent, t: f64) -> Result<GrassmannPoint> {
    let lift = delta.lifted_to(v)?;
    let Svd { u, s, v: w } = svd(&lift)?;
    let cos = Matrix::from_fn(s.len(), s.len(), |i, j| if i == j { (s[i] * t).cos() } else { 0.0 });
    let sin = Matrix::from_fn(s.len(), s.len(), |i, j| if i == j { (s[i] * t).sin() } else { 0.0 });
    let y = &v.basis * &w * cos * w.transpose() + u * sin * w.transpose();
    GrassmannPoint::from_spanning(&y)
}

/// The same geodesic realized as the image of the one-parameter subgroup
/// `exp(t S)` of `O(p+q)`, with `S = [[0, -X^T], [X, 0]]` in a frame
/// `[V | V_perp]` and `X = V_perp^T delta`.
pub fn geodesic_via_exp(v: &GrassmannPoint, delta: &GrassTangent, t: f64) -> Result<GrassmannPoint> {
    let lift = delta.lifted_to(v)?;
    let (n, p) = (v.ambient(), v.dim());
    let complement = v.complement();
    let mut frame = Matrix::zeros(n, n);
    frame.columns_mut(0, p).copy_from(&v.basis);
    frame.columns_mut(p, n - p).copy_from(&complement);

    let x = complement.transpose() * &lift;
    let mut s = Matrix::zeros(n, n);
    s.view_mut((p, 0), (n - p, p)).copy_from(&(&x * t));
    s.view_mut((0, p), (p, n - p)).copy_from(&(-x.transpose() * t));

    let rotation = skew_exp(&s)?;
    let moved = frame * rotation.columns(0, p);
    GrassmannPoint::from_spanning(&moved)
}
