//! Dense real and complex matrix primitives used by the geometry layers.
//!
//! Everything here is a thin, tolerance-aware layer over `nalgebra`, except
//! the SVD, which goes through LAPACK: nalgebra's own SVD returns
//! inconsistent factors for some rank-deficient inputs. The tolerances are
//! explicit constants so callers and tests agree on what "rank deficient"
//! or "real root" mean.

use nalgebra::{DMatrix, Schur};
// Links the system OpenBLAS that provides LAPACK.
extern crate openblas_src;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Relative singular-value threshold below which a basis counts as degenerate.
pub const RANK_TOL: f64 = 1e-10;

/// A complex eigenvalue of the companion matrix is accepted as a real root
/// when `|im| <= ROOT_TOL * (1 + |re|)`.
pub const ROOT_TOL: f64 = 1e-9;

/// Real roots closer than this (relative) are reported once.
const ROOT_MERGE_TOL: f64 = 1e-7;

/// Coefficients `c_0, c_1, ..., c_d` of a real polynomial in ascending degree.
///
/// The leading coefficient may be zero: `d` is an upper bound on the degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyCoeffs(Vec<f64>);

impl PolyCoeffs {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("polynomial coefficients must be finite".into()));
        }
        Ok(Self(coeffs))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn degree_bound(&self) -> usize {
        self.0.len() - 1
    }

    /// Degree after dropping exactly-zero leading coefficients; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    fn eval_with_derivative(&self, t: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.0.iter().rev() {
            dp = dp * t + p;
            p = p * t + c;
        }
        (p, dp)
    }

    /// Bound on the rounding error of `eval(t)`.
    fn eval_error_bound(&self, t: f64) -> f64 {
        let scale = self.0.iter().rev().fold(0.0, |acc, &c| acc * t.abs() + c.abs());
        64.0 * f64::EPSILON * scale
    }
}

/// Thin SVD `M = U diag(s) V^T`, singular values non-increasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

/// Thin SVD of a matrix with finite entries.
pub fn svd(m: &Matrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Ok(Svd {
            u: Matrix::zeros(rows, 0),
            s: Vec::new(),
            v: Matrix::zeros(cols, 0),
        });
    }
    let f = nalgebra_lapack::SVD::new(m.clone()).ok_or_else(|| Error::InvalidInput("SVD did not converge".into()))?;
    Ok(Svd {
        u: f.u.columns(0, k).into_owned(),
        s: f.singular_values.iter().copied().collect(),
        v: f.vt.rows(0, k).transpose(),
    })
}

/// Singular values, non-increasing.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    if m.nrows().min(m.ncols()) == 0 {
        return Ok(Vec::new());
    }
    nalgebra_lapack::SVD::new(m.clone())
        .map(|f| f.singular_values.iter().copied().collect())
        .ok_or_else(|| Error::InvalidInput("SVD did not converge".into()))
}

fn singular_value_extremes(m: &Matrix) -> Result<(f64, f64)> {
    let sv = singular_values(m)?;
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    let smallest = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((smallest, largest))
}

/// Thin QR factorization with a positive diagonal in `R`.
///
/// Rejects inputs whose smallest singular value is not above
/// `RANK_TOL` times the largest.
pub fn qr_thin(m: &Matrix) -> Result<(Matrix, Matrix)> {
    if m.nrows() < m.ncols() || m.ncols() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "thin QR needs rows >= cols >= 1, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let (smallest, largest) = singular_value_extremes(m)?;
    // Negated so NaN extremes also count as deficient.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(largest > 0.0) || !(smallest > RANK_TOL * largest) {
        return Err(Error::RankDeficient { smallest, largest });
    }
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for j in 0..r.nrows() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
            r.row_mut(j).neg_mut();
        }
    }
    Ok((q, r))
}

/// Left polar decomposition `M = B U` with `B` symmetric positive
/// semidefinite and `U` orthogonal. Total on square matrices; for singular
/// input the orthogonal factor is completed from the SVD bases.
pub fn polar_left(m: &Matrix) -> Result<(Matrix, Matrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "polar decomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let Svd { u, s, v } = svd(m)?;
    let b = &u * Matrix::from_diagonal(&nalgebra::DVector::from_vec(s)) * u.transpose();
    let b = (&b + b.transpose()) * 0.5;
    Ok((b, u * v.transpose()))
}

/// Matrix exponential of a skew-symmetric matrix; the result is a rotation.
pub fn skew_exp(s: &Matrix) -> Result<Matrix> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "skew_exp needs a square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let asym = (s + s.transpose()).norm();
    if asym > 1e-12 * s.norm() {
        return Err(Error::NotSkew(asym));
    }
    // Exact skew part; the Padé approximant then preserves orthogonality to rounding.
    let skew = (s - s.transpose()) * 0.5;
    Ok(skew.exp())
}

/// All real roots of `p`, ascending, multiplicity collapsed.
///
/// Roots are the eigenvalues of the companion matrix, refined by a few
/// Newton steps on the original coefficients.
pub fn real_roots(p: &PolyCoeffs) -> Result<Vec<f64>> {
    let degree = p.degree().ok_or(Error::ZeroPolynomial)?;
    let c = &p.coeffs()[..=degree];
    let trimmed = PolyCoeffs(c.to_vec());
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = c[degree];
    let mut candidates = Vec::with_capacity(degree);
    if degree == 1 {
        candidates.push(-c[0] / lead);
    } else {
        let mut companion = Matrix::zeros(degree, degree);
        for i in 1..degree {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..degree {
            companion[(i, degree - 1)] = -c[i] / lead;
        }
        let schur = Schur::try_new(companion, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::InvalidInput("companion eigenvalue iteration failed".into()))?;
        for z in schur.complex_eigenvalues().iter() {
            let re_scale = 1.0 + z.re.abs();
            if z.im.abs() <= ROOT_TOL * re_scale {
                candidates.push(z.re);
            } else if z.im.abs() <= 1e-6 * re_scale
                && trimmed.eval(z.re).abs() <= trimmed.eval_error_bound(z.re) * 1e3
            {
                // A multiple real root splits into a near-real pair.
                candidates.push(z.re);
            }
        }
    }
    let mut roots: Vec<f64> = candidates.into_iter().map(|x| newton_polish(&trimmed, x)).collect();
    roots.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last() {
            Some(&last) if (r - last).abs() <= ROOT_MERGE_TOL * (1.0 + last.abs()) => {}
            _ => merged.push(r),
        }
    }
    Ok(merged)
}

fn newton_polish(p: &PolyCoeffs, mut x: f64) -> f64 {
    let mut best = p.eval(x).abs();
    for _ in 0..8 {
        let (v, dv) = p.eval_with_derivative(x);
        if v == 0.0 || dv == 0.0 {
            break;
        }
        let next = x - v / dv;
        let val = p.eval(next).abs();
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(val < best) {
            break;
        }
        best = val;
        x = next;
    }
    x
}

/// Realification: each complex entry `a + bi` becomes the block `[[a, -b], [b, a]]`.
pub fn realify(a: &ComplexMatrix) -> Matrix {
    let mut out = Matrix::zeros(2 * a.nrows(), 2 * a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let z = a[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// Frobenius distance of `m^T m` from the identity.
pub fn orthonormality_defect(m: &Matrix) -> f64 {
    (m.transpose() * m - Matrix::identity(m.ncols(), m.ncols())).norm()
}

/// Numerical rank relative to the largest singular value.
pub fn numerical_rank(m: &Matrix) -> Result<usize> {
    let sv = singular_values(m)?;
    let largest = sv.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > RANK_TOL * largest).count())
}
