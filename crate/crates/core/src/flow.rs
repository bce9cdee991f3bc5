//! Multiplicative-flow trajectories of graphs of fibre maps.
//!
//! The flow `(e, f) -> (t e, f)` sends the graph of `A` to the graph of
//! `A / t`. Over `t in (0, infinity)` the trajectory of a graph is the
//! linear curve `s -> graph(s A)` traversed backwards, so its length is the
//! forward length of `LinearCurve::graph(A)`. A complex `n x m` map acts on
//! `R^p x R^q` with `p = 2m`, `q = 2n` after realification.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{Charts, LinearCurve, LENGTH_TOL};
use crate::error::{Error, Result};
use crate::grassmann::GrassmannPoint;
use crate::kernel::{realify, svd, ComplexMatrix, Matrix, Svd, RANK_TOL};
use crate::random::{gaussian_complex, stream_rng};

#[derive(Debug, Clone, PartialEq)]
pub enum FiberMap {
    Complex(ComplexMatrix),
    /// Real `q x p` map used directly, without realification.
    Real(Matrix),
}

/// One fibre `alpha_x : E_x -> F_x` with its cached realification.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleMapSample {
    map: FiberMap,
    real: Matrix,
}

impl BundleMapSample {
    pub fn complex(a: ComplexMatrix) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::DimensionMismatch("fibre map must be at least 1x1".into()));
        }
        if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("fibre map entries must be finite".into()));
        }
        let real = realify(&a);
        Ok(Self {
            map: FiberMap::Complex(a),
            real,
        })
    }

    pub fn real_debug(a: Matrix) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::DimensionMismatch("fibre map must be at least 1x1".into()));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("fibre map entries must be finite".into()));
        }
        Ok(Self {
            real: a.clone(),
            map: FiberMap::Real(a),
        })
    }

    pub fn map(&self) -> &FiberMap {
        &self.map
    }

    /// The real `q x p` matrix the geometry works with.
    pub fn real(&self) -> &Matrix {
        &self.real
    }

    pub fn is_real_debug(&self) -> bool {
        matches!(self.map, FiberMap::Real(_))
    }

    /// `(m, n)`: source and target fibre dimensions as given (complex, or real in debug mode).
    pub fn fiber_dims(&self) -> (usize, usize) {
        match &self.map {
            FiberMap::Complex(a) => (a.ncols(), a.nrows()),
            FiberMap::Real(a) => (a.ncols(), a.nrows()),
        }
    }

    /// `(p, q)` of the Grassmannian the trajectory lives in.
    pub fn real_dims(&self) -> (usize, usize) {
        (self.real.ncols(), self.real.nrows())
    }

    pub fn norm(&self) -> f64 {
        match &self.map {
            FiberMap::Complex(a) => a.norm(),
            FiberMap::Real(a) => a.norm(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let map = match &self.map {
            FiberMap::Complex(a) => FiberMap::Complex(a * num_complex::Complex64::new(factor, 0.0)),
            FiberMap::Real(a) => FiberMap::Real(a * factor),
        };
        Self {
            map,
            real: &self.real * factor,
        }
    }
}

/// The flow trajectory of one graph with both of its limits.
#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub curve: LinearCurve,
    /// `R^p x {0}`, reached as the map is scaled to zero.
    pub limit_zero: GrassmannPoint,
    /// `ker(A) x {0}` plus `{0} x im(A)`, reached as the map is scaled to infinity.
    pub limit_infty: GrassmannPoint,
}

pub fn trajectory(sample: &BundleMapSample) -> FlowTrajectory {
    let a = sample.real();
    let (p, q) = sample.real_dims();
    let curve = LinearCurve::graph(a);
    let limit_zero = GrassmannPoint::coordinate(p, q);

    // Pad to at least p rows so the SVD returns a full right basis.
    let rows = q.max(p);
    let mut padded = Matrix::zeros(rows, p);
    padded.view_mut((0, 0), (q, p)).copy_from(a);
    let Svd { u, s, v } = svd(&padded).expect("fibre maps have finite entries");
    let largest = s.first().copied().unwrap_or(0.0);
    let rank = s.iter().filter(|&&x| largest > 0.0 && x > RANK_TOL * largest).count();

    let mut basis = Matrix::zeros(p + q, p);
    for col in 0..p {
        if col < rank {
            basis.view_mut((p, col), (q, 1)).copy_from(&u.view((0, col), (q, 1)));
        } else {
            basis.view_mut((0, col), (p, 1)).copy_from(&v.column(col));
        }
    }
    let limit_infty = GrassmannPoint::from_spanning(&basis).expect("image and kernel blocks are orthonormal");

    FlowTrajectory {
        curve,
        limit_zero,
        limit_infty,
    }
}

/// Length of the flow trajectory of `graph(A)` over `t in (0, infinity)`.
///
/// Equals the length of the corresponding fibre of `T_alpha` in the product
/// of Grassmannians, whose second coordinate stays fixed.
pub fn flow_length(sample: &BundleMapSample) -> Result<f64> {
    flow_length_with_tol(sample, LENGTH_TOL)
}

/// [`flow_length`] to absolute quadrature tolerance `tol`.
pub fn flow_length_with_tol(sample: &BundleMapSample, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput("length tolerance must be positive".into()));
    }
    Charts::new(&LinearCurve::graph(sample.real()))?.forward_length(tol)
}

/// `graph(t A)`; at `t = 1` the graph of the map itself.
pub fn graph_point(sample: &BundleMapSample, t: f64) -> Result<GrassmannPoint> {
    if !t.is_finite() {
        return Err(Error::InvalidInput("graph parameter must be finite".into()));
    }
    Charts::new(&LinearCurve::graph(sample.real()))?.point(t)
}

/// Flow lengths of `count` Gaussian complex `n x m` maps, one ChaCha stream
/// per index.
#[derive(Debug, Clone, Serialize)]
pub struct FlowEnsemble {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub count: usize,
    #[serde(skip)]
    pub lengths: Vec<f64>,
    pub sup_length: f64,
    pub mean_length: f64,
    /// Supremum over the first half of the ensemble.
    pub sup_half: f64,
    /// `|sup - sup_half| / sup`.
    pub sup_relative_change: f64,
}

pub fn flow_ensemble(seed: u64, m: usize, n: usize, count: usize, tol: f64) -> Result<FlowEnsemble> {
    if m == 0 || n == 0 || count == 0 {
        return Err(Error::InvalidInput("ensemble needs positive m, n and size".into()));
    }
    let lengths = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            flow_length_with_tol(&BundleMapSample::complex(gaussian_complex(&mut rng, n, m))?, tol)
        })
        .collect::<Result<Vec<f64>>>()?;
    let sup = |xs: &[f64]| xs.iter().copied().fold(0.0, f64::max);
    let sup_length = sup(&lengths);
    let sup_half = sup(&lengths[..count.div_ceil(2)]);
    Ok(FlowEnsemble {
        seed,
        m,
        n,
        count,
        sup_length,
        mean_length: lengths.iter().sum::<f64>() / count as f64,
        sup_half,
        sup_relative_change: if sup_length > 0.0 { (sup_length - sup_half) / sup_length } else { 0.0 },
        lengths,
    })
}
