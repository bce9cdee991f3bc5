//! Seeded random ensembles.
//!
//! Every ensemble member draws from its own ChaCha stream, so results do not
//! depend on evaluation order or thread count.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::curve::LinearCurve;
use crate::grassmann::{GrassTangent, GrassmannPoint};
use crate::kernel::{qr_thin, ComplexMatrix, Matrix};

pub type Rng = ChaCha8Rng;

/// Default seed used by the CLI and the verification suite.
pub const DEFAULT_SEED: u64 = 42;

pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_complex(rng: &mut Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(s * re, s * im)
    })
}

/// Haar-ish random unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut Rng, n: usize) -> ComplexMatrix {
    let g = gaussian_complex(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Uniformly distributed point of `G^p_{p+q}`.
pub fn random_point(rng: &mut Rng, p: usize, q: usize) -> GrassmannPoint {
    loop {
        let g = gaussian_matrix(rng, p + q, p);
        if let Ok((basis, _)) = qr_thin(&g) {
            return GrassmannPoint::from_orthonormal_unchecked(basis);
        }
    }
}

/// Gaussian horizontal tangent at `at`.
pub fn random_tangent(rng: &mut Rng, at: &GrassmannPoint) -> GrassTangent {
    let g = gaussian_matrix(rng, at.ambient(), at.dim());
    GrassTangent::project(at, &g)
}

/// Linear curve with orthonormal `E` and Gaussian `D`.
pub fn random_curve(rng: &mut Rng, p: usize, q: usize) -> LinearCurve {
    let e = random_point(rng, p, q).basis().clone();
    let d = gaussian_matrix(rng, p + q, p);
    LinearCurve::new(e, d).expect("orthonormal base is full rank")
}

/// Graph curve `span([I; 0] + t [0; A])` for a Gaussian real `q x p` map `A`.
pub fn random_graph_curve(rng: &mut Rng, p: usize, q: usize) -> LinearCurve {
    let a = gaussian_matrix(rng, q, p);
    LinearCurve::graph(&a)
}
