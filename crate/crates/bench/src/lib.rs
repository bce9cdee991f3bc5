//! Fixed inputs shared by the benchmarks.

use grasscurve_core::random::{gaussian_complex, random_curve, random_point, stream_rng};
use grasscurve_core::{BundleMapSample, GrassmannPoint, LinearCurve};

pub const SEED: u64 = 42;

pub fn complex_map(m: usize, n: usize) -> BundleMapSample {
    BundleMapSample::complex(gaussian_complex(&mut stream_rng(SEED, 1), n, m)).expect("finite entries")
}

pub fn curve(p: usize, q: usize) -> LinearCurve {
    random_curve(&mut stream_rng(SEED, 2), p, q)
}

pub fn point_pair(p: usize, q: usize) -> (GrassmannPoint, GrassmannPoint) {
    let mut rng = stream_rng(SEED, 3);
    (random_point(&mut rng, p, q), random_point(&mut rng, p, q))
}
