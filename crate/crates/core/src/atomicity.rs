//! Fibre-length bounds for a family of maps over a discretized base.
//!
//! The base is a flat torus `[0, 1)^nu` sampled on a regular grid. The
//! trajectory set of the family has locally finite `(nu + 1)`-measure when
//! the fibre lengths are uniformly bounded; the report gives the bound and
//! the Fubini sum `sum(length * cell volume)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::curve::LENGTH_TOL;
use crate::flow::{flow_length_with_tol, BundleMapSample};

/// Relative threshold (against the family's mean norm) marking zero-locus cells.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseGrid {
    shape: Vec<usize>,
}

impl BaseGrid {
    pub fn new(shape: Vec<usize>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::InvalidInput("base dimension must be at least 1".into()));
        }
        if shape.iter().any(|&n| n < 2) {
            return Err(Error::InvalidInput(format!("grid sizes must be >= 2, got {shape:?}")));
        }
        Ok(Self { shape })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Base dimension `nu`.
    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.shape.iter().map(|&n| 1.0 / n as f64).product()
    }

    /// Coordinates in `[0, 1)^nu` of the row-major index.
    pub fn coords(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut out = vec![0.0; self.shape.len()];
        for (axis, &n) in self.shape.iter().enumerate().rev() {
            out[axis] = (rest % n) as f64 / n as f64;
            rest /= n;
        }
        out
    }

    /// The same torus with every axis refined by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            shape: self.shape.iter().map(|&n| n * factor).collect(),
        }
    }
}

/// A section of `Hom(E, F)` sampled at every grid point.
#[derive(Debug, Clone)]
pub struct MapFamily {
    grid: BaseGrid,
    samples: Vec<BundleMapSample>,
}

impl MapFamily {
    pub fn from_samples(grid: BaseGrid, samples: Vec<BundleMapSample>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "grid has {} points but {} samples were given",
                grid.len(),
                samples.len()
            )));
        }
        let expected = samples[0].fiber_dims();
        let debug = samples[0].is_real_debug();
        for (index, s) in samples.iter().enumerate() {
            if s.fiber_dims() != expected || s.is_real_debug() != debug {
                return Err(Error::InconsistentFibers {
                    index,
                    expected,
                    found: s.fiber_dims(),
                });
            }
        }
        Ok(Self { grid, samples })
    }

    pub fn grid(&self) -> &BaseGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[BundleMapSample] {
        &self.samples
    }

    /// Pointwise rescaling `alpha(x) -> f(x) alpha(x)`.
    pub fn rescaled<F>(&self, factor: F) -> Self
    where
        F: Fn(&[f64]) -> f64,
    {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| s.scaled(factor(&self.grid.coords(i))))
            .collect();
        Self {
            grid: self.grid.clone(),
            samples,
        }
    }
}

/// Evaluate `generator` at every grid point (in parallel, index order preserved).
pub fn build_family<G>(grid: BaseGrid, generator: G) -> Result<MapFamily>
where
    G: Fn(&[f64]) -> Result<BundleMapSample> + Sync,
{
    let samples = (0..grid.len())
        .into_par_iter()
        .map(|i| generator(&grid.coords(i)))
        .collect::<Result<Vec<_>>>()?;
    MapFamily::from_samples(grid, samples)
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomicityReport {
    pub grid: Vec<usize>,
    /// Fibre length at every grid point, row-major.
    #[serde(skip)]
    pub lengths: Vec<f64>,
    pub sup_length: f64,
    pub mean_length: f64,
    /// `sum(length * cell volume)` over the grid.
    pub measure_estimate: f64,
    pub total_volume: f64,
    pub zero_locus_cells: usize,
}

pub fn atomicity_report(family: &MapFamily) -> Result<AtomicityReport> {
    atomicity_report_with_tol(family, LENGTH_TOL)
}

/// [`atomicity_report`] with fibre lengths to quadrature tolerance `tol`.
pub fn atomicity_report_with_tol(family: &MapFamily, tol: f64) -> Result<AtomicityReport> {
    let lengths = family
        .samples
        .par_iter()
        .map(|s| flow_length_with_tol(s, tol))
        .collect::<Result<Vec<f64>>>()?;
    let grid = &family.grid;
    let volume = grid.cell_volume();
    let sup_length = lengths.iter().cloned().fold(0.0, f64::max);
    let mean_length = lengths.iter().sum::<f64>() / lengths.len() as f64;
    let measure_estimate = lengths.iter().map(|l| l * volume).sum();
    let norms: Vec<f64> = family.samples.iter().map(BundleMapSample::norm).collect();
    let mean_norm = norms.iter().sum::<f64>() / norms.len() as f64;
    let zero_locus_cells = norms.iter().filter(|&&n| n <= ZERO_TOL * mean_norm).count();
    Ok(AtomicityReport {
        grid: grid.shape().to_vec(),
        lengths,
        sup_length,
        mean_length,
        measure_estimate,
        total_volume: volume * grid.len() as f64,
        zero_locus_cells,
    })
}

/// Built-in closed-form families.
pub mod generators {
    use std::f64::consts::TAU;

    use num_complex::Complex64;

    use crate::error::Result;
    use crate::flow::BundleMapSample;
    use crate::kernel::ComplexMatrix;
    use crate::random::{gaussian_complex, stream_rng};

    /// Two fixed random complex `n x m` matrices drawn from `seed`.
    pub fn anchors(m: usize, n: usize, seed: u64) -> (ComplexMatrix, ComplexMatrix) {
        let mut rng = stream_rng(seed, 0);
        (gaussian_complex(&mut rng, n, m), gaussian_complex(&mut rng, n, m))
    }

    /// `alpha(x) = A0` everywhere.
    pub fn constant(a0: ComplexMatrix) -> impl Fn(&[f64]) -> Result<BundleMapSample> + Sync {
        move |_| BundleMapSample::complex(a0.clone())
    }

    /// `alpha(x) = sin(2 pi x0) (A0 + cos(2 pi x0) A1)`: vanishes at `x0 = 0` and `x0 = 1/2`.
    pub fn circle_two_zeros(a0: ComplexMatrix, a1: ComplexMatrix) -> impl Fn(&[f64]) -> Result<BundleMapSample> + Sync {
        move |x| {
            let phase = TAU * x[0];
            let m = (&a0 + &a1 * Complex64::new(phase.cos(), 0.0)) * Complex64::new(phase.sin(), 0.0);
            BundleMapSample::complex(m)
        }
    }

    /// `alpha(x) = e^{2 pi i x0} A0 + sin(2 pi x1) A1` on a 2-torus (x1 = 0 when nu = 1).
    pub fn torus_phase(a0: ComplexMatrix, a1: ComplexMatrix) -> impl Fn(&[f64]) -> Result<BundleMapSample> + Sync {
        move |x| {
            let phase = Complex64::from_polar(1.0, TAU * x[0]);
            let y = x.get(1).copied().unwrap_or(0.0);
            let m = &a0 * phase + &a1 * Complex64::new((TAU * y).sin(), 0.0);
            BundleMapSample::complex(m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::generators::*;
    use super::*;
    use crate::flow::flow_length;
    use crate::kernel::ComplexMatrix;
    use num_complex::Complex64;

    #[test]
    fn grid_geometry() {
        let g = BaseGrid::new(vec![4, 3]).unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(g.dim(), 2);
        assert!((g.cell_volume() - 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(g.coords(5), vec![0.25, 2.0 / 3.0]);
        assert!(BaseGrid::new(vec![]).is_err());
        assert!(BaseGrid::new(vec![1]).is_err());
    }

    #[test]
    fn constant_family_has_equal_lengths() {
        let (a0, _) = anchors(2, 2, 5);
        let family = build_family(BaseGrid::new(vec![6]).unwrap(), constant(a0.clone())).unwrap();
        let report = atomicity_report(&family).unwrap();
        let single = flow_length(&BundleMapSample::complex(a0).unwrap()).unwrap();
        assert!(report.lengths.iter().all(|&l| l == single));
        assert!((report.sup_length - report.mean_length).abs() < 1e-15);
        assert_eq!(report.zero_locus_cells, 0);
    }

    #[test]
    fn inconsistent_fibres_are_rejected() {
        let grid = BaseGrid::new(vec![4]).unwrap();
        let err = build_family(grid, |x| {
            let m = if x[0] == 0.5 { 3 } else { 2 };
            BundleMapSample::complex(ComplexMatrix::from_element(2, m, Complex64::new(1.0, 0.0)))
        })
        .unwrap_err();
        assert_eq!(
            err,
            Error::InconsistentFibers {
                index: 2,
                expected: (2, 2),
                found: (3, 2)
            }
        );
    }

    #[test]
    fn positive_rescaling_keeps_lengths() {
        let (a0, a1) = anchors(1, 2, 9);
        let family = build_family(BaseGrid::new(vec![16]).unwrap(), circle_two_zeros(a0, a1)).unwrap();
        let base = atomicity_report(&family).unwrap();
        let scaled = atomicity_report(&family.rescaled(|x| 0.1 + 5.0 * x[0] * x[0])).unwrap();
        for (a, b) in base.lengths.iter().zip(&scaled.lengths) {
            assert!((a - b).abs() <= 1e-7 * a.max(1.0));
        }
        assert_eq!(base.zero_locus_cells, 2);
        assert!(base.measure_estimate <= base.sup_length * base.total_volume + 1e-15);
    }
}
