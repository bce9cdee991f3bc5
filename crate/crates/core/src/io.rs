//! JSON input formats.
//!
//! Matrices are flattened row-major.
//!
//! - curve: `{"p": 2, "q": 1, "E": [...(p+q)*p], "D": [...]}`
//! - fibre map: `{"m": 1, "n": 2, "re": [...n*m], "im": [...n*m]}` or
//!   `{"real_debug": true, "p": 1, "q": 1, "A": [...q*p]}`
//! - family: `{"grid": [64], "samples": [<fibre map>, ...]}` or
//!   `{"grid": [64], "generator": {"name": "circle-two-zeros", "m": 2, "n": 2, "seed": 7}}`

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atomicity::{build_family, generators, BaseGrid, MapFamily};
use crate::curve::LinearCurve;
use crate::error::{Error, Result};
use crate::flow::{BundleMapSample, FiberMap};
use crate::kernel::{ComplexMatrix, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub p: usize,
    pub q: usize,
    #[serde(rename = "E")]
    pub e: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
}

fn matrix_from_row_major(rows: usize, cols: usize, data: &[f64], what: &str) -> Result<Matrix> {
    if data.len() != rows * cols {
        return Err(Error::InvalidInput(format!(
            "{what} needs {rows}x{cols} = {} entries, got {}",
            rows * cols,
            data.len()
        )));
    }
    Ok(Matrix::from_row_slice(rows, cols, data))
}

fn row_major(m: &Matrix) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}

impl CurveSpec {
    pub fn to_curve(&self) -> Result<LinearCurve> {
        let n = self.p + self.q;
        let e = matrix_from_row_major(n, self.p, &self.e, "E")?;
        let d = matrix_from_row_major(n, self.p, &self.d, "D")?;
        LinearCurve::new(e, d)
    }

    pub fn from_curve(c: &LinearCurve) -> Self {
        Self {
            p: c.dim(),
            q: c.codim(),
            e: row_major(c.base()),
            d: row_major(c.derivative()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleSpec {
    RealDebug {
        real_debug: bool,
        p: usize,
        q: usize,
        #[serde(rename = "A")]
        a: Vec<f64>,
    },
    Complex {
        m: usize,
        n: usize,
        re: Vec<f64>,
        im: Vec<f64>,
    },
}

impl SampleSpec {
    pub fn to_sample(&self) -> Result<BundleMapSample> {
        match self {
            Self::RealDebug { real_debug, p, q, a } => {
                if !real_debug {
                    return Err(Error::InvalidInput("real maps require \"real_debug\": true".into()));
                }
                BundleMapSample::real_debug(matrix_from_row_major(*q, *p, a, "A")?)
            }
            Self::Complex { m, n, re, im } => {
                let re = matrix_from_row_major(*n, *m, re, "re")?;
                let im = matrix_from_row_major(*n, *m, im, "im")?;
                let a = ComplexMatrix::from_fn(*n, *m, |i, j| Complex64::new(re[(i, j)], im[(i, j)]));
                BundleMapSample::complex(a)
            }
        }
    }

    pub fn from_sample(s: &BundleMapSample) -> Self {
        match s.map() {
            FiberMap::Real(a) => Self::RealDebug {
                real_debug: true,
                p: a.ncols(),
                q: a.nrows(),
                a: row_major(a),
            },
            FiberMap::Complex(a) => Self::Complex {
                m: a.ncols(),
                n: a.nrows(),
                re: row_major(&a.map(|z| z.re)),
                im: row_major(&a.map(|z| z.im)),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilySpec {
    Inline { grid: Vec<usize>, samples: Vec<SampleSpec> },
    Generated { grid: Vec<usize>, generator: GeneratorSpec },
}

/// Names accepted in `GeneratorSpec::name`.
pub const GENERATOR_NAMES: [&str; 3] = ["constant", "circle-two-zeros", "torus-phase"];

impl FamilySpec {
    pub fn grid(&self) -> &[usize] {
        match self {
            Self::Inline { grid, .. } | Self::Generated { grid, .. } => grid,
        }
    }

    /// Build the family, optionally overriding the grid shape.
    pub fn to_family(&self, grid_override: Option<Vec<usize>>) -> Result<MapFamily> {
        let grid = BaseGrid::new(grid_override.unwrap_or_else(|| self.grid().to_vec()))?;
        match self {
            Self::Inline { samples, .. } => {
                if grid.shape() != self.grid() {
                    return Err(Error::InvalidInput("cannot regrid an inline family".into()));
                }
                let samples = samples.iter().map(SampleSpec::to_sample).collect::<Result<Vec<_>>>()?;
                MapFamily::from_samples(grid, samples)
            }
            Self::Generated { generator, .. } => {
                if generator.m == 0 || generator.n == 0 {
                    return Err(Error::InvalidInput("generator dimensions must be positive".into()));
                }
                let (a0, a1) = generators::anchors(generator.m, generator.n, generator.seed);
                match generator.name.as_str() {
                    "constant" => build_family(grid, generators::constant(a0)),
                    "circle-two-zeros" => build_family(grid, generators::circle_two_zeros(a0, a1)),
                    "torus-phase" => build_family(grid, generators::torus_phase(a0, a1)),
                    other => Err(Error::InvalidInput(format!(
                        "unknown generator {other:?}; expected one of {GENERATOR_NAMES:?}"
                    ))),
                }
            }
        }
    }
}

pub fn parse_curve(text: &str) -> Result<LinearCurve> {
    let parsed: CurveSpec = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
    parsed.to_curve()
}

pub fn parse_sample(text: &str) -> Result<BundleMapSample> {
    let parsed: SampleSpec = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
    parsed.to_sample()
}

pub fn parse_family(text: &str) -> Result<FamilySpec> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_curve, stream_rng};

    #[test]
    fn curve_spec_round_trips() {
        let mut rng = stream_rng(81, 0);
        let c = random_curve(&mut rng, 2, 3);
        let text = serde_json::to_string(&CurveSpec::from_curve(&c)).unwrap();
        assert_eq!(parse_curve(&text).unwrap(), c);
    }

    #[test]
    fn row_major_layout() {
        let c = parse_curve(r#"{"p": 1, "q": 2, "E": [1, 0, 0], "D": [0, 2, 3]}"#).unwrap();
        assert_eq!(c.derivative()[(1, 0)], 2.0);
        let s = parse_sample(r#"{"m": 2, "n": 1, "re": [1, 2], "im": [0, -1]}"#).unwrap();
        match s.map() {
            FiberMap::Complex(a) => assert_eq!(a[(0, 1)], Complex64::new(2.0, -1.0)),
            _ => panic!("expected complex"),
        }
        let r = parse_sample(r#"{"real_debug": true, "p": 2, "q": 1, "A": [7, 8]}"#).unwrap();
        assert_eq!(r.real()[(0, 1)], 8.0);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(parse_curve(r#"{"p": 1, "q": 1, "E": [1], "D": [0, 1]}"#).is_err());
        assert!(parse_curve(r#"{"p": 1, "q": 1, "E": [0, 0], "D": [0, 1]}"#).is_err());
        assert!(parse_sample(r#"{"m": 1, "n": 1, "re": [1]}"#).is_err());
        let fam = parse_family(r#"{"grid": [8], "generator": {"name": "nope", "m": 1, "n": 1}}"#).unwrap();
        assert!(fam.to_family(None).is_err());
    }

    #[test]
    fn generated_family_builds() {
        let fam = parse_family(r#"{"grid": [8], "generator": {"name": "circle-two-zeros", "m": 1, "n": 2, "seed": 3}}"#)
            .unwrap();
        let family = fam.to_family(None).unwrap();
        assert_eq!(family.samples().len(), 8);
        assert_eq!(family.samples()[0].fiber_dims(), (1, 2));
        assert_eq!(fam.to_family(Some(vec![16])).unwrap().samples().len(), 16);
    }
}
