//! Property suite behind the `verify` command.
//!
//! Every property draws its random inputs from its own counter-based stream
//! family (`stream = property << 32 | index`), evaluates the ensemble in
//! parallel and reduces in index order, so a summary depends only on the
//! configuration. Timings are deliberately not part of the output.

use std::f64::consts::FRAC_PI_2;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::atomicity::{atomicity_report, build_family, generators, BaseGrid};
use crate::curve::{LinearCurve, MONO_TOL};
use crate::error::Result;
use crate::flow::{flow_length, trajectory, BundleMapSample};
use crate::grassmann::{angle_metric, geodesic_closed_form, geodesic_distance, geodesic_via_exp, GrassmannPoint};
use crate::kernel::{orthonormality_defect, singular_values, skew_exp, ComplexMatrix, Matrix};
use crate::random::{
    gaussian_complex, gaussian_matrix, random_curve, random_graph_curve, random_point, random_tangent,
    random_unitary, stream_rng, Rng, DEFAULT_SEED,
};

pub const SPEED_REL_TOL: f64 = 1e-6;
pub const GEODESIC_TOL: f64 = 1e-10;
pub const SCALAR_FLOW_TOL: f64 = 1e-6;
pub const SCALE_REL_TOL: f64 = 1e-7;
pub const BOUND_STABILITY_TOL: f64 = 0.02;
pub const RESIDUAL_TOL: f64 = 1e-6;
pub const CURVATURE_GAP_TOL: f64 = 0.01;
/// Denominator floor for the curvature gap: below it the gap is absolute.
pub const CURVATURE_FLOOR: f64 = 1e-2;
pub const PLANAR_CURVATURE_TOL: f64 = 1e-4;
pub const REFINEMENT_TOL: f64 = 0.02;
pub const METRIC_SLACK: f64 = 1e-10;
/// Absolute gap between the large-`t` probe angle and its closed form.
pub const PROBE_TOL: f64 = 1e-9;

/// Sizes of every ensemble in the suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Largest `p` and `q` drawn where a property allows free dimensions.
    pub max_dim: usize,
    pub speed_curves: usize,
    pub geodesic_samples: usize,
    pub scale_maps: usize,
    /// The bound is compared between the first `bound_maps / 2` and all `bound_maps` draws.
    pub bound_maps: usize,
    pub partition_curves: usize,
    pub curvature_curves: usize,
    pub curvature_params: usize,
    pub atomicity_grid: usize,
    pub metric_triples: usize,
    pub extra_samples: usize,
}

impl SuiteConfig {
    pub fn full(seed: u64, max_dim: usize) -> Self {
        Self {
            seed,
            max_dim,
            speed_curves: 1000,
            geodesic_samples: 1000,
            scale_maps: 100,
            bound_maps: 10_000,
            partition_curves: 500,
            curvature_curves: 200,
            curvature_params: 10,
            atomicity_grid: 64,
            metric_triples: 1000,
            extra_samples: 100,
        }
    }

    /// Ensembles cut roughly tenfold, for smoke tests.
    pub fn reduced(seed: u64, max_dim: usize) -> Self {
        Self {
            speed_curves: 100,
            geodesic_samples: 100,
            scale_maps: 10,
            bound_maps: 400,
            partition_curves: 50,
            curvature_curves: 20,
            atomicity_grid: 32,
            metric_triples: 100,
            extra_samples: 20,
            ..Self::full(seed, max_dim)
        }
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self::full(DEFAULT_SEED, 6)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// One measured quantity against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound: Bound::AtMost,
            tolerance,
            passed: measured <= tolerance,
        }
    }

    pub fn at_least(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound: Bound::AtLeast,
            tolerance,
            passed: measured >= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub id: String,
    /// Acceptance criterion number, when the property is one.
    pub criterion: Option<u32>,
    pub samples: usize,
    pub checks: Vec<Check>,
    /// Set when a computation failed; the property then fails.
    pub error: Option<String>,
    pub passed: bool,
}

impl PropertyOutcome {
    fn new(id: &str, criterion: Option<u32>, samples: usize, result: Result<Vec<Check>>) -> Self {
        let (checks, error) = match result {
            Ok(checks) => (checks, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let passed = error.is_none() && checks.iter().all(|c| c.passed);
        Self {
            id: id.into(),
            criterion,
            samples,
            checks,
            error,
            passed,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub config: SuiteConfig,
    pub properties: Vec<PropertyOutcome>,
    pub all_passed: bool,
}

pub type Property = fn(&SuiteConfig) -> PropertyOutcome;

/// Every property in suite order.
pub const PROPERTIES: [(&str, Property); 15] = [
    ("speed_identity", speed_identity),
    ("geodesic_cross_construction", geodesic_cross_construction),
    ("scalar_flow_length", scalar_flow_length),
    ("flow_scale_invariance", flow_scale_invariance),
    ("uniform_bound_stability", uniform_bound_stability),
    ("partition_monotonicity", partition_monotonicity),
    ("curvature_limit", curvature_limit),
    ("atomicity_circle", atomicity_circle),
    ("metric_axioms", metric_axioms),
    ("skew_exp_orthogonal", skew_exp_orthogonal),
    ("flow_unitary_invariance", flow_unitary_invariance),
    ("large_t_probe", large_t_probe),
    ("length_reparametrization", length_reparametrization),
    ("flow_limit_approach", flow_limit_approach),
    ("monotone_horizon", monotone_horizon),
];

pub fn run_suite(cfg: &SuiteConfig) -> SuiteSummary {
    let properties: Vec<PropertyOutcome> = PROPERTIES.iter().map(|(_, f)| f(cfg)).collect();
    let all_passed = properties.iter().all(|p| p.passed);
    SuiteSummary {
        config: cfg.clone(),
        properties,
        all_passed,
    }
}

fn rng_for(cfg: &SuiteConfig, property: u64, index: usize) -> Rng {
    stream_rng(cfg.seed, (property << 32) | index as u64)
}

/// Evaluate `f` on `n` indexed draws in parallel; results in index order.
fn ensemble<T, F>(cfg: &SuiteConfig, property: u64, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut Rng) -> Result<T> + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| f(&mut rng_for(cfg, property, i)))
        .collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn dims(rng: &mut Rng, max: usize) -> (usize, usize) {
    (rng.gen_range(1..=max), rng.gen_range(1..=max))
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Central difference quotient of `geodesic_distance` around `t`,
/// Richardson-extrapolated over steps `h` and `h / 2`.
///
/// `dist(V(t - h), V(t + h)) / 2h = |V'(t)| + c h^2 + O(h^4)`.
pub fn fd_speed(curve: &LinearCurve, t: f64, h: f64) -> Result<f64> {
    let quotient = |h: f64| -> Result<f64> {
        Ok(geodesic_distance(&curve.point_at(t - h)?, &curve.point_at(t + h)?)? / (2.0 * h))
    };
    let coarse = quotient(h)?;
    let fine = quotient(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Closed-form speed at `t = 0` against [`fd_speed`], for random curves with
/// orthonormal `E`.
pub fn speed_identity(cfg: &SuiteConfig) -> PropertyOutcome {
    let result = ensemble(cfg, 1, cfg.speed_curves, |rng| {
        let (p, q) = dims(rng, cfg.max_dim);
        let c = random_curve(rng, p, q);
        let speed = c.speed_at(0.0)?.speed;
        let fd = fd_speed(&c, 0.0, 1e-2 / c.derivative().norm())?;
        Ok(rel_diff(speed, fd))
    })
    .map(|gaps| vec![Check::at_most("max_relative_gap", max_of(gaps), SPEED_REL_TOL)]);
    PropertyOutcome::new("speed_identity", Some(1), cfg.speed_curves, result)
}

/// Closed-form (SVD) geodesics against the exponential of the skew lift.
pub fn geodesic_cross_construction(cfg: &SuiteConfig) -> PropertyOutcome {
    let result = ensemble(cfg, 2, cfg.geodesic_samples, |rng| {
        let (p, q) = dims(rng, cfg.max_dim);
        let v = random_point(rng, p, q);
        let delta = random_tangent(rng, &v);
        let t = rng.gen_range(0.0..=2.0);
        let a = geodesic_closed_form(&v, &delta, t)?;
        let b = geodesic_via_exp(&v, &delta, t)?;
        angle_metric(&a, &b)
    })
    .map(|gaps| vec![Check::at_most("max_angle_gap", max_of(gaps), GEODESIC_TOL)]);
    PropertyOutcome::new("geodesic_cross_construction", Some(2), cfg.geodesic_samples, result)
}

/// Real scalar maps trace a quarter turn of the projective line.
pub fn scalar_flow_length(_cfg: &SuiteConfig) -> PropertyOutcome {
    let values = [1e-3, 1.0, 1e3];
    let result = values
        .iter()
        .map(|&a| {
            let s = BundleMapSample::real_debug(Matrix::from_element(1, 1, a))?;
            Ok((flow_length(&s)? - FRAC_PI_2).abs())
        })
        .collect::<Result<Vec<f64>>>()
        .map(|gaps| vec![Check::at_most("max_abs_gap", max_of(gaps), SCALAR_FLOW_TOL)]);
    PropertyOutcome::new("scalar_flow_length", Some(3), values.len(), result)
}

const SCALES: [f64; 5] = [1e-6, 1e-2, 1.0, 1e2, 1e6];

pub fn flow_scale_invariance(cfg: &SuiteConfig) -> PropertyOutcome {
    let cap = cfg.max_dim.min(3);
    let result = ensemble(cfg, 4, cfg.scale_maps, |rng| {
        let (m, n) = dims(rng, cap);
        let s = BundleMapSample::complex(gaussian_complex(rng, n, m))?;
        let base = flow_length(&s)?;
        let mut worst = 0.0f64;
        for lambda in SCALES {
            worst = worst.max(rel_diff(flow_length(&s.scaled(lambda))?, base));
        }
        Ok(worst)
    })
    .map(|gaps| vec![Check::at_most("max_relative_gap", max_of(gaps), SCALE_REL_TOL)]);
    PropertyOutcome::new("flow_scale_invariance", Some(4), cfg.scale_maps, result)
}

/// Fibre dimensions of the uniform-bound ensemble.
pub const BOUND_DIMS: (usize, usize) = (2, 2);

/// Ensemble maximum of flow lengths at the first half and the whole of the draws.
pub fn uniform_bound_stability(cfg: &SuiteConfig) -> PropertyOutcome {
    let (m, n) = BOUND_DIMS;
    let half = cfg.bound_maps / 2;
    let result = ensemble(cfg, 5, cfg.bound_maps, |rng| {
        flow_length(&BundleMapSample::complex(gaussian_complex(rng, n, m))?)
    })
    .map(|lengths| {
        let sup_half = max_of(lengths[..half].iter().copied());
        let sup_full = max_of(lengths.iter().copied());
        let min_full = lengths.iter().copied().fold(f64::INFINITY, f64::min);
        vec![
            Check::at_most("sup_relative_change", rel_diff(sup_full, sup_half), BOUND_STABILITY_TOL),
            Check::at_most("sup_length", sup_full, (2 * m) as f64 * FRAC_PI_2),
            Check::at_least("min_length", min_full, 0.0),
        ]
    });
    PropertyOutcome::new("uniform_bound_stability", Some(5), cfg.bound_maps, result)
}

/// `V(t) = span(e + t d)` with `e = (1, 0)`, `d = (1, 1)`: root at `t = -1`.
pub fn cross_root_counterexample() -> LinearCurve {
    LinearCurve::new(
        Matrix::from_column_slice(2, 1, &[1.0, 0.0]),
        Matrix::from_column_slice(2, 1, &[1.0, 1.0]),
    )
    .expect("full rank")
}

const MONO_GRID: usize = 200;

/// Partition root checks plus the monotonicity claim in two readings:
/// intervals of the base partition, and the roots of the polynomial
/// recentered at each representative `s`. Lines (`p = 1`) are reported
/// separately because the recentered reading is exact for them.
pub fn partition_monotonicity(cfg: &SuiteConfig) -> PropertyOutcome {
    let cap = cfg.max_dim.min(3);
    let result = ensemble(cfg, 6, cfg.partition_curves, |rng| {
        let (p, q) = dims(rng, cap);
        let c = random_curve(rng, p, q);
        let part = c.partition()?;
        let excess_roots = part.roots.len() as f64 - p as f64;
        let reports = c.check_partition_monotone(&part, MONO_GRID)?;
        let base = reports.iter().map(|r| r.max_violation()).fold(0.0, f64::max);
        let mut local = 0.0f64;
        for r in &reports {
            let interval = c.local_partition_interval(r.s)?;
            local = local.max(c.scan_sides(r.s, interval, MONO_GRID)?.max_violation());
        }
        let line = if p == 1 { local } else { 0.0 };
        Ok([excess_roots, part.max_residual(), base, local, line])
    })
    .and_then(|rows| {
        let col = |j: usize| max_of(rows.iter().map(|r| r[j]));
        let crossing = cross_root_counterexample().scan_monotonicity(0.0, -2.0, MONO_GRID)?;
        Ok(vec![
            Check::at_most("roots_minus_dim", col(0), 0.0),
            Check::at_most("max_root_residual", col(1), RESIDUAL_TOL),
            Check::at_most("max_violation_base_partition", col(2), MONO_TOL),
            Check::at_most("max_violation_recentered", col(3), MONO_TOL),
            Check::at_most("max_violation_lines", col(4), MONO_TOL),
            Check::at_least("counterexample_violation", crossing, MONO_TOL),
        ])
    });
    PropertyOutcome::new("partition_monotonicity", Some(6), cfg.partition_curves, result)
}

/// `phi_s` is monotone across [`LinearCurve::monotone_horizon`] for random
/// curves and random `s`.
pub fn monotone_horizon(cfg: &SuiteConfig) -> PropertyOutcome {
    let cap = cfg.max_dim.min(3);
    let result = ensemble(cfg, 15, cfg.partition_curves, |rng| {
        let (p, q) = dims(rng, cap);
        let c = random_curve(rng, p, q);
        let s = rng.gen_range(-2.0..2.0);
        Ok(c.check_horizon_monotone(s, MONO_GRID)?.max_violation())
    })
    .map(|v| vec![Check::at_most("max_violation", max_of(v), MONO_TOL)]);
    PropertyOutcome::new("monotone_horizon", None, cfg.partition_curves, result)
}

/// Parameters `tan(theta) / |A|` for `theta` evenly spaced in `(-1.4, 1.4)`.
fn curvature_params(curve: &LinearCurve, count: usize) -> Vec<f64> {
    let scale = curve.derivative().norm().max(f64::MIN_POSITIVE);
    (0..count)
        .map(|k| {
            let theta = -1.4 + 2.8 * (k as f64 + 0.5) / count as f64;
            theta.tan() / scale
        })
        .collect()
}

pub fn curvature_limit(cfg: &SuiteConfig) -> PropertyOutcome {
    let cap = cfg.max_dim.min(3);
    let arc = crate::curve::CURVATURE_ARC_STEP;
    let gaps = ensemble(cfg, 7, cfg.curvature_curves, |rng| {
        let (p, q) = dims(rng, cap);
        let c = random_graph_curve(rng, p, q);
        let mut worst = 0.0f64;
        for t in curvature_params(&c, cfg.curvature_params) {
            worst = worst.max(c.curvature_estimates(t, arc)?.relative_gap(CURVATURE_FLOOR));
        }
        Ok(worst)
    });
    let planar = ensemble(cfg, (7 << 8) | 1, cfg.curvature_curves, |rng| {
        let c = random_curve(rng, 1, 1);
        let mut worst = 0.0f64;
        for t in curvature_params(&c, cfg.curvature_params) {
            worst = worst.max(c.curvature_at(t)?.abs());
        }
        Ok(worst)
    });
    let result = gaps.and_then(|g| {
        Ok(vec![
            Check::at_most("max_relative_gap", max_of(g), CURVATURE_GAP_TOL),
            Check::at_most("planar_max_curvature", max_of(planar?), PLANAR_CURVATURE_TOL),
        ])
    });
    PropertyOutcome::new("curvature_limit", Some(7), cfg.curvature_curves, result)
}

/// Fibre dimensions and anchor seed of the circle family.
pub const CIRCLE_DIMS: (usize, usize) = (2, 2);

/// Positive weight with a wide dynamic range, used to rescale a family pointwise.
fn rescaling_weight(x: &[f64]) -> f64 {
    10f64.powf(6.0 * (std::f64::consts::TAU * x[0]).cos())
}

pub fn atomicity_circle(cfg: &SuiteConfig) -> PropertyOutcome {
    let (m, n) = CIRCLE_DIMS;
    let result = (|| {
        let (a0, a1) = generators::anchors(m, n, cfg.seed);
        let generator = generators::circle_two_zeros(a0.clone(), a1.clone());
        let coarse_grid = BaseGrid::new(vec![cfg.atomicity_grid])?;
        let coarse = build_family(coarse_grid.clone(), &generator)?;
        let fine = build_family(coarse_grid.refined(2), &generator)?;
        let coarse_report = atomicity_report(&coarse)?;
        let fine_report = atomicity_report(&fine)?;
        let rescaled = atomicity_report(&coarse.rescaled(rescaling_weight))?;
        let rescale_gap = max_of(
            coarse_report
                .lengths
                .iter()
                .zip(&rescaled.lengths)
                .map(|(&a, &b)| rel_diff(a, b)),
        );

        // Lengths on shrinking neighbourhoods of the zero at x = 0.
        let near: Vec<f64> = (1..=8)
            .map(|k| flow_length(&generator(&[10f64.powi(-k)])?))
            .collect::<Result<_>>()?;
        let sup_near_coarse = max_of(near[..4].iter().copied());
        let sup_near_all = max_of(near.iter().copied());

        let p = 2 * m;
        Ok(vec![
            Check::at_most("sup_length", fine_report.sup_length, p as f64 * FRAC_PI_2),
            Check::at_most(
                "refinement_relative_change",
                rel_diff(fine_report.measure_estimate, coarse_report.measure_estimate),
                REFINEMENT_TOL,
            ),
            Check::at_most("rescaling_relative_gap", rescale_gap, SCALE_REL_TOL),
            Check::at_most("near_zero_sup_change", rel_diff(sup_near_all, sup_near_coarse), REFINEMENT_TOL),
        ])
    })();
    PropertyOutcome::new("atomicity_circle", Some(8), 2 * cfg.atomicity_grid, result)
}

type Metric = fn(&GrassmannPoint, &GrassmannPoint) -> Result<f64>;

pub fn metric_axioms(cfg: &SuiteConfig) -> PropertyOutcome {
    let metrics: [(&str, Metric); 2] = [("geodesic", geodesic_distance), ("angle", angle_metric)];
    let result = ensemble(cfg, 9, cfg.metric_triples, |rng| {
        let (p, q) = dims(rng, cfg.max_dim);
        let a = random_point(rng, p, q);
        let b = random_point(rng, p, q);
        let c = random_point(rng, p, q);
        let mut row = Vec::with_capacity(8);
        for (_, d) in metrics {
            let ab = d(&a, &b)?;
            row.push((ab - d(&b, &a)?).abs());
            row.push(d(&a, &a)?.max(d(&b, &b)?));
            row.push(d(&a, &c)? - ab - d(&b, &c)?);
            row.push(ab);
        }
        Ok(row)
    })
    .map(|rows| {
        let col = |j: usize| rows.iter().map(move |r| r[j]);
        let mut checks = Vec::new();
        for (k, (name, _)) in metrics.iter().enumerate() {
            let o = 4 * k;
            checks.push(Check::at_most(&format!("{name}_symmetry"), max_of(col(o)), METRIC_SLACK));
            checks.push(Check::at_most(&format!("{name}_identity"), max_of(col(o + 1)), METRIC_SLACK));
            checks.push(Check::at_most(&format!("{name}_triangle_excess"), max_of(col(o + 2)), METRIC_SLACK));
            let min_sep = col(o + 3).fold(f64::INFINITY, f64::min);
            checks.push(Check::at_least(&format!("{name}_min_separation"), min_sep, METRIC_SLACK));
        }
        checks
    });
    PropertyOutcome::new("metric_axioms", Some(9), cfg.metric_triples, result)
}

pub fn skew_exp_orthogonal(cfg: &SuiteConfig) -> PropertyOutcome {
    let result = ensemble(cfg, 10, cfg.extra_samples, |rng| {
        let n = rng.gen_range(1..=2 * cfg.max_dim);
        let g = gaussian_matrix(rng, n, n);
        let q = skew_exp(&(&g - g.transpose()))?;
        Ok(orthonormality_defect(&q))
    })
    .map(|d| vec![Check::at_most("max_defect", max_of(d), 1e-12)]);
    PropertyOutcome::new("skew_exp_orthogonal", None, cfg.extra_samples, result)
}

fn unitary_pair(rng: &mut Rng, n: usize, m: usize) -> (ComplexMatrix, ComplexMatrix) {
    (random_unitary(rng, n), random_unitary(rng, m))
}

/// `flow_length(U A W) = flow_length(A)` for unitary `U`, `W`.
pub fn flow_unitary_invariance(cfg: &SuiteConfig) -> PropertyOutcome {
    let cap = cfg.max_dim.min(3);
    let result = ensemble(cfg, 11, cfg.extra_samples, |rng| {
        let (m, n) = dims(rng, cap);
        let a = gaussian_complex(rng, n, m);
        let (u, w) = unitary_pair(rng, n, m);
        let base = flow_length(&BundleMapSample::complex(a.clone())?)?;
        let turned = flow_length(&BundleMapSample::complex(&u * a * w)?)?;
        Ok(rel_diff(base, turned))
    })
    .map(|g| vec![Check::at_most("max_relative_gap", max_of(g), SCALE_REL_TOL)]);
    PropertyOutcome::new("flow_unitary_invariance", None, cfg.extra_samples, result)
}

/// Probe parameter for the large-`t` limit.
pub const PROBE_T: f64 = 1e6;

/// Low-rank maps: at `t = 1e6` the curve sits at angle `atan(1 / (t sigma_r))`
/// from `ker + im`, `sigma_r` the smallest nonzero singular value.
pub fn large_t_probe(cfg: &SuiteConfig) -> PropertyOutcome {
    let cap = cfg.max_dim.min(3);
    let result = ensemble(cfg, 12, cfg.extra_samples, |rng| {
        let (m, n) = dims(rng, cap);
        let r = rng.gen_range(0..=m.min(n));
        let a = gaussian_complex(rng, n, r) * gaussian_complex(rng, r, m);
        let sample = BundleMapSample::complex(a)?;
        let traj = trajectory(&sample);
        let angle = angle_metric(&traj.curve.point_at(PROBE_T)?, &traj.limit_infty)?;
        let sv = singular_values(sample.real())?;
        let largest = sv.first().copied().unwrap_or(0.0);
        let smallest_nonzero = sv
            .iter()
            .copied()
            .filter(|&x| x > crate::kernel::RANK_TOL * largest)
            .fold(f64::INFINITY, f64::min);
        // atan(0) = 0 covers the zero map
        let want = (1.0 / (PROBE_T * smallest_nonzero)).atan();
        Ok(((angle - want).abs(), angle))
    })
    .map(|rows| {
        vec![
            Check::at_most("max_gap", max_of(rows.iter().map(|r| r.0)), PROBE_TOL),
            Check::at_most("max_angle", max_of(rows.iter().map(|r| r.1)), std::f64::consts::FRAC_PI_2),
        ]
    });
    PropertyOutcome::new("large_t_probe", None, cfg.extra_samples, result)
}

/// Length over `[a, b]` is unchanged by re-basing `E, D -> E M, D M` and by
/// `D -> lambda D` on `[a / lambda, b / lambda]`.
pub fn length_reparametrization(cfg: &SuiteConfig) -> PropertyOutcome {
    let result = ensemble(cfg, 13, cfg.extra_samples, |rng| {
        let (p, q) = dims(rng, cfg.max_dim);
        let c = random_curve(rng, p, q);
        let a = rng.gen_range(-2.0..0.0);
        let b = rng.gen_range(0.0..2.0);
        let lambda: f64 = 10f64.powf(rng.gen_range(-3.0..3.0));
        let base = c.length(a, b)?;
        let m = gaussian_matrix(rng, p, p) + Matrix::identity(p, p) * (p as f64);
        let rebased = c.right_multiplied(&m)?.length(a, b)?;
        let stretched = c.with_scaled_derivative(lambda).length(a / lambda, b / lambda)?;
        Ok(rel_diff(base, rebased).max(rel_diff(base, stretched)))
    })
    .map(|g| vec![Check::at_most("max_relative_gap", max_of(g), SCALE_REL_TOL)]);
    PropertyOutcome::new("length_reparametrization", None, cfg.extra_samples, result)
}

/// Past the largest partition root, `dist(graph(t A), ker + im)` decreases.
pub fn flow_limit_approach(cfg: &SuiteConfig) -> PropertyOutcome {
    let cap = cfg.max_dim.min(3);
    let result = ensemble(cfg, 14, cfg.extra_samples, |rng| {
        let (m, n) = dims(rng, cap);
        let s = BundleMapSample::complex(gaussian_complex(rng, n, m))?;
        let traj = trajectory(&s);
        let charts = traj.curve.charts()?;
        let scale = charts.scale();
        if scale == 0.0 {
            return Ok(0.0);
        }
        let mut last = f64::INFINITY;
        let mut worst = 0.0f64;
        for k in 0..=64 {
            let t = 10f64.powf(-3.0 + 9.0 * k as f64 / 64.0) / scale;
            let d = geodesic_distance(&charts.point(t)?, &traj.limit_infty)?;
            worst = worst.max(d - last);
            last = d;
        }
        Ok(worst)
    })
    .map(|g| vec![Check::at_most("max_increase", max_of(g), METRIC_SLACK)]);
    PropertyOutcome::new("flow_limit_approach", None, cfg.extra_samples, result)
}

impl std::fmt::Display for PropertyOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", if self.passed { "PASS" } else { "FAIL" }, self.id)?;
        for c in &self.checks {
            let op = match c.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            write!(f, " | {} = {:.3e} {op} {:.1e}", c.name, c.measured, c.tolerance)?;
        }
        if let Some(e) = &self.error {
            write!(f, " | error: {e}")?;
        }
        Ok(())
    }
}
