use serde::Serialize;

use crate::error::{Error, Result};

use super::{LinearCurve, MonotonicityReport, PartitionReport, SPEED_FLOOR};

/// Grid size for the per-interval monotonicity checks.
const MONO_GRID: usize = 200;

/// Number of speed/curvature probes along the curve.
const PROBES: usize = 33;

/// Diagnostics for one curve.
#[derive(Debug, Clone, Serialize)]
pub struct CurveReport {
    pub p: usize,
    pub q: usize,
    pub total_length: f64,
    pub max_speed: f64,
    /// `None` when no probe had speed above the floor.
    pub max_curvature: Option<f64>,
    pub partition: PartitionReport,
    pub monotonicity: Vec<MonotonicityReport>,
}

impl LinearCurve {
    pub fn analyze(&self) -> Result<CurveReport> {
        self.analyze_with(super::LENGTH_TOL, super::ROOT_MERGE_TOL)
    }

    /// [`analyze`](Self::analyze) with explicit length and root-merge tolerances.
    pub fn analyze_with(&self, length_tol: f64, root_tol: f64) -> Result<CurveReport> {
        let charts = self.charts()?;
        let total_length = charts.total_length(length_tol)?;
        let partition = self.partition_with_tol(root_tol)?;
        let scale = charts.scale();

        let mut max_speed = 0.0f64;
        let mut max_curvature: Option<f64> = None;
        if scale > 0.0 {
            for k in 0..PROBES {
                let theta = -1.5 + 3.0 * k as f64 / (PROBES - 1) as f64;
                let t = theta.tan() / scale;
                let speed = self.speed_at(t)?.speed;
                max_speed = max_speed.max(speed);
                if speed > SPEED_FLOOR {
                    match self.curvature_at(t) {
                        Ok(k) => max_curvature = Some(max_curvature.map_or(k, |m: f64| m.max(k))),
                        Err(Error::ZeroSpeed) => {}
                        Err(other) => return Err(other),
                    }
                }
            }
        }

        let monotonicity = self.check_partition_monotone(&partition, MONO_GRID)?;

        Ok(CurveReport {
            p: self.dim(),
            q: self.codim(),
            total_length,
            max_speed,
            max_curvature,
            partition,
            monotonicity,
        })
    }
}
