//! Linear curves of subspaces in Grassmann manifolds.
//!
//! A linear curve is `V(t) = span(e_i + t d_i)` in the Grassmannian of
//! `p`-planes in `R^(p+q)`. This crate computes their speed, geodesic
//! curvature, partitions by the determinant polynomial, and lengths over the
//! whole parameter line. The multiplicative-flow trajectories of graphs of
//! bundle maps are linear curves; [`atomicity`] turns uniform bounds on their
//! lengths into a certificate over a discretized base.
//!
//! Module map:
//! - [`kernel`]: QR, polar decomposition, skew exponential, polynomial roots, realification
//! - [`grassmann`]: points, principal angles, both metrics, two geodesic constructions
//! - [`curve`]: linear curves and everything measured along them
//! - [`flow`]: graph trajectories of fibre maps
//! - [`atomicity`]: families over a flat-torus base
//! - [`io`]: JSON input formats
//! - [`verify`]: the property suite behind the `verify` command

pub mod atomicity;
pub mod curve;
pub mod error;
pub mod flow;
pub mod grassmann;
pub mod io;
pub mod kernel;
pub mod quadrature;
pub mod random;
pub mod verify;

pub use atomicity::{atomicity_report, atomicity_report_with_tol, build_family, AtomicityReport, BaseGrid, MapFamily};
pub use curve::{CurveReport, LinearCurve, PartitionReport};
pub use error::{Error, Result};
pub use flow::{flow_ensemble, flow_length, flow_length_with_tol, graph_point, FlowEnsemble, trajectory, BundleMapSample, FlowTrajectory};
pub use grassmann::{
    angle_metric, geodesic_closed_form, geodesic_distance, geodesic_via_exp, principal_angles, GrassTangent,
    GrassmannPoint, PrincipalAngles,
};
pub use kernel::{ComplexMatrix, Matrix, PolyCoeffs};
