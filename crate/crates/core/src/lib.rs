//! Mesh fairing with the discrete log-aesthetic surface filter.
//!
//! The crate covers discrete Gaussian curvature on triangle meshes, planar
//! log-aesthetic curves and their diagnostics, the surface energies used to
//! judge a fairing result, and the filter itself.

pub mod curvature;
pub mod curve;
pub mod filter;
pub mod functionals;
pub mod mesh;

pub use curvature::{gaussian_curvature_field, VertexCurvature};
pub use curve::{CurveError, LaCurveParams, Polyline2D, QuadConfig};
pub use filter::{
    filter, filter_step, BoundaryPolicy, CurvaturePlane, FilterConfig, FilterError, RunReport,
    StepReport, UpdateStatus, VertexUpdate,
};
pub use functionals::{EnergyReport, GridField};
pub use mesh::{MeshError, MeshKind, ScalarField, TriangleMesh, VertexRing};
