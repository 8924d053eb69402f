//! Discrete log-aesthetic surface filter.
//!
//! Each step computes the Gaussian curvature field once, fits a plane
//! `K = c0 s + c1 t + c2` to the curvature around every vertex, and moves the
//! vertex to `P_ic + phi N` where `P_ic` is its neighbor centroid and `phi`
//! makes its curvature equal the plane value `c2`. All vertices are solved
//! against the same input mesh and committed together, so the result does
//! not depend on processing order or thread count.

mod plane;
mod probe;

use std::time::Instant;

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{gaussian_curvature_field, vertex_normal};
use crate::mesh::{MeshError, ScalarField, TriangleMesh};

pub use plane::{fit_curvature_plane, fit_samples, tangent_frame, CurvaturePlane};
pub use probe::{curvature_at_offset, neighbor_centroid, ProbeRing};

#[derive(Debug, Error)]
pub enum FilterError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("invalid filter configuration: {0}")]
    InvalidConfig(String),
    #[error("vertex {vertex} would coincide with its neighbor {neighbor}")]
    CoincidentVertex { vertex: usize, neighbor: usize },
    #[error("one-ring of vertex {0} has zero area")]
    ZeroRingArea(usize),
    #[error("target curvature {0} is not finite")]
    NonFiniteTarget(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryPolicy {
    /// Boundary vertices never move.
    #[default]
    Freeze,
    /// Boundary vertices move to the midpoint of their two boundary
    /// neighbors. Experimental.
    Laplace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub iterations: usize,
    /// Neighborhood depth of the curvature plane fit.
    pub ring_depth: usize,
    /// Accepted curvature mismatch. `None` means `1e-6 / mean_edge^2`.
    pub bisect_tol: Option<f64>,
    /// Initial bracket half-width. `None` means the mean incident edge
    /// length of each vertex.
    pub phi_range_init: Option<f64>,
    /// Bracket doublings before giving up on a vertex.
    pub range_expansions: u32,
    pub boundary_policy: BoundaryPolicy,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            iterations: 10,
            ring_depth: 2,
            bisect_tol: None,
            phi_range_init: None,
            range_expansions: 8,
            boundary_policy: BoundaryPolicy::Freeze,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), FilterError> {
        let bad = |msg: String| Err(FilterError::InvalidConfig(msg));
        if self.ring_depth == 0 {
            return bad("ring_depth must be at least 1".into());
        }
        if let Some(t) = self.bisect_tol {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("bisect_tol must be positive, got {t}"));
            }
        }
        if let Some(r) = self.phi_range_init {
            if !(r.is_finite() && r > 0.0) {
                return bad(format!("phi_range_init must be positive, got {r}"));
            }
        }
        if self.range_expansions > 64 {
            return bad(format!(
                "range_expansions must be at most 64, got {}",
                self.range_expansions
            ));
        }
        Ok(())
    }

    /// Bisection tolerance for `mesh`, resolving the scale-relative default.
    pub fn bisect_tol_for(&self, mesh: &TriangleMesh) -> f64 {
        self.bisect_tol.unwrap_or_else(|| {
            let h = mesh.mean_edge_length();
            if h > 0.0 {
                1e-6 / (h * h)
            } else {
                1e-6
            }
        })
    }

    fn phi_range_for(&self, mesh: &TriangleMesh, v: usize) -> f64 {
        self.phi_range_init
            .unwrap_or_else(|| mesh.mean_incident_edge_length(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateStatus {
    Solved,
    FallbackCentroid,
    Frozen,
    BoundarySmoothed,
}

/// Planned move of one vertex: `centroid + phi * normal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexUpdate {
    pub vertex: usize,
    pub centroid: Point3<f64>,
    pub normal: Vector3<f64>,
    pub phi: f64,
    pub status: UpdateStatus,
}

impl VertexUpdate {
    pub fn position(&self, mesh: &TriangleMesh) -> Point3<f64> {
        match self.status {
            UpdateStatus::Frozen => mesh.vertex(self.vertex),
            _ => self.centroid + self.normal * self.phi,
        }
    }
}

/// Finds `phi` with `curvature_at_offset(phi) = target_k`, or falls back to
/// the centroid with `phi = 0`.
pub fn solve_offset(
    mesh: &TriangleMesh,
    update: &VertexUpdate,
    target_k: f64,
    cfg: &FilterConfig,
) -> Result<VertexUpdate, FilterError> {
    if !target_k.is_finite() {
        return Err(FilterError::NonFiniteTarget(target_k));
    }
    cfg.validate()?;
    let probe = ProbeRing::new(mesh, update)?;
    Ok(probe::solve_probe(
        &probe,
        *update,
        target_k,
        cfg.bisect_tol_for(mesh),
        cfg.phi_range_for(mesh, update.vertex),
        cfg.range_expansions,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    /// One-based iteration number.
    pub iteration: usize,
    pub solved: usize,
    pub fallback: usize,
    pub frozen: usize,
    pub boundary_smoothed: usize,
    /// Vertices put back by the face-flip guard.
    pub reverted: usize,
    pub max_displacement: f64,
    /// Mean plane-fit residual of the output mesh.
    pub mean_k_residual: f64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub iterations: Vec<StepReport>,
    pub initial_mean_k_residual: f64,
    pub final_mean_k_residual: f64,
    pub total_elapsed_ms: f64,
}

/// Mean plane-fit RMS residual over interior vertices.
pub fn mean_k_residual(
    mesh: &TriangleMesh,
    field: &ScalarField,
    ring_depth: usize,
) -> Result<f64, FilterError> {
    let interior: Vec<usize> = (0..mesh.vertex_count())
        .filter(|&v| !mesh.is_boundary(v))
        .collect();
    if interior.is_empty() {
        return Ok(0.0);
    }
    let sum = interior
        .par_iter()
        .map(|&v| fit_curvature_plane(mesh, v, field, ring_depth).map(|p| p.rms_residual))
        .collect::<Result<Vec<f64>, MeshError>>()?
        .into_iter()
        .sum::<f64>();
    Ok(sum / interior.len() as f64)
}

fn plan_vertex(
    mesh: &TriangleMesh,
    field: &ScalarField,
    cfg: &FilterConfig,
    tol: f64,
    v: usize,
) -> Result<VertexUpdate, FilterError> {
    let ring = mesh.one_ring(v)?;
    if ring.neighbors.is_empty() {
        return Err(MeshError::IsolatedVertex(v).into());
    }
    if ring.is_boundary {
        return Ok(match cfg.boundary_policy {
            BoundaryPolicy::Freeze => VertexUpdate {
                vertex: v,
                centroid: mesh.vertex(v),
                normal: Vector3::zeros(),
                phi: 0.0,
                status: UpdateStatus::Frozen,
            },
            BoundaryPolicy::Laplace => {
                let a = mesh.vertex(ring.neighbors[0]);
                let b = mesh.vertex(*ring.neighbors.last().expect("non-empty ring"));
                VertexUpdate {
                    vertex: v,
                    centroid: nalgebra::center(&a, &b),
                    normal: Vector3::zeros(),
                    phi: 0.0,
                    status: UpdateStatus::BoundarySmoothed,
                }
            }
        });
    }
    let normal = vertex_normal(mesh, v)?;
    let samples = fit_samples(mesh, v, cfg.ring_depth);
    let plane = plane::fit_with_normal(mesh, v, normal, field, &samples);
    let update = VertexUpdate {
        vertex: v,
        centroid: neighbor_centroid(mesh, v)?,
        normal,
        phi: 0.0,
        status: UpdateStatus::FallbackCentroid,
    };
    let probe = ProbeRing::new(mesh, &update)?;
    Ok(probe::solve_probe(
        &probe,
        update,
        plane.c2,
        tol,
        cfg.phi_range_for(mesh, v),
        cfg.range_expansions,
    ))
}

/// Reverts moved vertices until no face normal points against its previous
/// direction. Returns the number of reverted vertices.
fn guard_flips(old: &TriangleMesh, pos: &mut [Point3<f64>]) -> usize {
    let before: Vec<Vector3<f64>> = (0..old.face_count()).map(|f| old.face_cross(f)).collect();
    let mut reverted = vec![false; pos.len()];
    loop {
        let mut changed = false;
        for (f, face) in old.faces().iter().enumerate() {
            let [a, b, c] = face.map(|i| pos[i]);
            let now = (b - a).cross(&(c - a));
            if now.dot(&before[f]) > 0.0 || before[f].norm_squared() == 0.0 {
                continue;
            }
            // Under a simultaneous update every vertex moved at once; the one
            // that travelled furthest is taken as the culprit.
            let culprit = face
                .iter()
                .copied()
                .map(|i| (i, (pos[i] - old.vertex(i)).norm_squared()))
                .filter(|&(_, d)| d > 0.0)
                .max_by(|x, y| x.1.total_cmp(&y.1));
            if let Some((i, _)) = culprit {
                pos[i] = old.vertex(i);
                reverted[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    reverted.into_iter().filter(|&r| r).count()
}

/// One step against a precomputed curvature field. The report's
/// `mean_k_residual` is left at zero for the caller to fill in.
fn step_with_field(
    mesh: &TriangleMesh,
    field: &ScalarField,
    cfg: &FilterConfig,
) -> Result<(TriangleMesh, StepReport), FilterError> {
    let tol = cfg.bisect_tol_for(mesh);
    let updates = (0..mesh.vertex_count())
        .into_par_iter()
        .map(|v| plan_vertex(mesh, field, cfg, tol, v))
        .collect::<Result<Vec<_>, _>>()?;

    let mut pos: Vec<Point3<f64>> = updates.iter().map(|u| u.position(mesh)).collect();
    let reverted = guard_flips(mesh, &mut pos);

    let mut report = StepReport {
        iteration: 0,
        solved: 0,
        fallback: 0,
        frozen: 0,
        boundary_smoothed: 0,
        reverted,
        max_displacement: 0.0,
        mean_k_residual: 0.0,
        elapsed_ms: 0.0,
    };
    for u in &updates {
        match u.status {
            UpdateStatus::Solved => report.solved += 1,
            UpdateStatus::FallbackCentroid => report.fallback += 1,
            UpdateStatus::Frozen => report.frozen += 1,
            UpdateStatus::BoundarySmoothed => report.boundary_smoothed += 1,
        }
    }
    report.max_displacement = pos
        .iter()
        .zip(mesh.vertices())
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max);
    Ok((mesh.with_positions(pos), report))
}

/// One filter pass. The report's residual describes the returned mesh.
pub fn filter_step(
    mesh: &TriangleMesh,
    cfg: &FilterConfig,
) -> Result<(TriangleMesh, StepReport), FilterError> {
    cfg.validate()?;
    let start = Instant::now();
    let field = gaussian_curvature_field(mesh)?;
    let (out, mut report) = step_with_field(mesh, &field, cfg)?;
    let out_field = gaussian_curvature_field(&out)?;
    report.iteration = 1;
    report.mean_k_residual = mean_k_residual(&out, &out_field, cfg.ring_depth)?;
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((out, report))
}

/// Runs `cfg.iterations` filter steps.
pub fn filter(
    mesh: &TriangleMesh,
    cfg: &FilterConfig,
) -> Result<(TriangleMesh, RunReport), FilterError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut current = mesh.clone();
    let mut field = gaussian_curvature_field(&current)?;
    let initial = mean_k_residual(&current, &field, cfg.ring_depth)?;
    let mut steps = Vec::with_capacity(cfg.iterations);
    for i in 0..cfg.iterations {
        let t = Instant::now();
        let (next, mut report) = step_with_field(&current, &field, cfg)?;
        field = gaussian_curvature_field(&next)?;
        report.iteration = i + 1;
        report.mean_k_residual = mean_k_residual(&next, &field, cfg.ring_depth)?;
        report.elapsed_ms = t.elapsed().as_secs_f64() * 1e3;
        log::debug!(
            "iteration {}: solved {}, fallback {}, reverted {}, max move {:.3e}",
            report.iteration,
            report.solved,
            report.fallback,
            report.reverted,
            report.max_displacement
        );
        steps.push(report);
        current = next;
    }
    let final_residual = steps.last().map_or(initial, |s| s.mean_k_residual);
    Ok((
        current,
        RunReport {
            iterations: steps,
            initial_mean_k_residual: initial,
            final_mean_k_residual: final_residual,
            total_elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{add_noise, gen_mesh, icosphere, MeshKind};

    fn radial_rms(mesh: &TriangleMesh, r: f64) -> f64 {
        let s: f64 = mesh
            .vertices()
            .iter()
            .map(|p| (p.coords.norm() - r).powi(2))
            .sum();
        (s / mesh.vertex_count() as f64).sqrt()
    }

    #[test]
    fn config_validation() {
        assert!(FilterConfig::default().validate().is_ok());
        for cfg in [
            FilterConfig {
                ring_depth: 0,
                ..Default::default()
            },
            FilterConfig {
                bisect_tol: Some(0.0),
                ..Default::default()
            },
            FilterConfig {
                phi_range_init: Some(-1.0),
                ..Default::default()
            },
            FilterConfig {
                phi_range_init: Some(f64::NAN),
                ..Default::default()
            },
        ] {
            assert!(matches!(cfg.validate(), Err(FilterError::InvalidConfig(_))));
        }
    }

    #[test]
    fn zero_iterations_is_identity() {
        let m = add_noise(&icosphere(2, 1.0), 0.01, 1);
        let (out, report) = filter(
            &m,
            &FilterConfig {
                iterations: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.vertices(), m.vertices());
        assert!(report.iterations.is_empty());
        assert_eq!(report.initial_mean_k_residual, report.final_mean_k_residual);
    }

    #[test]
    fn flat_grid_is_fixed() {
        let m = gen_mesh(MeshKind::Plane { size: 2.0 }, 16);
        let (out, report) = filter(&m, &FilterConfig::default()).unwrap();
        for s in &report.iterations {
            assert!(s.max_displacement < 1e-9);
            assert_eq!(s.frozen, 64);
        }
        assert!(out.rms_distance(&m).unwrap() < 1e-9);
    }

    #[test]
    fn noisy_sphere_one_step_reduces_radial_error() {
        let clean = icosphere(3, 1.0);
        let noisy = add_noise(&clean, 0.005, 7);
        let (out, report) = filter_step(&noisy, &FilterConfig::default()).unwrap();
        assert!(radial_rms(&out, 1.0) < radial_rms(&noisy, 1.0));
        assert_eq!(report.solved + report.fallback, noisy.vertex_count());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let m = add_noise(&icosphere(3, 1.0), 0.005, 3);
        let cfg = FilterConfig {
            iterations: 3,
            ..Default::default()
        };
        let (a, _) = filter(&m, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let (b, _) = pool.install(|| filter(&m, &cfg)).unwrap();
        let (c, _) = filter(&m, &cfg).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        assert_eq!(a.vertices(), c.vertices());
    }

    #[test]
    fn flip_guard_reverts_offender() {
        let m = gen_mesh(MeshKind::Plane { size: 2.0 }, 2);
        let mut pos = m.vertices().to_vec();
        // Push the center past its neighbors so its fan folds over.
        pos[4].x += 3.0;
        let n = guard_flips(&m, &mut pos);
        assert_eq!(n, 1);
        assert_eq!(pos, m.vertices());
    }

    #[test]
    fn laplace_boundary_moves_to_midpoint() {
        let m = gen_mesh(MeshKind::Saddle { extent: 1.0 }, 4);
        let cfg = FilterConfig {
            boundary_policy: BoundaryPolicy::Laplace,
            ..Default::default()
        };
        let (out, r) = filter_step(&m, &cfg).unwrap();
        assert_eq!(r.boundary_smoothed, 16);
        assert_eq!(r.frozen, 0);
        // Mid-edge vertex 2 sits between its boundary neighbors 1 and 3.
        let mid = nalgebra::center(&m.vertex(1), &m.vertex(3));
        assert!((out.vertex(2) - mid).norm() < 1e-12);
        // A corner with a single face would land on its opposite edge; the
        // guard puts those two corners back.
        assert_eq!(r.reverted, 2);
        assert_eq!(out.vertex(4), m.vertex(4));
        assert_eq!(out.vertex(20), m.vertex(20));
        let mid = nalgebra::center(&m.vertex(1), &m.vertex(5));
        assert!((out.vertex(0) - mid).norm() < 1e-12);
    }
}
