//! Curvature of a single vertex as it slides along its normal.
//!
//! With the neighbors fixed, the edge vectors from the moved vertex are
//! `q_k + phi * N` where `q_k = P_ic - X_k`. Their pairwise dot products are
//! quadratic in `phi` and their cross products are linear, so each probe only
//! evaluates precomputed coefficients.

use std::f64::consts::{PI, TAU};

use nalgebra::{Point3, Vector3};

use super::{FilterError, UpdateStatus, VertexUpdate};
use crate::mesh::{MeshError, TriangleMesh};

/// Arithmetic mean of the one-ring neighbor positions.
pub fn neighbor_centroid(mesh: &TriangleMesh, v: usize) -> Result<Point3<f64>, MeshError> {
    let ring = mesh.one_ring(v)?;
    if ring.neighbors.is_empty() {
        return Err(MeshError::IsolatedVertex(v));
    }
    let sum: Vector3<f64> = ring.neighbors.iter().map(|&u| mesh.vertex(u).coords).sum();
    Ok(Point3::from(sum / ring.neighbors.len() as f64))
}

/// Precomputed one-ring coefficients for one vertex update.
#[derive(Debug, Clone)]
pub struct ProbeRing {
    vertex: usize,
    full_angle: f64,
    n2: f64,
    neighbors: Vec<usize>,
    /// `N . q_k` per neighbor.
    lin: Vec<f64>,
    /// `|q_k|^2` per neighbor.
    sq: Vec<f64>,
    /// `q_k . q_k+1` per wedge.
    dot0: Vec<f64>,
    /// `q_k x q_k+1` per wedge.
    cross0: Vec<Vector3<f64>>,
    /// `N x (q_k+1 - q_k)` per wedge.
    cross1: Vec<Vector3<f64>>,
    /// `lin_k + lin_k+1` per wedge.
    lin_pair: Vec<f64>,
}

impl ProbeRing {
    pub fn new(mesh: &TriangleMesh, update: &VertexUpdate) -> Result<Self, MeshError> {
        let ring = mesh.one_ring(update.vertex)?;
        if ring.neighbors.is_empty() {
            return Err(MeshError::IsolatedVertex(update.vertex));
        }
        let n = update.normal;
        let q: Vec<Vector3<f64>> = ring
            .neighbors
            .iter()
            .map(|&u| update.centroid - mesh.vertex(u))
            .collect();
        let lin: Vec<f64> = q.iter().map(|qk| n.dot(qk)).collect();
        let sq = q.iter().map(|qk| qk.norm_squared()).collect();
        let m = q.len();
        let wedges: Vec<(usize, usize)> = (0..ring.face_count()).map(|k| (k, (k + 1) % m)).collect();
        Ok(Self {
            vertex: update.vertex,
            full_angle: if ring.is_boundary { PI } else { TAU },
            n2: n.norm_squared(),
            neighbors: ring.neighbors.clone(),
            dot0: wedges.iter().map(|&(a, b)| q[a].dot(&q[b])).collect(),
            cross0: wedges.iter().map(|&(a, b)| q[a].cross(&q[b])).collect(),
            cross1: wedges.iter().map(|&(a, b)| n.cross(&(q[b] - q[a]))).collect(),
            lin_pair: wedges.iter().map(|&(a, b)| lin[a] + lin[b]).collect(),
            lin,
            sq,
        })
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    /// Angle-deficit curvature with the center moved to `P_ic + phi * N`.
    pub fn curvature(&self, phi: f64) -> Result<f64, FilterError> {
        for (k, (&l, &s)) in self.lin.iter().zip(&self.sq).enumerate() {
            let len2 = self.n2 * phi * phi + 2.0 * l * phi + s;
            if len2 <= f64::MIN_POSITIVE {
                return Err(FilterError::CoincidentVertex {
                    vertex: self.vertex,
                    neighbor: self.neighbors[k],
                });
            }
        }
        let mut angles = 0.0;
        let mut twice_area = 0.0;
        for k in 0..self.dot0.len() {
            let dot = self.n2 * phi * phi + self.lin_pair[k] * phi + self.dot0[k];
            let cross = (self.cross0[k] + self.cross1[k] * phi).norm();
            angles += cross.atan2(dot);
            twice_area += cross;
        }
        if twice_area <= 0.0 {
            return Err(FilterError::ZeroRingArea(self.vertex));
        }
        Ok((self.full_angle - angles) / (twice_area / 6.0))
    }
}

/// Curvature at `update.vertex` if it were moved to `centroid + phi * normal`.
pub fn curvature_at_offset(
    mesh: &TriangleMesh,
    update: &VertexUpdate,
    phi: f64,
) -> Result<f64, FilterError> {
    ProbeRing::new(mesh, update)?.curvature(phi)
}

const MAX_BISECTIONS: usize = 200;
const SCAN_OCTAVES: u32 = 16;

/// Bracket-and-bisect search for `phi` with `K(phi) = target`.
///
/// The side is picked from the sign of the residual at `phi = 0`: too little
/// curvature pushes outward, too much pushes inward. The bracket half-width
/// grows to `r0` and then doubles at most `expansions` times.
pub(crate) fn solve_probe(
    probe: &ProbeRing,
    mut update: VertexUpdate,
    target: f64,
    tol: f64,
    r0: f64,
    expansions: u32,
) -> VertexUpdate {
    update.phi = 0.0;
    update.status = UpdateStatus::FallbackCentroid;
    let f = |phi: f64| probe.curvature(phi).map(|k| k - target);
    let Ok(f0) = f(0.0) else {
        return update;
    };
    if f0.abs() < tol {
        update.status = UpdateStatus::Solved;
        return update;
    }
    let dir = if f0 < 0.0 { 1.0 } else { -1.0 };

    // K(phi) is roughly U-shaped around the flattest position, which lies
    // close to phi = 0, so a root on the near side of the minimum can sit
    // far inside the first bracket. Probe geometrically from tiny offsets up
    // to r0 before doubling outward.
    let probes = (0..=SCAN_OCTAVES)
        .rev()
        .map(|k| r0 / f64::powi(2.0, k as i32))
        .chain((1..=expansions).map(|k| r0 * f64::powi(2.0, k as i32)));

    let (mut a, mut fa) = (0.0, f0);
    let mut b = None;
    for r in probes {
        let x = dir * r;
        let Ok(fx) = f(x) else { break };
        if fx.abs() < tol {
            update.phi = x;
            update.status = UpdateStatus::Solved;
            return update;
        }
        if fx.signum() != f0.signum() {
            b = Some(x);
            break;
        }
        (a, fa) = (x, fx);
    }
    let Some(mut b) = b else {
        return update;
    };

    for _ in 0..MAX_BISECTIONS {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let Ok(fm) = f(m) else { break };
        if fm.abs() < tol {
            update.phi = m;
            update.status = UpdateStatus::Solved;
            return update;
        }
        if fm.signum() == fa.signum() {
            (a, fa) = (m, fm);
        } else {
            b = m;
        }
    }
    update
}
