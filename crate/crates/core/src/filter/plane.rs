//! Least-squares plane fit of the curvature field in a vertex tangent chart.

use nalgebra::{Point3, Vector3};

use crate::curvature::vertex_normal;
use crate::mesh::{MeshError, Result, ScalarField, TriangleMesh};

/// `K(s, t) = c0 * s + c1 * t + c2` in the tangent chart of one vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvaturePlane {
    pub c0: f64,
    pub c1: f64,
    /// Value at the chart origin, which is the vertex itself.
    pub c2: f64,
    pub origin: Point3<f64>,
    pub normal: Vector3<f64>,
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    /// Number of vertices the plane was fitted to.
    pub samples: usize,
    /// RMS of `K - plane` over the fitted vertices.
    pub rms_residual: f64,
    /// Set when the projected samples could not determine the slopes; the
    /// plane then degrades to the sample mean.
    pub rank_deficient: bool,
}

impl CurvaturePlane {
    /// Chart coordinates of `p`.
    pub fn chart(&self, p: &Point3<f64>) -> (f64, f64) {
        let d = p - self.origin;
        (d.dot(&self.e1), d.dot(&self.e2))
    }

    pub fn value_at(&self, p: &Point3<f64>) -> f64 {
        let (s, t) = self.chart(p);
        self.c0 * s + self.c1 * t + self.c2
    }
}

/// Orthonormal tangent basis for `normal`; deterministic for a given input.
pub fn tangent_frame(normal: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if normal.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = (helper - normal * helper.dot(normal)).normalize();
    let e2 = normal.cross(&e1);
    (e1, e2)
}

/// Relative determinant below which projected samples count as collinear.
const RANK_TOL: f64 = 1e-10;

/// Vertices whose curvature enters the fit around `v`: everything within
/// `ring_depth` hops, minus `v` itself and boundary vertices (whose
/// curvature follows a different convention).
pub fn fit_samples(mesh: &TriangleMesh, v: usize, ring_depth: usize) -> Vec<usize> {
    mesh.neighborhood(v, ring_depth)
        .into_iter()
        .filter(|&u| !mesh.is_boundary(u))
        .collect()
}

/// Fits the curvature plane around `v` by least squares over its
/// neighborhood projected to the tangent plane at `v`.
pub fn fit_curvature_plane(
    mesh: &TriangleMesh,
    v: usize,
    field: &ScalarField,
    ring_depth: usize,
) -> Result<CurvaturePlane> {
    if field.len() != mesh.vertex_count() {
        return Err(MeshError::FieldLength {
            expected: mesh.vertex_count(),
            got: field.len(),
        });
    }
    let normal = vertex_normal(mesh, v)?;
    let samples = fit_samples(mesh, v, ring_depth);
    Ok(fit_with_normal(mesh, v, normal, field, &samples))
}

pub(crate) fn fit_with_normal(
    mesh: &TriangleMesh,
    v: usize,
    normal: Vector3<f64>,
    field: &ScalarField,
    samples: &[usize],
) -> CurvaturePlane {
    let origin = mesh.vertex(v);
    let (e1, e2) = tangent_frame(&normal);
    let mut plane = CurvaturePlane {
        c0: 0.0,
        c1: 0.0,
        c2: field[v],
        origin,
        normal,
        e1,
        e2,
        samples: samples.len(),
        rms_residual: 0.0,
        rank_deficient: true,
    };
    if samples.is_empty() {
        return plane;
    }

    let pts: Vec<(f64, f64, f64)> = samples
        .iter()
        .map(|&u| {
            let (s, t) = plane.chart(&mesh.vertex(u));
            (s, t, field[u])
        })
        .collect();
    let n = pts.len() as f64;
    let (ms, mt, mk) = pts.iter().fold((0.0, 0.0, 0.0), |acc, p| {
        (acc.0 + p.0 / n, acc.1 + p.1 / n, acc.2 + p.2 / n)
    });
    let (mut sss, mut stt, mut sst, mut ssk, mut stk) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(s, t, k) in &pts {
        let (ds, dt, dk) = (s - ms, t - mt, k - mk);
        sss += ds * ds;
        stt += dt * dt;
        sst += ds * dt;
        ssk += ds * dk;
        stk += dt * dk;
    }
    let det = sss * stt - sst * sst;
    let scale = (sss + stt) * (sss + stt);
    if pts.len() >= 3 && scale > 0.0 && det > RANK_TOL * scale {
        plane.c0 = (stt * ssk - sst * stk) / det;
        plane.c1 = (sss * stk - sst * ssk) / det;
        plane.c2 = mk - plane.c0 * ms - plane.c1 * mt;
        plane.rank_deficient = false;
    } else {
        plane.c2 = mk;
    }
    let sq: f64 = pts
        .iter()
        .map(|&(s, t, k)| {
            let r = k - (plane.c0 * s + plane.c1 * t + plane.c2);
            r * r
        })
        .sum();
    plane.rms_residual = (sq / n).sqrt();
    plane
}
