//! Discrete Gaussian curvature, vertex areas and normals.
//!
//! Gaussian curvature at a vertex is the angle deficit divided by the
//! barycentric area (one third of the incident triangle areas). Boundary
//! vertices use `pi - sum(angles)` as their deficit and are flagged so the
//! filter can leave them alone.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use crate::mesh::{MeshError, Result, ScalarField, TriangleMesh};

/// Per-vertex curvature record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexCurvature {
    /// Radians; `2pi - sum` for interior vertices, `pi - sum` on the boundary.
    pub deficit: f64,
    /// Barycentric area.
    pub area: f64,
    /// `deficit / area`.
    pub gaussian: f64,
    pub is_boundary: bool,
}

/// Interior angle of face `f` at its corner `v`.
pub fn corner_angle(mesh: &TriangleMesh, f: usize, v: usize) -> f64 {
    let face = mesh.faces()[f];
    let k = face.iter().position(|&i| i == v).expect("vertex not in face");
    let p = mesh.vertex(v);
    let e1 = mesh.vertex(face[(k + 1) % 3]) - p;
    let e2 = mesh.vertex(face[(k + 2) % 3]) - p;
    e1.cross(&e2).norm().atan2(e1.dot(&e2))
}

fn incident_checked(mesh: &TriangleMesh, v: usize) -> Result<&[usize]> {
    if v >= mesh.vertex_count() {
        return Err(MeshError::VertexOutOfRange(v));
    }
    let faces = mesh.incident_faces(v);
    if faces.is_empty() {
        return Err(MeshError::IsolatedVertex(v));
    }
    for &f in faces {
        if mesh.face_cross(f).norm_squared() == 0.0 {
            return Err(MeshError::DegenerateFace {
                face: f,
                reason: "zero area",
            });
        }
    }
    Ok(faces)
}

fn angle_sum(mesh: &TriangleMesh, v: usize, faces: &[usize]) -> f64 {
    faces.iter().map(|&f| corner_angle(mesh, f, v)).sum()
}

/// `2pi` minus the incident corner angles. Boundary vertices are rejected;
/// use [`vertex_curvature`] for the boundary convention.
pub fn angle_deficit(mesh: &TriangleMesh, v: usize) -> Result<f64> {
    let faces = incident_checked(mesh, v)?;
    if mesh.is_boundary(v) {
        return Err(MeshError::BoundaryVertex(v));
    }
    Ok(TAU - angle_sum(mesh, v, faces))
}

/// One third of the summed incident triangle areas.
pub fn vertex_area(mesh: &TriangleMesh, v: usize) -> Result<f64> {
    let faces = incident_checked(mesh, v)?;
    Ok(faces.iter().map(|&f| mesh.face_area(f)).sum::<f64>() / 3.0)
}

pub fn vertex_curvature(mesh: &TriangleMesh, v: usize) -> Result<VertexCurvature> {
    let faces = incident_checked(mesh, v)?;
    let is_boundary = mesh.is_boundary(v);
    let full = if is_boundary { PI } else { TAU };
    let deficit = full - angle_sum(mesh, v, faces);
    let area = faces.iter().map(|&f| mesh.face_area(f)).sum::<f64>() / 3.0;
    Ok(VertexCurvature {
        deficit,
        area,
        gaussian: deficit / area,
        is_boundary,
    })
}

pub fn curvature_table(mesh: &TriangleMesh) -> Result<Vec<VertexCurvature>> {
    (0..mesh.vertex_count())
        .into_par_iter()
        .map(|v| vertex_curvature(mesh, v))
        .collect()
}

/// Angle-deficit Gaussian curvature at every vertex.
pub fn gaussian_curvature_field(mesh: &TriangleMesh) -> Result<ScalarField> {
    let values = curvature_table(mesh)?
        .into_iter()
        .map(|c| c.gaussian)
        .collect();
    Ok(ScalarField::from_vec_unchecked(values))
}

/// Area-weighted unit vertex normal.
pub fn vertex_normal(mesh: &TriangleMesh, v: usize) -> Result<Vector3<f64>> {
    if v >= mesh.vertex_count() {
        return Err(MeshError::VertexOutOfRange(v));
    }
    let faces = mesh.incident_faces(v);
    if faces.is_empty() {
        return Err(MeshError::IsolatedVertex(v));
    }
    let sum: Vector3<f64> = faces.iter().map(|&f| mesh.face_cross(f)).sum();
    let scale = faces
        .iter()
        .map(|&f| mesh.face_cross(f).norm())
        .sum::<f64>();
    if sum.norm() <= 1e-12 * scale {
        return Err(MeshError::ZeroNormal(v));
    }
    Ok(sum.normalize())
}

pub fn vertex_normals(mesh: &TriangleMesh) -> Result<Vec<Vector3<f64>>> {
    (0..mesh.vertex_count())
        .into_par_iter()
        .map(|v| vertex_normal(mesh, v))
        .collect()
}

/// Signed area of the spherical triangle spanned by three unit vectors.
fn spherical_triangle_area(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let triple = a.dot(&b.cross(c));
    let denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * triple.atan2(denom)
}

/// Gauss-map estimate of K: the signed area swept by the vertex normals over
/// the one-ring, divided by the one-ring surface area.
///
/// Each ring triangle `(v, n_k, n_k+1)` maps to the spherical triangle of
/// the corresponding vertex normals. The image is positive when it keeps the
/// surface orientation (elliptic points) and negative when it reverses it.
pub fn gauss_map_area_ratio(mesh: &TriangleMesh, v: usize) -> Result<f64> {
    let faces = incident_checked(mesh, v)?;
    let ring = mesh.one_ring(v)?;
    if ring.is_boundary {
        return Err(MeshError::BoundaryVertex(v));
    }
    let center = vertex_normal(mesh, v)?;
    let mut image = 0.0;
    for (a, b) in ring.wedges() {
        let na = vertex_normal(mesh, a)?;
        let nb = vertex_normal(mesh, b)?;
        image += spherical_triangle_area(&center, &na, &nb);
    }
    let area: f64 = faces.iter().map(|&f| mesh.face_area(f)).sum();
    Ok(image / area)
}
