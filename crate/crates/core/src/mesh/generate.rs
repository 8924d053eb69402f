//! Analytic test meshes.

use std::collections::HashMap;
use std::f64::consts::TAU;

use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use super::TriangleMesh;

/// Surface family and size parameters for [`gen_mesh`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeshKind {
    /// Square in the z = 0 plane, centered at the origin, with side `size`.
    Plane { size: f64 },
    /// Icosphere centered at the origin.
    Sphere { radius: f64 },
    /// Open cylinder around the z axis, centered at the origin.
    Cylinder { radius: f64, height: f64 },
    /// Graph of z = x^2 - y^2 over [-extent, extent]^2.
    Saddle { extent: f64 },
}

/// Generates a consistently oriented mesh of the given surface.
///
/// For spheres `resolution` is the subdivision level (0 gives the
/// icosahedron). Grids use `resolution` cells per side (clamped to at least
/// one); cylinders use `resolution` rows and `4 * resolution` segments.
pub fn gen_mesh(kind: MeshKind, resolution: usize) -> TriangleMesh {
    match kind {
        MeshKind::Sphere { radius } => icosphere(resolution, radius),
        MeshKind::Plane { size } => {
            let h = size / 2.0;
            grid(resolution.max(1), [-h, h], |x, y| Point3::new(x, y, 0.0))
        }
        MeshKind::Saddle { extent } => grid(resolution.max(1), [-extent, extent], |x, y| {
            Point3::new(x, y, x * x - y * y)
        }),
        MeshKind::Cylinder { radius, height } => cylinder(resolution.max(1), radius, height),
    }
}

fn grid(n: usize, range: [f64; 2], place: impl Fn(f64, f64) -> Point3<f64>) -> TriangleMesh {
    let step = (range[1] - range[0]) / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(place(range[0] + step * i as f64, range[0] + step * j as f64));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriangleMesh::new(vertices, faces).expect("grid mesh is valid")
}

fn cylinder(rows: usize, radius: f64, height: f64) -> TriangleMesh {
    let around = 4 * rows;
    let mut vertices = Vec::with_capacity(around * (rows + 1));
    for j in 0..=rows {
        let z = -height / 2.0 + height * j as f64 / rows as f64;
        for k in 0..around {
            let a = TAU * k as f64 / around as f64;
            vertices.push(Point3::new(radius * a.cos(), radius * a.sin(), z));
        }
    }
    let id = |k: usize, j: usize| j * around + k % around;
    let mut faces = Vec::with_capacity(2 * around * rows);
    for j in 0..rows {
        for k in 0..around {
            faces.push([id(k, j), id(k + 1, j), id(k + 1, j + 1)]);
            faces.push([id(k, j), id(k + 1, j + 1), id(k, j + 1)]);
        }
    }
    TriangleMesh::new(vertices, faces).expect("cylinder mesh is valid")
}

const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

/// Icosahedron refined `level` times by edge midpoint splitting, with every
/// new vertex projected onto the sphere. V = 10 * 4^level + 2.
pub fn icosphere(level: usize, radius: f64) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut vertices: Vec<Point3<f64>> = raw
        .iter()
        .map(|c| Point3::from(Point3::from(*c).coords.normalize() * radius))
        .collect();
    let mut faces = ICOSAHEDRON_FACES.to_vec();

    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let mut mid = |i: usize, j: usize| {
                *midpoints.entry((i.min(j), i.max(j))).or_insert_with(|| {
                    let m = (vertices[i].coords + vertices[j].coords).normalize() * radius;
                    vertices.push(Point3::from(m));
                    vertices.len() - 1
                })
            };
            let ab = mid(a, b);
            let bc = mid(b, c);
            let ca = mid(c, a);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriangleMesh::new(vertices, faces).expect("icosphere is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosahedron_combinatorics_and_orientation() {
        let m = icosphere(0, 1.0);
        assert_eq!((m.vertex_count(), m.face_count()), (12, 20));
        assert_eq!(m.euler_characteristic(), 2);
        for f in 0..m.face_count() {
            let [a, b, c] = m.faces()[f];
            let centroid = (m.vertex(a).coords + m.vertex(b).coords + m.vertex(c).coords) / 3.0;
            assert!(m.face_cross(f).dot(&centroid) > 0.0, "face {f} points inward");
        }
    }

    #[test]
    fn icosphere_counts() {
        for level in 0..=4 {
            let m = icosphere(level, 2.0);
            let v = 10 * 4usize.pow(level as u32) + 2;
            assert_eq!(m.vertex_count(), v);
            assert_eq!(m.face_count(), 2 * v - 4);
            assert_eq!(m.euler_characteristic(), 2);
            assert!(m.vertices().iter().all(|p| (p.coords.norm() - 2.0).abs() < 1e-12));
        }
    }

    #[test]
    fn plane_grid_counts() {
        for n in [1, 2, 7, 32] {
            let m = gen_mesh(MeshKind::Plane { size: 1.0 }, n);
            assert_eq!(m.vertex_count(), (n + 1) * (n + 1));
            assert_eq!(m.face_count(), 2 * n * n);
            assert_eq!(m.euler_characteristic(), 1);
            assert!(m.face_normal(0).unwrap().z > 0.999);
        }
    }

    #[test]
    fn cylinder_is_open_annulus() {
        let m = gen_mesh(MeshKind::Cylinder { radius: 1.0, height: 2.0 }, 4);
        assert_eq!(m.vertex_count(), 16 * 5);
        assert_eq!(m.euler_characteristic(), 0);
        assert!(!m.is_closed());
        // outward orientation
        let f = 0;
        let [a, b, c] = m.faces()[f];
        let centroid = (m.vertex(a).coords + m.vertex(b).coords + m.vertex(c).coords) / 3.0;
        let radial = nalgebra::Vector3::new(centroid.x, centroid.y, 0.0);
        assert!(m.face_cross(f).dot(&radial) > 0.0);
    }
}
