//! Surface energies evaluated on meshes and curvature fields.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_table, gaussian_curvature_field};
use crate::filter::fit_curvature_plane;
use crate::mesh::{MeshError, Result, ScalarField, TriangleMesh};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub bending: f64,
    pub j_las: f64,
    /// RMS over interior vertices of the per-vertex plane-fit residual.
    pub k_plane_residual: f64,
}

fn checked_cross(mesh: &TriangleMesh, f: usize) -> Result<Vector3<f64>> {
    let c = mesh.face_cross(f);
    if c.norm_squared() == 0.0 {
        return Err(MeshError::DegenerateFace {
            face: f,
            reason: "zero area",
        });
    }
    Ok(c)
}

/// Cotangent Laplacian of the embedding, `sum_j w_ij (x_j - x_i)`, before
/// division by the vertex area.
fn cotan_laplacian(mesh: &TriangleMesh) -> Result<Vec<Vector3<f64>>> {
    let per_face = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| {
            let cross = checked_cross(mesh, f)?.norm();
            let face = mesh.faces()[f];
            let p = face.map(|i| mesh.vertex(i));
            let mut out = [Vector3::zeros(); 3];
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                let cot = (p[j] - p[i]).dot(&(p[k] - p[i])) / cross;
                let w = 0.5 * cot;
                out[j] += (p[k] - p[j]) * w;
                out[k] += (p[j] - p[k]) * w;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lap = vec![Vector3::zeros(); mesh.vertex_count()];
    for (face, contrib) in mesh.faces().iter().zip(per_face) {
        for (i, c) in face.iter().zip(contrib) {
            lap[*i] += c;
        }
    }
    Ok(lap)
}

/// Signed mean curvature at interior vertices (positive where the surface
/// bends away from its normal, e.g. an outward-oriented sphere); `None` on
/// the boundary.
pub fn mean_curvature(mesh: &TriangleMesh) -> Result<Vec<Option<f64>>> {
    let lap = cotan_laplacian(mesh)?;
    let table = curvature_table(mesh)?;
    (0..mesh.vertex_count())
        .map(|v| {
            if table[v].is_boundary {
                return Ok(None);
            }
            let hn = lap[v] / (2.0 * table[v].area);
            let n = crate::curvature::vertex_normal(mesh, v)?;
            let h = hn.norm();
            Ok(Some(if hn.dot(&n) > 0.0 { -h } else { h }))
        })
        .collect()
}

/// `sum_v (4 H_v^2 - 2 K_v) A_v` over interior vertices.
pub fn bending_energy(mesh: &TriangleMesh) -> Result<f64> {
    let lap = cotan_laplacian(mesh)?;
    let table = curvature_table(mesh)?;
    Ok(table
        .iter()
        .zip(&lap)
        .filter(|(c, _)| !c.is_boundary)
        .map(|(c, l)| {
            let h2 = l.norm_squared() / (4.0 * c.area * c.area);
            (4.0 * h2 - 2.0 * c.gaussian) * c.area
        })
        .sum())
}

/// Gradient of the piecewise-linear interpolant of `field` on face `f`.
pub fn face_gradient(mesh: &TriangleMesh, field: &ScalarField, f: usize) -> Result<Vector3<f64>> {
    let cross = checked_cross(mesh, f)?;
    let face = mesh.faces()[f];
    let p = face.map(|i| mesh.vertex(i));
    let n = cross / cross.norm();
    let mut g = Vector3::zeros();
    for i in 0..3 {
        let e = p[(i + 2) % 3] - p[(i + 1) % 3];
        g += n.cross(&e) * field[face[i]];
    }
    Ok(g / cross.norm())
}

/// `sum_f area_f * sqrt(1 + |grad K|_f^2)`.
pub fn discrete_j_las(mesh: &TriangleMesh, field: &ScalarField) -> Result<f64> {
    if field.len() != mesh.vertex_count() {
        return Err(MeshError::FieldLength {
            expected: mesh.vertex_count(),
            got: field.len(),
        });
    }
    let terms = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| {
            let g = face_gradient(mesh, field, f)?;
            Ok(mesh.face_area(f) * (1.0 + g.norm_squared()).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.into_iter().sum())
}

/// Samples `K(s, t)` on a regular grid, row-major with `s = i * spacing`
/// along a row and `t = j * spacing` across rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    nx: usize,
    ny: usize,
    spacing: f64,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid must be at least 3x3, got {0}x{1}")]
    TooSmall(usize, usize),
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("spacing must be positive, got {0}")]
    Spacing(f64),
}

impl GridField {
    pub fn new(nx: usize, ny: usize, spacing: f64, values: Vec<f64>) -> Result<Self, GridError> {
        if nx < 3 || ny < 3 {
            return Err(GridError::TooSmall(nx, ny));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(GridError::Spacing(spacing));
        }
        if values.len() != nx * ny {
            return Err(GridError::Length {
                expected: nx * ny,
                got: values.len(),
            });
        }
        Ok(Self {
            nx,
            ny,
            spacing,
            values,
        })
    }

    /// Samples `f(s0 + i h, t0 + j h)`.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        spacing: f64,
        origin: (f64, f64),
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, GridError> {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(
                    origin.0 + i as f64 * spacing,
                    origin.1 + j as f64 * spacing,
                ));
            }
        }
        Self::new(nx, ny, spacing, values)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }
}

/// `(1 + K_t^2) K_ss - 2 K_s K_t K_st + (1 + K_s^2) K_tt` at interior nodes
/// by central differences. The result is `(nx - 2) x (ny - 2)`, so entry
/// `(i, j)` belongs to input node `(i + 1, j + 1)`.
pub fn minimal_surface_residual(grid: &GridField) -> Vec<f64> {
    let h = grid.spacing;
    let k = |i: usize, j: usize| grid.get(i, j);
    let mut out = Vec::with_capacity((grid.nx - 2) * (grid.ny - 2));
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            let ks = (k(i + 1, j) - k(i - 1, j)) / (2.0 * h);
            let kt = (k(i, j + 1) - k(i, j - 1)) / (2.0 * h);
            let kss = (k(i + 1, j) - 2.0 * k(i, j) + k(i - 1, j)) / (h * h);
            let ktt = (k(i, j + 1) - 2.0 * k(i, j) + k(i, j - 1)) / (h * h);
            let kst = (k(i + 1, j + 1) - k(i + 1, j - 1) - k(i - 1, j + 1) + k(i - 1, j - 1))
                / (4.0 * h * h);
            out.push((1.0 + kt * kt) * kss - 2.0 * ks * kt * kst + (1.0 + ks * ks) * ktt);
        }
    }
    out
}

/// Per-vertex RMS residual of the curvature plane fit. Vertices whose
/// neighborhood cannot determine a plane report the spread about the
/// neighborhood mean, and vertices with no usable neighbors report zero.
pub fn k_plane_residual(
    mesh: &TriangleMesh,
    field: &ScalarField,
    ring_depth: usize,
) -> Result<ScalarField> {
    let values = (0..mesh.vertex_count())
        .into_par_iter()
        .map(|v| fit_curvature_plane(mesh, v, field, ring_depth).map(|p| p.rms_residual))
        .collect::<Result<Vec<f64>>>()?;
    ScalarField::for_mesh(mesh, values)
}

pub fn energy_report(mesh: &TriangleMesh, ring_depth: usize) -> Result<EnergyReport> {
    let field = gaussian_curvature_field(mesh)?;
    let residual = k_plane_residual(mesh, &field, ring_depth)?;
    let interior: Vec<f64> = (0..mesh.vertex_count())
        .filter(|&v| !mesh.is_boundary(v))
        .map(|v| residual[v])
        .collect();
    let rms = if interior.is_empty() {
        0.0
    } else {
        (interior.iter().map(|r| r * r).sum::<f64>() / interior.len() as f64).sqrt()
    };
    Ok(EnergyReport {
        bending: bending_energy(mesh)?,
        j_las: discrete_j_las(mesh, &field)?,
        k_plane_residual: rms,
    })
}
