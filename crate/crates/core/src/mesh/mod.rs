//! Indexed triangle meshes with one-ring adjacency.
//!
//! A [`TriangleMesh`] owns its vertex positions and shares an immutable
//! [`Topology`] (faces plus derived adjacency). Moving vertices produces a new
//! mesh that reuses the same topology, so the filter never rebuilds
//! adjacency between iterations.

mod generate;
mod noise;
mod obj;

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{Point3, Vector3};
use thiserror::Error;

pub use generate::{gen_mesh, icosphere, MeshKind};
pub use noise::add_noise;
pub use obj::{load_mesh, read_obj, save_mesh, write_obj, ObjStats};

/// Faces whose area falls below this fraction of the squared bounding-box
/// diagonal are rejected as degenerate.
pub const DEGENERATE_AREA_FACTOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("face {face} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        count: usize,
    },
    #[error("face {face} is degenerate ({reason})")]
    DegenerateFace { face: usize, reason: &'static str },
    #[error("edge ({a}, {b}) is non-manifold: {reason}")]
    NonManifoldEdge {
        a: usize,
        b: usize,
        reason: &'static str,
    },
    #[error("vertex {0} is non-manifold: its fan splits into several components")]
    NonManifoldVertex(usize),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("vertex {0} has no incident faces")]
    IsolatedVertex(usize),
    #[error("vertex {0} lies on the boundary")]
    BoundaryVertex(usize),
    #[error("vertex {0} has a vanishing normal (fold-over geometry)")]
    ZeroNormal(usize),
    #[error("field has {got} values but the mesh has {expected} vertices")]
    FieldLength { expected: usize, got: usize },
    #[error("field value at vertex {0} is not finite")]
    NonFiniteField(usize),
    #[error("vertex count mismatch: {0} vs {1}")]
    VertexCountMismatch(usize, usize),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = MeshError> = std::result::Result<T, E>;

/// Cyclically ordered neighbors of a vertex.
///
/// Consecutive neighbors `(neighbors[k], neighbors[k + 1])` together with the
/// center form a counter-clockwise face. For interior vertices the pair
/// `(last, first)` closes the fan; boundary fans are open and carry one more
/// neighbor than incident faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRing {
    pub center: usize,
    pub neighbors: Vec<usize>,
    pub is_boundary: bool,
}

impl VertexRing {
    /// Consecutive neighbor pairs, each spanning one incident face.
    pub fn wedges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.neighbors.len();
        let count = if self.is_boundary {
            n.saturating_sub(1)
        } else {
            n
        };
        (0..count).map(move |k| (self.neighbors[k], self.neighbors[(k + 1) % n]))
    }

    pub fn face_count(&self) -> usize {
        if self.is_boundary {
            self.neighbors.len().saturating_sub(1)
        } else {
            self.neighbors.len()
        }
    }
}

/// Connectivity shared by every mesh with the same face list.
#[derive(Debug)]
pub struct Topology {
    faces: Vec<[usize; 3]>,
    vertex_faces: Vec<Vec<usize>>,
    rings: Vec<VertexRing>,
    edge_count: usize,
}

impl Topology {
    fn build(vertex_count: usize, faces: Vec<[usize; 3]>) -> Result<Self> {
        for (f, face) in faces.iter().enumerate() {
            for &i in face {
                if i >= vertex_count {
                    return Err(MeshError::IndexOutOfRange {
                        face: f,
                        index: i,
                        count: vertex_count,
                    });
                }
            }
            if face[0] == face[1] || face[1] == face[2] || face[2] == face[0] {
                return Err(MeshError::DegenerateFace {
                    face: f,
                    reason: "repeated vertex index",
                });
            }
        }

        // Every directed edge may appear once; an undirected edge may be
        // shared by at most two faces, which then traverse it in opposite
        // directions.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3);
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                if directed.insert((a, b), f).is_some() {
                    let reason = if directed.contains_key(&(b, a)) {
                        "shared by more than two faces"
                    } else {
                        "inconsistent orientation"
                    };
                    return Err(MeshError::NonManifoldEdge { a, b, reason });
                }
            }
        }
        let edge_count = directed
            .keys()
            .filter(|&&(a, b)| a < b || !directed.contains_key(&(b, a)))
            .count();

        let mut vertex_faces = vec![Vec::new(); vertex_count];
        for (f, face) in faces.iter().enumerate() {
            for &i in face {
                vertex_faces[i].push(f);
            }
        }

        let rings = (0..vertex_count)
            .map(|v| build_ring(v, &faces, &vertex_faces[v]))
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            faces,
            vertex_faces,
            rings,
            edge_count,
        })
    }
}

fn build_ring(center: usize, faces: &[[usize; 3]], incident: &[usize]) -> Result<VertexRing> {
    if incident.is_empty() {
        return Ok(VertexRing {
            center,
            neighbors: Vec::new(),
            is_boundary: false,
        });
    }
    // next[a] = b for each incident CCW face (center, a, b).
    let mut next: HashMap<usize, usize> = HashMap::with_capacity(incident.len());
    let mut has_prev: HashMap<usize, bool> = HashMap::with_capacity(incident.len() + 1);
    for &f in incident {
        let face = faces[f];
        let k = face.iter().position(|&i| i == center).expect("incident face");
        let a = face[(k + 1) % 3];
        let b = face[(k + 2) % 3];
        next.insert(a, b);
        has_prev.entry(a).or_insert(false);
        has_prev.insert(b, true);
    }

    let mut starts: Vec<usize> = has_prev
        .iter()
        .filter(|(_, &p)| !p)
        .map(|(&v, _)| v)
        .collect();
    starts.sort_unstable();
    let is_boundary = match starts.len() {
        0 => false,
        1 => true,
        _ => return Err(MeshError::NonManifoldVertex(center)),
    };
    let first = if is_boundary {
        starts[0]
    } else {
        // Lowest-index neighbor starts the cycle for a deterministic order.
        *next.keys().min().expect("non-empty fan")
    };

    let mut neighbors = Vec::with_capacity(incident.len() + 1);
    neighbors.push(first);
    let mut cur = first;
    while let Some(&n) = next.get(&cur) {
        if n == first {
            break;
        }
        neighbors.push(n);
        cur = n;
        if neighbors.len() > incident.len() + 1 {
            return Err(MeshError::NonManifoldVertex(center));
        }
    }
    let expected = if is_boundary {
        incident.len() + 1
    } else {
        incident.len()
    };
    if neighbors.len() != expected {
        return Err(MeshError::NonManifoldVertex(center));
    }
    Ok(VertexRing {
        center,
        neighbors,
        is_boundary,
    })
}

/// A validated, manifold, consistently oriented triangle mesh.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Point3<f64>>,
    topology: Arc<Topology>,
}

impl TriangleMesh {
    /// Builds and validates a mesh.
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let topology = Topology::build(vertices.len(), faces)?;
        let mesh = Self {
            vertices,
            topology: Arc::new(topology),
        };
        mesh.check_face_areas()?;
        Ok(mesh)
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new()).expect("empty mesh is valid")
    }

    fn check_face_areas(&self) -> Result<()> {
        let diag = self.bounding_box_diagonal();
        let min_area = DEGENERATE_AREA_FACTOR * diag * diag;
        for f in 0..self.face_count() {
            let area = self.face_area(f);
            if !area.is_finite() || area <= min_area {
                return Err(MeshError::DegenerateFace {
                    face: f,
                    reason: "area below tolerance",
                });
            }
        }
        Ok(())
    }

    /// Same connectivity, new positions. Geometry is not re-validated.
    pub fn with_positions(&self, vertices: Vec<Point3<f64>>) -> Self {
        assert_eq!(vertices.len(), self.vertices.len(), "vertex count changed");
        Self {
            vertices,
            topology: Arc::clone(&self.topology),
        }
    }

    /// Uniformly scales all positions about the origin.
    pub fn scaled(&self, factor: f64) -> Self {
        self.with_positions(self.vertices.iter().map(|p| p * factor).collect())
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.topology.faces
    }

    pub fn vertex(&self, v: usize) -> Point3<f64> {
        self.vertices[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.topology.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.topology.edge_count
    }

    /// V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn is_closed(&self) -> bool {
        self.topology.rings.iter().all(|r| !r.is_boundary)
    }

    pub fn incident_faces(&self, v: usize) -> &[usize] {
        &self.topology.vertex_faces[v]
    }

    /// Cyclically ordered one-ring of `v`.
    pub fn one_ring(&self, v: usize) -> Result<&VertexRing> {
        self.topology
            .rings
            .get(v)
            .ok_or(MeshError::VertexOutOfRange(v))
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.topology.rings[v].is_boundary
    }

    /// Unnormalized face normal, `(b - a) x (c - a)`; its norm is twice the area.
    pub fn face_cross(&self, f: usize) -> Vector3<f64> {
        let [a, b, c] = self.topology.faces[f];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        (pb - pa).cross(&(pc - pa))
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_cross(f).norm()
    }

    pub fn face_normal(&self, f: usize) -> Option<Vector3<f64>> {
        self.face_cross(f).try_normalize(0.0)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.face_count()).map(|f| self.face_area(f)).sum()
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let mut it = self.vertices.iter();
        let Some(first) = it.next() else {
            return 0.0;
        };
        let (mut lo, mut hi) = (first.coords, first.coords);
        for p in it {
            lo = lo.inf(&p.coords);
            hi = hi.sup(&p.coords);
        }
        (hi - lo).norm()
    }

    /// Mean length over all undirected edges.
    pub fn mean_edge_length(&self) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for ring in &self.topology.rings {
            for &j in &ring.neighbors {
                if ring.center < j {
                    sum += (self.vertices[j] - self.vertices[ring.center]).norm();
                    n += 1;
                }
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// Mean length of the edges incident to `v`.
    pub fn mean_incident_edge_length(&self, v: usize) -> f64 {
        let ring = &self.topology.rings[v];
        if ring.neighbors.is_empty() {
            return 0.0;
        }
        let p = self.vertices[v];
        ring.neighbors
            .iter()
            .map(|&j| (self.vertices[j] - p).norm())
            .sum::<f64>()
            / ring.neighbors.len() as f64
    }

    /// Vertices reachable from `v` in at most `depth` edge hops, excluding
    /// `v` itself, in breadth-first order.
    pub fn neighborhood(&self, v: usize, depth: usize) -> Vec<usize> {
        let mut seen = vec![v];
        let mut frontier = vec![v];
        let mut out = Vec::new();
        for _ in 0..depth {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in &self.topology.rings[u].neighbors {
                    if !seen.contains(&w) {
                        seen.push(w);
                        next.push(w);
                        out.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out
    }

    /// Whether two meshes share the same face list.
    pub fn same_connectivity(&self, other: &TriangleMesh) -> bool {
        Arc::ptr_eq(&self.topology, &other.topology) || self.faces() == other.faces()
    }

    /// Root-mean-square distance between corresponding vertices.
    pub fn rms_distance(&self, other: &TriangleMesh) -> Result<f64> {
        if self.vertex_count() != other.vertex_count() {
            return Err(MeshError::VertexCountMismatch(
                self.vertex_count(),
                other.vertex_count(),
            ));
        }
        if self.vertex_count() == 0 {
            return Ok(0.0);
        }
        let sum: f64 = self
            .vertices
            .iter()
            .zip(&other.vertices)
            .map(|(a, b)| (a - b).norm_squared())
            .sum();
        Ok((sum / self.vertex_count() as f64).sqrt())
    }
}

/// One real value per mesh vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    /// Wraps values for `mesh`, checking length and finiteness.
    pub fn for_mesh(mesh: &TriangleMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(MeshError::FieldLength {
                expected: mesh.vertex_count(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MeshError::NonFiniteField(i));
        }
        Ok(Self(values))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ScalarField {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
