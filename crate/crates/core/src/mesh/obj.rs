//! Wavefront OBJ reading and writing (triangles only).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::Point3;

use super::{MeshError, Result, TriangleMesh};

/// Bookkeeping from a successful parse.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ObjStats {
    /// Records other than `v` and `f` that were ignored.
    pub skipped_records: usize,
}

/// Parses an OBJ stream into a validated mesh.
pub fn read_obj<R: BufRead>(reader: R) -> Result<(TriangleMesh, ObjStats)> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut stats = ObjStats::default();

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut xyz = [0.0f64; 3];
                for c in xyz.iter_mut() {
                    let tok = tokens.next().ok_or_else(|| MeshError::Parse {
                        line: lineno,
                        msg: "vertex record needs three coordinates".into(),
                    })?;
                    *c = tok.parse().map_err(|_| MeshError::Parse {
                        line: lineno,
                        msg: format!("invalid coordinate `{tok}`"),
                    })?;
                    if !c.is_finite() {
                        return Err(MeshError::Parse {
                            line: lineno,
                            msg: format!("non-finite coordinate `{tok}`"),
                        });
                    }
                }
                vertices.push(Point3::from(xyz));
            }
            Some("f") => {
                let refs: Vec<&str> = tokens.collect();
                if refs.len() != 3 {
                    return Err(MeshError::Parse {
                        line: lineno,
                        msg: format!("only triangles are supported, got {} vertices", refs.len()),
                    });
                }
                let mut face = [0usize; 3];
                for (slot, r) in face.iter_mut().zip(&refs) {
                    *slot = parse_index(r, vertices.len(), lineno)?;
                }
                faces.push(face);
            }
            Some(_) => stats.skipped_records += 1,
            None => {}
        }
    }

    let mesh = TriangleMesh::new(vertices, faces)?;
    Ok((mesh, stats))
}

// `i`, `i/t`, `i//n`, `i/t/n`; negative indices count back from the last vertex.
fn parse_index(token: &str, count: usize, line: usize) -> Result<usize> {
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head.parse().map_err(|_| MeshError::Parse {
        line,
        msg: format!("invalid face index `{token}`"),
    })?;
    let idx = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        count as i64 + raw
    } else {
        return Err(MeshError::Parse {
            line,
            msg: "face index 0 is invalid (OBJ indices are 1-based)".into(),
        });
    };
    if idx < 0 || idx as usize >= count {
        return Err(MeshError::Parse {
            line,
            msg: format!("face index `{token}` refers to an undefined vertex"),
        });
    }
    Ok(idx as usize)
}

pub fn load_mesh<P: AsRef<Path>>(path: P) -> Result<TriangleMesh> {
    let file = File::open(path.as_ref())?;
    let (mesh, stats) = read_obj(BufReader::new(file))?;
    if stats.skipped_records > 0 {
        log::warn!(
            "{}: skipped {} unsupported OBJ records",
            path.as_ref().display(),
            stats.skipped_records
        );
    }
    Ok(mesh)
}

/// Writes `v`/`f` records. Coordinates use the shortest representation that
/// parses back to the identical `f64`.
pub fn write_obj<W: Write>(mesh: &TriangleMesh, mut out: W) -> Result<()> {
    for p in mesh.vertices() {
        writeln!(out, "v {:?} {:?} {:?}", p.x, p.y, p.z)?;
    }
    for f in mesh.faces() {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_mesh<P: AsRef<Path>>(mesh: &TriangleMesh, path: P) -> Result<()> {
    let file = File::create(path)?;
    write_obj(mesh, BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TETRA: &str = "# tetrahedron\n\
        o tet\n\
        v 0 0 0\n\
        v 1 0 0\n\
        v 0 1 0\n\
        v 0 0 1\n\
        vn 0 0 1\n\
        f 1 3 2\n\
        f 1/1 2/2 4/3\n\
        f 2//1 3//1 4//1\n\
        f -4 -1 -2\n";

    #[test]
    fn parses_tetrahedron_and_counts_skipped() {
        let (m, stats) = read_obj(TETRA.as_bytes()).unwrap();
        assert_eq!((m.vertex_count(), m.face_count()), (4, 4));
        assert_eq!(stats.skipped_records, 2);
        assert_eq!(m.faces()[3], [0, 3, 2]);
    }

    #[test]
    fn zero_index_names_the_line() {
        let src = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n";
        let err = read_obj(src.as_bytes()).unwrap_err();
        match err {
            MeshError::Parse { line, .. } => assert_eq!(line, 4),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_quads_and_bad_numbers() {
        let quad = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        assert!(matches!(read_obj(quad.as_bytes()), Err(MeshError::Parse { line: 5, .. })));
        let bad = "v 0 zero 0\n";
        assert!(matches!(read_obj(bad.as_bytes()), Err(MeshError::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_mesh_round_trips() {
        let mut buf = Vec::new();
        write_obj(&TriangleMesh::empty(), &mut buf).unwrap();
        assert!(buf.is_empty());
        let (m, _) = read_obj(buf.as_slice()).unwrap();
        assert_eq!(m.vertex_count(), 0);
    }

    #[test]
    fn round_trip_preserves_full_precision() {
        let v = vec![
            Point3::new(0.123456789012345, -1.0 / 3.0, 1e-7 + 2.0 / 7.0),
            Point3::new(1.000000000123, 0.0, 3.14159265358979),
            Point3::new(0.0, 1.0 + 1e-13, -2.718281828459045),
        ];
        let m = TriangleMesh::new(v, vec![[0, 1, 2]]).unwrap();
        let mut buf = Vec::new();
        write_obj(&m, &mut buf).unwrap();
        let (back, _) = read_obj(buf.as_slice()).unwrap();
        assert_eq!(back.faces(), m.faces());
        for (a, b) in m.vertices().iter().zip(back.vertices()) {
            assert!((a - b).norm() < 1e-9);
        }
    }
}
