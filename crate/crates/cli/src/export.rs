//! Per-vertex CSV and colored PLY export.

use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use lafair::{TriangleMesh, VertexCurvature};

/// `vertex_id,x,y,z,area,deficit,K,is_boundary`, booleans as 0/1.
pub fn write_curvature_csv(
    mesh: &TriangleMesh,
    table: &[VertexCurvature],
    path: &Path,
) -> Result<()> {
    let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "vertex_id,x,y,z,area,deficit,K,is_boundary")?;
    for (v, (p, c)) in mesh.vertices().iter().zip(table).enumerate() {
        writeln!(
            out,
            "{v},{},{},{},{},{},{},{}",
            p.x,
            p.y,
            p.z,
            c.area,
            c.deficit,
            c.gaussian,
            u8::from(c.is_boundary)
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Half-width of the color scale: three robust standard deviations of `k`
/// (1.4826 times the median absolute deviation), falling back to the largest
/// magnitude when the spread vanishes.
pub fn color_scale(k: &[f64]) -> f64 {
    if k.is_empty() {
        return 1.0;
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    };
    let m = median(&mut k.to_vec());
    let mad = median(&mut k.iter().map(|x| (x - m).abs()).collect());
    let scale = 3.0 * 1.4826 * mad;
    if scale > 0.0 {
        return scale;
    }
    let max = k.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if max > 0.0 {
        max
    } else {
        1.0
    }
}

/// Blue for negative, white at zero, red for positive.
pub fn diverging_color(k: f64, scale: f64) -> [u8; 3] {
    let t = (k / scale).clamp(-1.0, 1.0);
    let fade = |t: f64| (255.0 * (1.0 - t.abs())).round() as u8;
    if t >= 0.0 {
        [255, fade(t), fade(t)]
    } else {
        [fade(t), fade(t), 255]
    }
}

/// Binary little-endian PLY with double coordinates and per-vertex colors.
pub fn write_colored_ply(mesh: &TriangleMesh, k: &[f64], path: &Path) -> Result<()> {
    let scale = color_scale(k);
    let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write!(
        out,
        "ply\nformat binary_little_endian 1.0\n\
         comment K clamped at +-{scale:e}\n\
         element vertex {}\n\
         property double x\nproperty double y\nproperty double z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\n\
         element face {}\n\
         property list uchar int vertex_indices\n\
         end_header\n",
        mesh.vertex_count(),
        mesh.face_count()
    )?;
    for (p, &kv) in mesh.vertices().iter().zip(k) {
        for c in [p.x, p.y, p.z] {
            out.write_all(&c.to_le_bytes())?;
        }
        out.write_all(&diverging_color(kv, scale))?;
    }
    for face in mesh.faces() {
        out.write_all(&[3u8])?;
        for &i in face {
            let i = i32::try_from(i).context("vertex index does not fit a PLY int")?;
            out.write_all(&i.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colors_are_symmetric_and_clamped() {
        assert_eq!(diverging_color(0.0, 1.0), [255, 255, 255]);
        assert_eq!(diverging_color(5.0, 1.0), [255, 0, 0]);
        assert_eq!(diverging_color(-5.0, 1.0), [0, 0, 255]);
        let [r, g, b] = diverging_color(0.5, 1.0);
        assert_eq!((r, g, b), (255, 128, 128));
    }

    #[test]
    fn robust_scale_ignores_outliers() {
        let mut k: Vec<f64> = (0..101).map(|i| (i as f64 - 50.0) / 50.0).collect();
        k.push(1e6);
        let s = color_scale(&k);
        assert!(s > 1.0 && s < 3.0, "{s}");
        assert_eq!(color_scale(&[0.0, 0.0]), 1.0);
        assert_eq!(color_scale(&[2.0, 2.0, -2.0, 2.0]), 2.0);
    }
}
