use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TriangleMesh;
use crate::curvature::vertex_normal;

/// Displaces every vertex along its unit normal by an offset drawn uniformly
/// from `[-amplitude, amplitude]`. Deterministic for a given seed.
///
/// Normals come from the input mesh; vertices without a defined normal stay
/// put (one draw is still consumed so the stream stays aligned with indices).
pub fn add_noise(mesh: &TriangleMesh, amplitude: f64, seed: u64) -> TriangleMesh {
    assert!(amplitude >= 0.0, "noise amplitude must be non-negative");
    if amplitude == 0.0 {
        return mesh.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = (0..mesh.vertex_count())
        .map(|v| {
            let offset = rng.gen_range(-amplitude..=amplitude);
            match vertex_normal(mesh, v) {
                Ok(n) => mesh.vertex(v) + n * offset,
                Err(_) => mesh.vertex(v),
            }
        })
        .collect();
    mesh.with_positions(positions)
}
