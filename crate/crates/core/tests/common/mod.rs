#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slipstokes::geometry::{SurfaceMesh, Vec3};
use slipstokes::slip_bvp::BoundaryData;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial vector field of degree <= 2 restricted to the mesh.
pub fn random_smooth_field(mesh: &SurfaceMesh, rng: &mut ChaCha8Rng) -> Vec<Vec3> {
    let coeffs: Vec<[f64; 10]> = (0..3)
        .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
        .collect();
    mesh.nodes()
        .iter()
        .map(|x| {
            let m = [
                1.0,
                x.x,
                x.y,
                x.z,
                x.x * x.x,
                x.y * x.y,
                x.z * x.z,
                x.x * x.y,
                x.y * x.z,
                x.z * x.x,
            ];
            Vec3::from_fn(|c, _| coeffs[c].iter().zip(&m).map(|(a, b)| a * b).sum())
        })
        .collect()
}

pub fn random_smooth_data(mesh: &SurfaceMesh, rng: &mut ChaCha8Rng) -> BoundaryData {
    BoundaryData::from_vector_field(mesh, &random_smooth_field(mesh, rng)).unwrap()
}

/// Random points with `|x| ∈ [r_min, r_max]`.
pub fn random_exterior_points(rng: &mut ChaCha8Rng, count: usize, r_min: f64, r_max: f64) -> Vec<Vec3> {
    (0..count)
        .map(|_| {
            let d = loop {
                let v = Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                let n = v.norm();
                if n > 0.1 && n <= 1.0 {
                    break v / n;
                }
            };
            d * rng.random_range(r_min..r_max)
        })
        .collect()
}
