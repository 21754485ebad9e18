use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PointCloud;

const BURN_IN: usize = 20;
/// Deduplication grid: cloud extent / DEDUP_CELLS.
const DEDUP_CELLS: f64 = 2048.0;

/// 1/2 + sqrt(1/4 + |c|): J_c lies in this disk.
pub fn escape_bound(c: Complex64) -> f64 {
    0.5 + (0.25 + c.norm()).sqrt()
}

/// Random inverse iteration from the β fixed point.
///
/// β itself is kept (it always lies on J_c); after a burn-in the chain
/// z -> ±sqrt(z - c) with uniform branch choice supplies the rest. The
/// cloud is deduplicated on a grid of extent/2048, so it may hold fewer
/// than `n_points + 1` points.
pub fn sample_julia(c: Complex64, n_points: usize, seed: u64) -> PointCloud {
    let beta = (Complex64::new(1.0, 0.0) + (Complex64::new(1.0, 0.0) - c * 4.0).sqrt()) / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = beta;
    let step = |z: Complex64, rng: &mut ChaCha8Rng| {
        let r = (z - c).sqrt();
        if rng.gen::<bool>() {
            r
        } else {
            -r
        }
    };
    for _ in 0..BURN_IN {
        z = step(z, &mut rng);
    }
    let mut cloud = PointCloud::new(format!("J({c})"));
    cloud.push(beta, None);
    for _ in 0..n_points {
        z = step(z, &mut rng);
        cloud.push(z, None);
    }
    let res = cloud.extent() / DEDUP_CELLS;
    cloud.dedup(res);
    cloud
}
