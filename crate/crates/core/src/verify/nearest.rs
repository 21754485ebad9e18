//! Uniform-grid nearest-neighbour index and the Hausdorff distance.

use num_complex::Complex64;

use crate::exec::Execution;
use crate::model::PointCloud;

/// Bucket grid over a fixed point set; queries are exact.
pub struct NearestIndex {
    points: Vec<Complex64>,
    origin: Complex64,
    cell: f64,
    nx: usize,
    ny: usize,
    /// CSR layout: cell k owns order[start[k]..start[k + 1]]
    start: Vec<u32>,
    order: Vec<u32>,
}

impl NearestIndex {
    pub fn new(points: Vec<Complex64>) -> Self {
        assert!(!points.is_empty(), "nearest index over an empty set");
        let (mut lo, mut hi) = (points[0], points[0]);
        for z in &points {
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        let (w, h) = (hi.re - lo.re, hi.im - lo.im);
        let n = points.len() as f64;
        // about two points per cell for area-filling sets, sqrt(n) cells along curves
        let mut cell = (2.0 * w * h / n).sqrt().max(w.max(h) / n.sqrt());
        if !(cell > 0.0) {
            cell = 1.0;
        }
        let nx = (w / cell) as usize + 1;
        let ny = (h / cell) as usize + 1;
        let mut idx = Self {
            points,
            origin: lo,
            cell,
            nx,
            ny,
            start: Vec::new(),
            order: Vec::new(),
        };
        let keys: Vec<usize> = idx.points.iter().map(|&z| idx.key(idx.cell_of(z))).collect();
        let mut start = vec![0u32; nx * ny + 1];
        for &k in &keys {
            start[k + 1] += 1;
        }
        for k in 0..nx * ny {
            start[k + 1] += start[k];
        }
        let mut fill = start.clone();
        let mut order = vec![0u32; keys.len()];
        for (i, &k) in keys.iter().enumerate() {
            order[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        idx.start = start;
        idx.order = order;
        idx
    }

    pub fn from_cloud(cloud: &PointCloud) -> Self {
        Self::new(cloud.coords().collect())
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    fn cell_of(&self, z: Complex64) -> (usize, usize) {
        let fx = ((z.re - self.origin.re) / self.cell).floor();
        let fy = ((z.im - self.origin.im) / self.cell).floor();
        let clamp = |f: f64, n: usize| if f.is_nan() || f < 0.0 { 0 } else { (f as usize).min(n - 1) };
        (clamp(fx, self.nx), clamp(fy, self.ny))
    }

    fn key(&self, (x, y): (usize, usize)) -> usize {
        y * self.nx + x
    }

    /// (index, distance) of the closest point.
    pub fn nearest(&self, q: Complex64) -> (usize, f64) {
        let (cx, cy) = self.cell_of(q);
        let mut best = (usize::MAX, f64::INFINITY);
        let max_r = self.nx.max(self.ny);
        for r in 0..=max_r {
            let x0 = cx as isize - r as isize;
            let x1 = cx as isize + r as isize;
            let y0 = cy as isize - r as isize;
            let y1 = cy as isize + r as isize;
            for y in y0..=y1 {
                if y < 0 || y >= self.ny as isize {
                    continue;
                }
                let on_edge_row = y == y0 || y == y1;
                let mut x = x0;
                while x <= x1 {
                    if x >= 0 && x < self.nx as isize {
                        let k = self.key((x as usize, y as usize));
                        for &i in &self.order[self.start[k] as usize..self.start[k + 1] as usize] {
                            let d = (self.points[i as usize] - q).norm_sqr();
                            if d < best.1 {
                                best = (i as usize, d);
                            }
                        }
                    }
                    // interior rows only need the two edge cells of the ring
                    x = if on_edge_row || x == x1 { x + 1 } else { x1 };
                }
            }
            // anything in ring r+1 or beyond is at least r cells away
            if best.0 != usize::MAX && best.1.sqrt() <= r as f64 * self.cell {
                break;
            }
        }
        (best.0, best.1.sqrt())
    }
}

/// sup over `from` of the distance to the nearest point of `to`.
pub fn directed_hausdorff(from: &[Complex64], to: &NearestIndex, exec: Execution) -> f64 {
    exec.map_slice(from, |&z| to.nearest(z).1).into_iter().fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two finite clouds.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    hausdorff_with(a, b, Execution::default())
}

pub fn hausdorff_with(a: &PointCloud, b: &PointCloud, exec: Execution) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "hausdorff needs nonempty clouds");
    let pa: Vec<Complex64> = a.coords().collect();
    let pb: Vec<Complex64> = b.coords().collect();
    let ia = NearestIndex::new(pa.clone());
    let ib = NearestIndex::new(pb.clone());
    directed_hausdorff(&pa, &ib, exec).max(directed_hausdorff(&pb, &ia, exec))
}
