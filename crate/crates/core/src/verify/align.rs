//! Complex-affine alignment z -> a z + b of one cloud onto another.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::nearest::{directed_hausdorff, NearestIndex};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::PointCloud;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub a: Complex64,
    pub b: Complex64,
    /// Hausdorff(a·model + b, target) / diameter(target)
    pub residual: f64,
}

impl Alignment {
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }

    pub fn pull_back(&self, w: Complex64) -> Complex64 {
        (w - self.b) / self.a
    }
}

/// Principal-axis angle (mod π) and RMS radius about the centroid.
fn moments(pts: &[Complex64], centroid: Complex64) -> (f64, f64) {
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for z in pts {
        let d = z - centroid;
        sxx += d.re * d.re;
        syy += d.im * d.im;
        sxy += d.re * d.im;
    }
    (0.5 * (2.0 * sxy).atan2(sxx - syy), ((sxx + syy) / pts.len() as f64).sqrt())
}

/// Least-squares a, b minimizing Σ |a m + b - t|².
fn fit(pairs: &[(Complex64, Complex64)]) -> Option<(Complex64, Complex64)> {
    let n = pairs.len() as f64;
    let mm = pairs.iter().map(|p| p.0).sum::<Complex64>() / n;
    let tm = pairs.iter().map(|p| p.1).sum::<Complex64>() / n;
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for &(m, t) in pairs {
        let dm = m - mm;
        num += dm.conj() * (t - tm);
        den += dm.norm_sqr();
    }
    if !(den > 0.0) {
        return None;
    }
    let a = num / den;
    Some((a, tm - a * mm))
}

struct Problem {
    model: Vec<Complex64>,
    target: Vec<Complex64>,
    target_index: NearestIndex,
    target_diameter: f64,
    exec: Execution,
}

impl Problem {
    fn residual(&self, a: Complex64, b: Complex64) -> f64 {
        let mapped: Vec<Complex64> = self.model.iter().map(|&z| a * z + b).collect();
        let mi = NearestIndex::new(mapped.clone());
        let h = directed_hausdorff(&mapped, &self.target_index, self.exec)
            .max(directed_hausdorff(&self.target, &mi, self.exec));
        h / self.target_diameter
    }

    /// Alternates nearest-neighbour matching in both directions with the
    /// affine least-squares fit.
    fn refine(&self, mut a: Complex64, mut b: Complex64, iterations: usize) -> (Complex64, Complex64) {
        for _ in 0..iterations {
            let mapped: Vec<Complex64> = self.model.iter().map(|&z| a * z + b).collect();
            let mi = NearestIndex::new(mapped);
            let fwd = self
                .exec
                .map_slice(&self.model, |&z| self.target[self.target_index.nearest(a * z + b).0]);
            let back = self.exec.map_slice(&self.target, |&t| self.model[mi.nearest(t).0]);
            let mut pairs: Vec<(Complex64, Complex64)> = self.model.iter().copied().zip(fwd).collect();
            pairs.extend(back.into_iter().zip(self.target.iter().copied()));
            let Some((na, nb)) = fit(&pairs) else { break };
            let moved = (na - a).norm() / a.norm() + (nb - b).norm() / self.target_diameter;
            a = na;
            b = nb;
            if moved < 1e-15 {
                break;
            }
        }
        (a, b)
    }
}

/// Aligns `model` onto `target` with an orientation-preserving
/// complex-affine map. Starts from the diameter ratio, principal-axis
/// phases (several branches, the axis is only defined mod π) and matched
/// centroids, then runs `iterations` rounds of matching and refitting.
pub fn align_similarity(model: &PointCloud, target: &PointCloud, iterations: usize) -> Result<Alignment> {
    align_similarity_with(model, target, iterations, Execution::default())
}

pub fn align_similarity_with(model: &PointCloud, target: &PointCloud, iterations: usize, exec: Execution) -> Result<Alignment> {
    if model.is_empty() || target.is_empty() {
        return Err(Error::DegenerateCloud);
    }
    let (dm, dt) = (model.diameter(), target.diameter());
    if !(dm > 0.0 && dt > 0.0) {
        return Err(Error::DegenerateCloud);
    }
    let pm: Vec<Complex64> = model.coords().collect();
    let pt: Vec<Complex64> = target.coords().collect();
    let (cm, ct) = (model.centroid().unwrap(), target.centroid().unwrap());
    let (phase_m, _) = moments(&pm, cm);
    let (phase_t, _) = moments(&pt, ct);
    let problem = Problem {
        target_index: NearestIndex::new(pt.clone()),
        model: pm,
        target: pt,
        target_diameter: dt,
        exec,
    };

    let scale = dt / dm;
    let mut best: Option<Alignment> = None;
    for k in 0..8 {
        let a0 = Complex64::from_polar(scale, phase_t - phase_m + k as f64 * PI / 4.0);
        let b0 = ct - a0 * cm;
        let (a, b) = problem.refine(a0, b0, iterations);
        let residual = problem.residual(a, b);
        if best.is_none_or(|x| residual < x.residual) {
            best = Some(Alignment { a, b, residual });
        }
    }
    Ok(best.unwrap())
}
