use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{sample_julia, ModelSpec, PointCloud};
use crate::bottcher::{green_k, green_m, inverse_phi_c, inverse_phi_m};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Inversion tolerance (relative Newton step).
const INVERSION_TOL: f64 = 1e-15;
/// Iteration budget for the potential check of emitted points.
const BAND_N_MAX: usize = 2000;
/// Slack on annulus containment for rounding in the root extraction.
const ANNULUS_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: u32,
    pub requested: usize,
    pub emitted: usize,
    pub dropped: usize,
    /// emitted points whose potential lies in the level's band
    pub in_band: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBuild {
    pub cloud: PointCloud,
    pub levels: Vec<LevelStats>,
}

impl ModelBuild {
    pub fn emitted(&self) -> usize {
        self.levels.iter().map(|l| l.emitted).sum()
    }

    pub fn dropped(&self) -> usize {
        self.levels.iter().map(|l| l.dropped).sum()
    }

    /// Fraction of emitted points inside their potential band.
    pub fn band_fraction(&self) -> f64 {
        let n = self.emitted();
        if n == 0 {
            return 0.0;
        }
        self.levels.iter().map(|l| l.in_band).sum::<usize>() as f64 / n as f64
    }
}

/// Γ0 = J × ρ/ρ'², after checking ρ' <= |z| <= ρ on every sample.
pub fn rescale_gamma0(julia: &PointCloud, spec: &ModelSpec) -> Result<PointCloud> {
    spec.validate()?;
    if julia.is_empty() {
        return Err(Error::InvalidInput("empty Julia sample".into()));
    }
    let (min, max) = julia
        .coords()
        .map(|z| z.norm())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    if min < spec.rho_prime || max > spec.rho {
        return Err(Error::RadiiDoNotBracket {
            min,
            max,
            inner: spec.rho_prime,
            outer: spec.rho,
        });
    }
    let k = spec.gamma_factor();
    let mut out = PointCloud::from_points("gamma0", julia.coords().map(|z| z * k), Some(0));
    out.label = format!("gamma0({})", julia.label);
    Ok(out)
}

/// All 2^m-th roots of every point, labelled with level m.
pub fn gamma_m(gamma0: &PointCloud, m: u32) -> PointCloud {
    if m == 0 {
        return gamma0.clone();
    }
    let n = 1usize << m;
    let inv = 1.0 / n as f64;
    let mut out = PointCloud::new(format!("gamma{m}"));
    out.points.reserve(n * gamma0.len());
    for w in gamma0.coords() {
        let r = w.norm().powf(inv);
        let a = w.arg();
        for j in 0..n {
            out.push(Complex64::from_polar(r, (a + TAU * j as f64) * inv), Some(m));
        }
    }
    out
}

/// Points of a level outside its open annulus (with rounding slack).
fn annulus_violations(level: &PointCloud, m: u32, spec: &ModelSpec) -> usize {
    let (lo, hi) = spec.level_annulus(m);
    level
        .coords()
        .filter(|w| {
            let r = w.norm();
            r < lo * (1.0 - ANNULUS_SLACK) || r > hi * (1.0 + ANNULUS_SLACK)
        })
        .count()
}

/// Pulls every Γ_m through `invert`, checking the annulus chain and the
/// potential bands on the way.
fn decorate<I, G>(gamma0: &PointCloud, spec: &ModelSpec, label: String, exec: Execution, invert: I, potential: G) -> Result<ModelBuild>
where
    I: Fn(Complex64) -> Result<Complex64> + Sync + Send,
    G: Fn(Complex64) -> f64 + Sync + Send,
{
    let mut cloud = PointCloud::new(label);
    let mut levels = Vec::new();
    for m in 0..=spec.m_max {
        let gm = gamma_m(gamma0, m);
        let bad = annulus_violations(&gm, m, spec);
        if bad > 0 {
            return Err(Error::InvalidInput(format!("{bad} points of level {m} leave their annulus")));
        }
        let (lo, hi) = spec.level_band(m);
        let results: Vec<Option<(Complex64, bool)>> = exec.map_slice(&gm.points, |p| {
            let c = invert(p.z).ok()?;
            let g = potential(c);
            Some((c, g > lo && g < hi))
        });
        let total = results.len();
        let mut stats = LevelStats {
            level: m,
            requested: total,
            emitted: 0,
            dropped: 0,
            in_band: 0,
        };
        for r in results {
            match r {
                Some((c, ok)) => {
                    cloud.push(c, Some(m));
                    stats.emitted += 1;
                    stats.in_band += ok as usize;
                }
                None => stats.dropped += 1,
            }
        }
        if stats.dropped * 10 > total {
            return Err(Error::TooManyDrops {
                level: m,
                dropped: stats.dropped,
                total,
            });
        }
        levels.push(stats);
    }
    Ok(ModelBuild { cloud, levels })
}

/// Decorations of M(c'): Φ_M⁻¹ of Γ_m for m <= m_max. M itself is implicit.
pub fn build_model_m(spec: &ModelSpec, exec: Execution) -> Result<ModelBuild> {
    let julia = sample_julia(spec.c_prime, spec.samples_per_level, spec.seed);
    build_nested_model(spec, &julia, exec)
}

/// Decorations of K_c(c'): Φ_c⁻¹ of Γ_m in the dynamical plane of c.
pub fn build_model_k(c: Complex64, spec: &ModelSpec, exec: Execution) -> Result<ModelBuild> {
    let julia = sample_julia(spec.c_prime, spec.samples_per_level, spec.seed);
    let gamma0 = rescale_gamma0(&julia, spec)?;
    decorate(
        &gamma0,
        spec,
        format!("K_{c}({})", spec.c_prime),
        exec,
        |w| inverse_phi_c(c, w, None, INVERSION_TOL),
        |z| green_k(c, z, BAND_N_MAX).green,
    )
}

/// Same pipeline as `build_model_m` with `inner` in place of J_{c'}.
pub fn build_nested_model(spec: &ModelSpec, inner: &PointCloud, exec: Execution) -> Result<ModelBuild> {
    let gamma0 = rescale_gamma0(inner, spec)?;
    decorate(
        &gamma0,
        spec,
        format!("M({})", spec.c_prime),
        exec,
        |w| inverse_phi_m(w, None, INVERSION_TOL),
        |c| green_m(c, BAND_N_MAX),
    )
}
