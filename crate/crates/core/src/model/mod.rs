//! Decorated model sets: rescaled Julia sets, their preimage towers under
//! z^(2^m), and the decorations pulled back through Böttcher coordinates.

mod build;
mod cloud;
mod julia;

pub use build::{build_model_k, build_model_m, build_nested_model, gamma_m, rescale_gamma0, LevelStats, ModelBuild};
pub use cloud::{CloudPoint, PointCloud};
pub use julia::{escape_bound, sample_julia};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_M_MAX: u32 = 6;

/// Recipe (c', ρ', ρ, m_max) for a decorated model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub c_prime: Complex64,
    pub rho_prime: f64,
    pub rho: f64,
    pub m_max: u32,
    pub samples_per_level: usize,
    pub seed: u64,
}

impl ModelSpec {
    /// Douady radii ρ' = R^(-1/2), ρ = R^(1/2).
    pub fn douady(c_prime: Complex64, r: f64, m_max: u32, samples_per_level: usize, seed: u64) -> Result<Self> {
        Self::new(c_prime, r.powf(-0.5), r.sqrt(), m_max, samples_per_level, seed)
    }

    pub fn new(c_prime: Complex64, rho_prime: f64, rho: f64, m_max: u32, samples_per_level: usize, seed: u64) -> Result<Self> {
        let spec = Self {
            c_prime,
            rho_prime,
            rho,
            m_max,
            samples_per_level,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho_prime > 0.0 && self.rho > self.rho_prime && self.rho.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "need 0 < rho' < rho, got rho' = {}, rho = {}",
                self.rho_prime, self.rho
            )));
        }
        if self.samples_per_level == 0 {
            return Err(Error::InvalidInput("samples_per_level must be positive".into()));
        }
        if !(self.c_prime.re.is_finite() && self.c_prime.im.is_finite()) {
            return Err(Error::InvalidInput("c' must be finite".into()));
        }
        Ok(())
    }

    /// R = ρ / ρ'.
    pub fn r(&self) -> f64 {
        self.rho / self.rho_prime
    }

    /// Γ0 = J_{c'} × ρ/ρ'².
    pub fn gamma_factor(&self) -> f64 {
        self.rho / (self.rho_prime * self.rho_prime)
    }

    /// Open annulus (R^(1/2^m), R^(2/2^m)) holding level m.
    pub fn level_annulus(&self, m: u32) -> (f64, f64) {
        let e = 0.5f64.powi(m as i32);
        let r = self.r();
        (r.powf(e), r.powf(2.0 * e))
    }

    /// Green's function band (2^-m log R, 2^(1-m) log R) for level m.
    pub fn level_band(&self, m: u32) -> (f64, f64) {
        let (lo, hi) = self.level_annulus(m);
        (lo.ln(), hi.ln())
    }
}
