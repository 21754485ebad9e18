//! The quadratic iteration P_c(z) = z^2 + c with its derivative recursions.

use rug::Float;

use crate::error::{Error, Result};
use crate::hp::{HpComplex, Scratch};
use crate::newton::{Failure, Newton};

/// Default escape radius for membership decisions.
pub const ESCAPE_RADIUS: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitState {
    pub z: HpComplex,
    /// dz_n/dc, starting at 0.
    pub dz_dc: Option<HpComplex>,
    /// dz_n/dz_0, starting at 1.
    pub dz_dz0: Option<HpComplex>,
}

#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub c: HpComplex,
    pub states: Vec<OrbitState>,
    /// Smallest n with |z_n| > escape_radius.
    pub escaped_at: Option<usize>,
    /// Set when the working precision's exponent range overflowed.
    pub overflow: bool,
    pub escape_radius: f64,
}

impl OrbitRecord {
    pub fn z(&self, n: usize) -> &HpComplex {
        &self.states[n].z
    }

    pub fn last(&self) -> &OrbitState {
        self.states.last().expect("orbit has at least z0")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IterateOptions {
    pub with_derivatives: bool,
    pub escape_radius: f64,
    /// Stop recording after the escape index.
    pub stop_at_escape: bool,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self {
            with_derivatives: false,
            escape_radius: ESCAPE_RADIUS,
            stop_at_escape: false,
        }
    }
}

/// Iterates z0 under P_c for n steps, recording every state.
pub fn iterate(c: &HpComplex, z0: &HpComplex, n: usize, opts: IterateOptions) -> Result<OrbitRecord> {
    if !(opts.escape_radius >= ESCAPE_RADIUS) {
        return Err(Error::InvalidInput(format!(
            "escape radius {} is below 2",
            opts.escape_radius
        )));
    }
    let prec = c.prec().max(z0.prec());
    let c = c.with_prec(prec);
    let mut scratch = Scratch::new(prec);
    let radius_sq = Float::with_val(prec, opts.escape_radius * opts.escape_radius);

    let mut z = z0.with_prec(prec);
    let mut dc = HpComplex::zero(prec);
    let mut dz = HpComplex::real(1.0, prec);
    let mut states = Vec::with_capacity(n + 1);
    let mut escaped_at = None;
    let mut overflow = false;

    for i in 0..=n {
        states.push(OrbitState {
            z: z.clone(),
            dz_dc: opts.with_derivatives.then(|| dc.clone()),
            dz_dz0: opts.with_derivatives.then(|| dz.clone()),
        });
        if !z.is_finite() {
            overflow = true;
            escaped_at.get_or_insert(i);
            break;
        }
        if escaped_at.is_none() && *scratch.norm_sqr(&z) > radius_sq {
            escaped_at = Some(i);
            if opts.stop_at_escape {
                break;
            }
        }
        if i == n {
            break;
        }
        if opts.with_derivatives {
            scratch.double_mul_add(&mut dc, &z, 1);
            scratch.double_mul_add(&mut dz, &z, 0);
        }
        scratch.square_add(&mut z, &c);
    }
    Ok(OrbitRecord {
        c,
        states,
        escaped_at,
        overflow,
        escape_radius: opts.escape_radius,
    })
}

/// (P_c^n(z0), d/dc P_c^n(z0)) without recording the orbit.
pub(crate) fn orbit_with_dc(c: &HpComplex, z0: &HpComplex, n: usize) -> (HpComplex, HpComplex) {
    let prec = c.prec().max(z0.prec());
    let mut s = Scratch::new(prec);
    let mut z = z0.with_prec(prec);
    let mut dc = HpComplex::zero(prec);
    for _ in 0..n {
        s.double_mul_add(&mut dc, &z, 1);
        s.square_add(&mut z, c);
    }
    (z, dc)
}

/// Critical orbit points z_0 = 0, z_1 = c, ..., z_n with their c-derivatives.
pub(crate) fn critical_orbit_with_dc(c: &HpComplex, n: usize) -> Vec<(HpComplex, HpComplex)> {
    let prec = c.prec();
    let mut s = Scratch::new(prec);
    let mut z = HpComplex::zero(prec);
    let mut dc = HpComplex::zero(prec);
    let mut out = Vec::with_capacity(n + 1);
    out.push((z.clone(), dc.clone()));
    for _ in 0..n {
        s.double_mul_add(&mut dc, &z, 1);
        s.square_add(&mut z, c);
        out.push((z.clone(), dc.clone()));
    }
    out
}

/// (P_c^n(z), (P_c^n)'(z)).
pub(crate) fn orbit_with_dz(c: &HpComplex, z0: &HpComplex, n: usize) -> (HpComplex, HpComplex) {
    let prec = c.prec().max(z0.prec());
    let mut s = Scratch::new(prec);
    let mut z = z0.with_prec(prec);
    let mut dz = HpComplex::real(1.0, prec);
    for _ in 0..n {
        s.double_mul_add(&mut dz, &z, 0);
        s.square_add(&mut z, c);
    }
    (z, dz)
}

/// |P_c^n(0)| for each n in 0..=n_max, as doubles.
pub(crate) fn critical_moduli(c: &HpComplex, n_max: usize) -> Vec<f64> {
    let mut s = Scratch::new(c.prec());
    let mut z = HpComplex::zero(c.prec());
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(0.0);
    for _ in 0..n_max {
        s.square_add(&mut z, c);
        out.push(z.abs_f64());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleKind {
    Superattracting,
    Attracting,
    Indifferent,
    Repelling,
}

#[derive(Clone, Debug)]
pub struct CycleRecord {
    pub c: HpComplex,
    pub z: HpComplex,
    pub period: usize,
    pub multiplier: HpComplex,
    pub residual: f64,
}

impl CycleRecord {
    /// |multiplier| within `tol` of 1 counts as indifferent.
    pub fn classify(&self, tol: f64) -> CycleKind {
        let m = self.multiplier.abs_f64();
        if self.multiplier.is_zero() || m < tol {
            CycleKind::Superattracting
        } else if (m - 1.0).abs() <= tol {
            CycleKind::Indifferent
        } else if m < 1.0 {
            CycleKind::Attracting
        } else {
            CycleKind::Repelling
        }
    }

    /// All points of the cycle, starting at `z`.
    pub fn points(&self) -> Vec<HpComplex> {
        let mut s = Scratch::new(self.z.prec());
        let mut z = self.z.clone();
        let mut out = Vec::with_capacity(self.period);
        for _ in 0..self.period {
            out.push(z.clone());
            s.square_add(&mut z, &self.c);
        }
        out
    }
}

/// Newton on z -> P_c^period(z) - z from `seed`.
pub fn find_cycle(c: &HpComplex, seed: &HpComplex, period: usize, tol: f64) -> Result<CycleRecord> {
    if period == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    let prec = c.prec().max(seed.prec());
    let c = c.with_prec(prec);
    let newton = Newton::new(tol);
    let one = HpComplex::real(1.0, prec);
    let out = newton
        .solve(&seed.with_prec(prec), |z| {
            let (w, dw) = orbit_with_dz(&c, z, period);
            (&w - z, &dw - &one)
        })
        .map_err(|e| match e {
            Failure::Degenerate => Error::DegenerateSeed,
            Failure::NoConvergence => Error::NoCycleNearSeed,
        })?;
    let (_, multiplier) = orbit_with_dz(&c, &out.x, period);
    Ok(CycleRecord {
        c,
        z: out.x,
        period,
        multiplier,
        residual: out.residual,
    })
}
