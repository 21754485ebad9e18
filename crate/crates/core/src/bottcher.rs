//! Green's function and Böttcher coordinates of K_c and M.
//!
//! Everything here runs in double precision. Decorations live at moderate
//! potential (G >= log R / 2^m_max), where doubles lose nothing measurable;
//! the product and Newton kernels are organised so that the large iterates
//! never need to be raised to fractional powers directly.
//!
//! Branches: near infinity the product
//! `Φ_c(z) = z · Π (1 + c/z_n²)^(1/2^(n+1))` is valid with principal powers.
//! Elsewhere the argument of Φ is recovered by tracing a gradient line of G
//! out to that region and carrying the angle back continuously.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// |z_n| beyond which the principal tail product is used.
pub const BAILOUT: f64 = 1e10;

/// Default iteration budget.
pub const DEFAULT_N_MAX: usize = 200;

/// Hard floor on |w| for the inverse maps.
pub const MIN_MODULUS: f64 = 1.0 + 1e-12;

/// Continuation steps per halving of the potential.
const STEPS_PER_HALVING: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialValue {
    pub green: f64,
    /// arg Φ in [0, 2π); `None` when Φ is not defined at the point (inside
    /// K_c, or below the critical level when K_c is disconnected).
    pub external_angle_arg: Option<f64>,
    pub valid: bool,
}

#[derive(Clone, Copy, Debug)]
enum Plane {
    /// Φ_M(c) = Φ_c(c); the orbit starts at z_1 = c.
    Parameter,
    /// Φ_c on the dynamical plane of a fixed c.
    Dynamical(Complex64),
}

/// Escape data at depth n: Φ(x)^scale = Φ_c(z_n).
#[derive(Clone, Copy, Debug)]
struct Local {
    n: usize,
    scale: f64,
    /// principal log Φ_c(z_n)
    log_phi_n: Complex64,
    z_n: Complex64,
    /// dz_n / dx
    dz_n: Complex64,
}

impl Local {
    fn green(&self) -> f64 {
        self.log_phi_n.re / self.scale
    }

    /// d/dx log Φ(x), dropping the tail correction.
    fn dlog(&self) -> Complex64 {
        self.dz_n / (self.z_n * self.scale)
    }
}

impl Plane {
    fn c(&self, x: Complex64) -> Complex64 {
        match *self {
            Plane::Parameter => x,
            Plane::Dynamical(c) => c,
        }
    }

    /// Orbit start: (index, z, dz/dx, additive term in the derivative recursion).
    fn start(&self, x: Complex64) -> (usize, Complex64, Complex64, f64) {
        match *self {
            Plane::Parameter => (1, x, Complex64::new(1.0, 0.0), 1.0),
            Plane::Dynamical(_) => (0, x, Complex64::new(1.0, 0.0), 0.0),
        }
    }

    fn scale(&self, n: usize) -> f64 {
        match *self {
            Plane::Parameter => ((n - 1) as f64).exp2(),
            Plane::Dynamical(_) => (n as f64).exp2(),
        }
    }

    /// Radius beyond which the principal product is valid for every x.
    fn far(&self) -> f64 {
        match *self {
            Plane::Parameter => 4.0,
            Plane::Dynamical(c) => 4.0 * c.norm().max(1.0),
        }
    }

    fn bailout(&self, x: Complex64) -> f64 {
        BAILOUT * self.c(x).norm().max(1.0)
    }

    /// Iterates until |z_n| exceeds the bailout.
    fn escape(&self, x: Complex64, n_max: usize) -> Option<Local> {
        let c = self.c(x);
        let (mut n, mut z, mut dz, k) = self.start(x);
        let b2 = self.bailout(x).powi(2);
        loop {
            if z.norm_sqr() > b2 {
                break;
            }
            if n >= n_max || !z.is_finite() {
                return None;
            }
            dz = dz * z * 2.0 + k;
            z = z * z + c;
            n += 1;
        }
        Some(Local {
            n,
            scale: self.scale(n),
            log_phi_n: tail_log(c, z),
            z_n: z,
            dz_n: dz,
        })
    }

    /// Same as `escape` but stops at a prescribed depth (must be reached).
    fn at_depth(&self, x: Complex64, depth: usize) -> Option<Local> {
        let c = self.c(x);
        let (mut n, mut z, mut dz, k) = self.start(x);
        while n < depth {
            dz = dz * z * 2.0 + k;
            z = z * z + c;
            n += 1;
        }
        // principal branch needs |c/z²| well below 1
        if !z.is_finite() || z.norm_sqr() < 1e6 * c.norm().max(1.0) {
            return None;
        }
        Some(Local {
            n,
            scale: self.scale(n),
            log_phi_n: tail_log(c, z),
            z_n: z,
            dz_n: dz,
        })
    }

    /// Principal log Φ(x) when x lies in the far region.
    fn far_log(&self, x: Complex64) -> Complex64 {
        tail_log(self.c(x), x)
    }

    /// log Φ at the far region entry point for a given potential.
    fn seed_for(&self, w: Complex64) -> Complex64 {
        match *self {
            // Φ_M(c) = c + 1/2 + O(1/c)
            Plane::Parameter => w - 0.5,
            // Φ_c(z) = z + c/(2z) + ...
            Plane::Dynamical(c) => w - c / (w * 2.0),
        }
    }
}

/// Principal log Φ_c(z) for |z| large: log z + Σ log(1 + c/z_j²) / 2^(j+1).
fn tail_log(c: Complex64, z: Complex64) -> Complex64 {
    let mut acc = z.ln();
    let mut z = z;
    let mut weight = 0.5;
    for _ in 0..64 {
        let q = c / (z * z);
        if !q.is_finite() || q.norm() * weight < 1e-20 {
            break;
        }
        acc += (q + 1.0).ln() * weight;
        z = z * z + c;
        weight *= 0.5;
    }
    acc
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Green's function of K_c at z.
pub fn green_k(c: Complex64, z: Complex64, n_max: usize) -> PotentialValue {
    let plane = Plane::Dynamical(c);
    match plane.escape(z, n_max.max(1)) {
        None => PotentialValue {
            green: 0.0,
            external_angle_arg: None,
            valid: false,
        },
        Some(local) => {
            let g = local.green();
            let angle = if above_critical_level(c, g, n_max) {
                phi_generic(plane, z, n_max).ok().map(|w| w.arg().rem_euclid(TAU))
            } else {
                None
            };
            PotentialValue {
                green: g,
                external_angle_arg: angle,
                valid: true,
            }
        }
    }
}

/// G_M(c) = G_c(c); zero on M (within budget).
pub fn green_m(c: Complex64, n_max: usize) -> f64 {
    Plane::Parameter.escape(c, n_max.max(1)).map_or(0.0, |l| l.green())
}

/// Φ_c extends to {G_c > G_c(0)}; for connected K_c that is the whole
/// basin of infinity.
fn above_critical_level(c: Complex64, g: f64, n_max: usize) -> bool {
    let crit = green_m(c, n_max) / 2.0;
    crit == 0.0 || g > crit * (1.0 + 1e-9)
}

/// Φ_M(c) for c outside M.
pub fn phi_m(c: Complex64, n_max: usize) -> Result<Complex64> {
    phi_generic(Plane::Parameter, c, n_max)
}

/// Φ_c(z), defined where G_c(z) > G_c(0).
pub fn phi_c(c: Complex64, z: Complex64, n_max: usize) -> Result<Complex64> {
    if let Some(local) = Plane::Dynamical(c).escape(z, n_max) {
        if !above_critical_level(c, local.green(), n_max) {
            return Err(Error::BottcherDomain(local.green()));
        }
    }
    phi_generic(Plane::Dynamical(c), z, n_max)
}

fn phi_generic(plane: Plane, x0: Complex64, n_max: usize) -> Result<Complex64> {
    let Some(first) = plane.escape(x0, n_max) else {
        return Err(Error::BottcherUndefined);
    };
    // Climb the gradient of G until the principal product is valid, keeping
    // the depth-n angle of consecutive points within a third of a turn.
    let mut path: Vec<Local> = vec![first];
    let mut x = x0;
    while x.norm() < plane.far() {
        let cur = *path.last().unwrap();
        let g = cur.green();
        let d = cur.dlog();
        let mut dg = g * (2f64.powf(1.0 / STEPS_PER_HALVING) - 1.0);
        let mut accepted = None;
        for _ in 0..40 {
            let nx = x + d.conj() * (dg / d.norm_sqr());
            if let Some(check) = plane.at_depth(nx, cur.n) {
                if wrap(check.log_phi_n.im - cur.log_phi_n.im).abs() < PI / 3.0 {
                    accepted = Some(nx);
                    break;
                }
            }
            dg *= 0.5;
        }
        let Some(nx) = accepted else {
            return Err(Error::InversionFailed);
        };
        x = nx;
        let Some(next) = plane.escape(x, n_max) else {
            return Err(Error::InversionFailed);
        };
        path.push(next);
        if path.len() > 100_000 {
            return Err(Error::InversionFailed);
        }
    }
    // Carry the angle back from the far end.
    let mut log_phi = plane.far_log(x);
    for local in path[..path.len() - 1].iter().rev() {
        let lifted = log_phi.im * local.scale;
        let j = ((lifted - local.log_phi_n.im) / TAU).round();
        log_phi = Complex64::new(local.green(), (local.log_phi_n.im + TAU * j) / local.scale);
    }
    Ok(log_phi.exp())
}

/// Φ_M⁻¹(w) for |w| > 1.
pub fn inverse_phi_m(w: Complex64, seed: Option<Complex64>, tol: f64) -> Result<Complex64> {
    if !(w.norm() > MIN_MODULUS) {
        return Err(Error::BottcherDomain(w.norm()));
    }
    inverse_generic(Plane::Parameter, w, seed, tol)
}

/// Φ_c⁻¹(w); for c outside M only |w| > exp(G_c(0)) is in the domain.
pub fn inverse_phi_c(c: Complex64, w: Complex64, seed: Option<Complex64>, tol: f64) -> Result<Complex64> {
    let floor = (green_m(c, DEFAULT_N_MAX) / 2.0).exp().max(1.0) * MIN_MODULUS;
    if !(w.norm() > floor) {
        return Err(Error::BottcherDomain(w.norm()));
    }
    inverse_generic(Plane::Dynamical(c), w, seed, tol)
}

/// Newton on Φ_c(z_n(x)) = w^scale with the depth chosen so that the
/// right-hand side is beyond the bailout.
fn newton_at(plane: Plane, log_w: Complex64, x0: Complex64, tol: f64) -> Option<(Complex64, Local)> {
    let g = log_w.re;
    let bail = plane.bailout(x0).ln();
    let (first, _, _, _) = plane.start(x0);
    let mut n = first;
    while plane.scale(n) * g < bail {
        n += 1;
        if n > 1100 {
            return None;
        }
    }
    let scale = plane.scale(n);
    // target log, reduced mod 2πi: only its exponential matters
    let target = Complex64::new(log_w.re * scale, wrap(log_w.im * scale));
    let mut x = x0;
    let mut last_step = f64::INFINITY;
    for _ in 0..60 {
        let local = plane.at_depth(x, n)?;
        // residual in log space: log Φ_c(z_n) - target, reduced
        let diff = local.log_phi_n - target;
        let diff = Complex64::new(diff.re, wrap(diff.im));
        // d/dx log Φ_c(z_n) ≈ dz_n / z_n
        let d = local.dz_n / local.z_n;
        if d.norm_sqr() == 0.0 || !d.is_finite() {
            return None;
        }
        let step = diff / d;
        x -= step;
        let s = step.norm();
        if !x.is_finite() {
            return None;
        }
        if s <= tol * x.norm().max(1.0) || (s >= last_step && s < 1e3 * tol * x.norm().max(1.0)) {
            let local = plane.at_depth(x, n)?;
            return Some((x, local));
        }
        last_step = s;
    }
    None
}

fn inverse_generic(plane: Plane, w: Complex64, seed: Option<Complex64>, tol: f64) -> Result<Complex64> {
    let tol = tol.max(1e-15);
    let theta = w.arg();
    let g_target = w.norm().ln();
    let start_radius = 1e3 * plane.c(w).norm().max(1.0);
    let direct = |x0: Complex64| newton_at(plane, Complex64::new(g_target, theta), x0, tol);
    if let Some(s) = seed {
        if let Some((x, _)) = direct(s) {
            if verify_angle(plane, x, theta) {
                return Ok(x);
            }
        }
    }
    if w.norm() >= start_radius {
        let x0 = plane.seed_for(w);
        return direct(x0).map(|(x, _)| x).ok_or(Error::InversionFailed);
    }
    let ratio = 2f64.powf(-1.0 / STEPS_PER_HALVING);
    let mut g = start_radius.ln();
    let mut x = plane.seed_for(Complex64::from_polar(start_radius, theta));
    // settle the start point
    x = newton_at(plane, Complex64::new(g, theta), x, tol).ok_or(Error::InversionFailed)?.0;
    while g > g_target {
        let mut next_g = (g * ratio).max(g_target);
        let mut done = false;
        for _ in 0..30 {
            if let Some((nx, local)) = newton_at(plane, Complex64::new(next_g, theta), x, tol) {
                // Same branch: in the depth-n log coordinate the move must be
                // the predicted real shift, not a shift by a multiple of 2πi.
                if let Some(prev) = plane.at_depth(x, local.n) {
                    let moved = (nx - x) * (prev.dz_n / prev.z_n);
                    let expected = (next_g - g) * local.scale;
                    if (moved - expected).norm() < PI / 2.0 {
                        x = nx;
                        g = next_g;
                        done = true;
                        break;
                    }
                }
            }
            next_g = g - 0.5 * (g - next_g);
        }
        if !done {
            return Err(Error::InversionFailed);
        }
    }
    Ok(x)
}

/// Cheap branch check used when a seed is supplied: the traced angle must
/// match the requested one.
fn verify_angle(plane: Plane, x: Complex64, theta: f64) -> bool {
    match phi_generic(plane, x, 4000) {
        Ok(phi) => wrap(phi.arg() - theta).abs() < 1e-6,
        Err(_) => false,
    }
}
