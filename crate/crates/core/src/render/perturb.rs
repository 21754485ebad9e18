//! Perturbation rendering around a high-precision reference orbit.
//!
//! Pixel orbits are written z_n = Z_m + δ and only δ is iterated in doubles:
//! δ <- 2 Z_m δ + δ² + δc. When the full value gets smaller than the delta
//! (|z| < |δ|, the cancellation that causes glitches), the pixel rebases
//! onto the start of the reference: δ <- z - Z_0, m <- 0. A pixel is
//! glitched only if it outlives its reference; those get a new reference
//! taken at the deepest glitched pixel.

use num_complex::Complex64;

use super::{hp_pixel, FrameSpec, Image, Mode, Pixel, RenderStats};
use crate::error::{Error, Result};
use crate::hp::{HpComplex, Scratch};

/// New references tried before falling back to direct iteration.
const MAX_REREFERENCES: usize = 3;

/// Largest glitched share that may be finished by direct iteration.
const MAX_GLITCH_FRACTION: f64 = 0.05;

struct Reference {
    /// offset of the reference point from the frame center
    offset: Complex64,
    orbit: Vec<Complex64>,
}

enum Outcome {
    Done(Pixel),
    /// ran past the end of the reference after this many iterations
    Glitch(u32),
}

fn reference_orbit(frame: &FrameSpec, offset: Complex64, prec: u32) -> Reference {
    let mut p = frame.center.with_prec(prec);
    p += &HpComplex::from_c64(offset, prec);
    let (mut z, c) = match &frame.mode {
        Mode::Mandelbrot => (HpComplex::zero(prec), p),
        Mode::Julia(c) => (p, c.with_prec(prec)),
    };
    let r2 = frame.escape_radius * frame.escape_radius;
    let mut s = Scratch::new(prec);
    let mut orbit = Vec::with_capacity(frame.max_iter as usize + 1);
    orbit.push(z.to_c64());
    for _ in 0..frame.max_iter {
        s.square_add(&mut z, &c);
        let zf = z.to_c64();
        orbit.push(zf);
        if !(zf.norm_sqr() <= r2) {
            break;
        }
    }
    Reference { offset, orbit }
}

fn perturb_pixel(frame: &FrameSpec, r: &Reference, offset: Complex64) -> Outcome {
    let r2 = frame.escape_radius * frame.escape_radius;
    let z_ref = &r.orbit;
    let rel = offset - r.offset;
    let zero = Complex64::new(0.0, 0.0);
    let (mut d, dc, mut dz, k) = match frame.mode {
        Mode::Mandelbrot => (zero, rel, zero, 1.0),
        Mode::Julia(_) => (rel, zero, Complex64::new(1.0, 0.0), 0.0),
    };
    let z = z_ref[0] + d;
    if z.norm_sqr() > r2 {
        return Outcome::Done(Pixel::escaped(0, z, dz));
    }
    let mut m = 0usize;
    for n in 1..=frame.max_iter {
        let zm = z_ref[m];
        dz = 2.0 * (zm + d) * dz + k;
        d = (2.0 * zm + d) * d + dc;
        m += 1;
        if m >= z_ref.len() {
            return Outcome::Glitch(n - 1);
        }
        let z = z_ref[m] + d;
        let zn = z.norm_sqr();
        if zn > r2 {
            return Outcome::Done(Pixel::escaped(n, z, dz));
        }
        if zn < d.norm_sqr() {
            d = z - z_ref[0];
            m = 0;
        }
    }
    Outcome::Done(Pixel::INSIDE)
}

/// Perturbation render. Agrees with `render_hp` up to ±1 iteration on
/// nearly all pixels; fails if more than 5% stay glitched after three new
/// references.
pub fn render_deep(frame: &FrameSpec) -> Result<Image> {
    frame.validate()?;
    let prec = frame.precision_bits();
    let (w, h) = frame.pixels;
    let offsets: Vec<Complex64> = (0..w * h).map(|k| frame.offset(k % w, k / w)).collect();

    let mut reference = reference_orbit(frame, Complex64::new(0.0, 0.0), prec);
    let mut pixels = vec![Pixel::INSIDE; w * h];
    let mut pending: Vec<usize> = (0..w * h).collect();
    let mut references = 1;
    loop {
        let results = frame
            .exec
            .map_slice(&pending, |&k| perturb_pixel(frame, &reference, offsets[k]));
        let mut glitched = Vec::new();
        let mut deepest = (0u32, usize::MAX);
        for (&k, res) in pending.iter().zip(results) {
            match res {
                Outcome::Done(px) => pixels[k] = px,
                Outcome::Glitch(n) => {
                    if deepest.1 == usize::MAX || n > deepest.0 {
                        deepest = (n, k);
                    }
                    glitched.push(k);
                }
            }
        }
        pending = glitched;
        if pending.is_empty() || references > MAX_REREFERENCES {
            break;
        }
        reference = reference_orbit(frame, offsets[deepest.1], prec);
        references += 1;
    }

    if pending.len() as f64 > MAX_GLITCH_FRACTION * (w * h) as f64 {
        return Err(Error::ReReferenceFailed(pending.len()));
    }
    let fixed = frame.exec.map_slice(&pending, |&k| hp_pixel(frame, offsets[k], prec));
    for (&k, px) in pending.iter().zip(fixed) {
        pixels[k] = px;
    }
    let stats = RenderStats {
        precision_bits: prec,
        perturbation: true,
        references,
        fallback_pixels: pending.len(),
    };
    Ok(Image::from_pixels(frame, pixels, stats))
}
