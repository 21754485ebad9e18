use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;

use super::MisiurewiczSpec;
use crate::error::{Error, Result};
use crate::hp::{HpComplex, Scratch};

/// Parameter maps whose zeros the argument principle counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamMap {
    /// c -> P_c^q(0); zeros are centers of period dividing q.
    Center { period: usize },
    /// c -> P_c^{l+k}(0) - P_c^l(0)
    Misiurewicz(MisiurewiczSpec),
}

#[derive(Clone, Debug)]
pub struct WindingOptions {
    /// Initial uniform samples on the circle.
    pub samples: usize,
    /// Smallest |f| tolerated on the contour.
    pub zero_threshold: f64,
    /// Total evaluations allowed during refinement.
    pub max_samples: usize,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self {
            samples: 64,
            zero_threshold: 1e-300,
            max_samples: 1 << 20,
        }
    }
}

/// Value of a map at one contour point: argument, ln |f| and f'/f.
struct Sample {
    arg: f64,
    ln_abs: f64,
    dlog: Complex64,
}

/// 2^r arg(z) reduced to (-pi, pi].
fn doubled_arg(z: &HpComplex, r: usize) -> f64 {
    let prec = z.prec() + r as u32 + 64;
    let mut a = Float::with_val(prec, z.im().atan2_ref(z.re()));
    a <<= r as u32;
    let tau = Float::with_val(prec, Constant::Pi) * 2u32;
    let mut q = Float::with_val(prec, &a / &tau);
    q.round_mut();
    a -= q * tau;
    a.to_f64()
}

impl ParamMap {
    fn steps(&self) -> usize {
        match *self {
            ParamMap::Center { period } => period,
            ParamMap::Misiurewicz(s) => s.preperiod + s.period,
        }
    }

    /// Evaluates f(c) with its logarithmic derivative. Once |z| is so large
    /// that c no longer matters at this precision, the remaining steps only
    /// square, so the iteration stops there instead of overflowing.
    fn eval(&self, c: &HpComplex) -> Sample {
        let prec = c.prec();
        let total = self.steps();
        let keep = match *self {
            ParamMap::Center { .. } => None,
            ParamMap::Misiurewicz(s) => Some(s.preperiod),
        };
        let huge = (prec as f64 + 64.0) * std::f64::consts::LN_2;
        let mut s = Scratch::new(prec);
        let mut z = HpComplex::zero(prec);
        let mut dz = HpComplex::zero(prec);
        let mut kept: Option<(HpComplex, HpComplex)> = None;
        for i in 0..total {
            if keep == Some(i) {
                kept = Some((z.clone(), dz.clone()));
            }
            let ln = z.ln_abs();
            if ln > huge {
                // z_total = z_i^(2^(total - i)) to working precision; it
                // dominates any earlier kept value.
                let r = total - i;
                let boost = (r as f64).exp2();
                return Sample {
                    arg: doubled_arg(&z, r),
                    ln_abs: ln * boost,
                    dlog: (&dz / &z).to_c64() * boost,
                };
            }
            s.double_mul_add(&mut dz, &z, 1);
            s.square_add(&mut z, c);
        }
        let (f, df) = match kept {
            Some((k, dk)) => (&z - &k, &dz - &dk),
            None => (z, dz),
        };
        let dlog = if f.is_zero() { Complex64::new(f64::INFINITY, 0.0) } else { (&df / &f).to_c64() };
        Sample {
            arg: f.arg_f64(),
            ln_abs: f.ln_abs(),
            dlog,
        }
    }
}

fn wrap(d: f64) -> f64 {
    let mut d = d % TAU;
    if d > PI {
        d -= TAU;
    } else if d <= -PI {
        d += TAU;
    }
    d
}

/// Winding number of `map` around 0 along the circle |c - center| = radius.
///
/// An arc is accepted once its wrapped argument increment is below pi/2 and
/// the local rate d(arg f)/dt at both ends, times the arc length in t, is
/// below pi/2 too; the rate guards against increments aliased by 2pi.
pub fn winding_number(map: ParamMap, center: &HpComplex, radius: f64, opts: &WindingOptions) -> Result<i64> {
    if !(radius > 0.0) || opts.samples < 4 {
        return Err(Error::InvalidInput("winding needs radius > 0 and at least 4 samples".into()));
    }
    let prec = center.prec();
    let ln_threshold = opts.zero_threshold.ln();
    let mut evals = 0usize;
    // (argument, d arg / dt)
    let mut eval = |t: f64| -> Result<(f64, f64)> {
        evals += 1;
        if evals > opts.max_samples {
            return Err(Error::SamplingBudget(opts.max_samples));
        }
        let off = Complex64::from_polar(radius, t);
        let c = center + &HpComplex::from_c64(off, prec);
        let s = map.eval(&c);
        if !(s.ln_abs > ln_threshold) {
            return Err(Error::ZeroOnContour);
        }
        Ok((s.arg, (s.dlog * off).re))
    };

    let n = opts.samples;
    let ts: Vec<f64> = (0..=n).map(|j| TAU * j as f64 / n as f64).collect();
    let mut vals = Vec::with_capacity(n + 1);
    for &t in &ts[..n] {
        vals.push(eval(t)?);
    }
    vals.push(vals[0]);

    let mut total = 0.0;
    for j in 0..n {
        // depth-first refinement of one arc
        let mut stack = vec![(ts[j], vals[j], ts[j + 1], vals[j + 1])];
        while let Some((ta, va, tb, vb)) = stack.pop() {
            let d = wrap(vb.0 - va.0);
            let rate = va.1.abs().max(vb.1.abs());
            if d.abs() < FRAC_PI_2 && (tb - ta) * rate < FRAC_PI_2 {
                total += d;
                continue;
            }
            if tb - ta < 1e-15 {
                return Err(Error::ZeroOnContour);
            }
            let tm = 0.5 * (ta + tb);
            let vm = eval(tm)?;
            stack.push((tm, vm, tb, vb));
            stack.push((ta, va, tm, vm));
        }
    }
    Ok((total / TAU).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(re: f64, im: f64) -> HpComplex {
        HpComplex::from_f64(re, im, 256)
    }

    #[test]
    fn identity_map_winds_once() {
        let w = winding_number(ParamMap::Center { period: 1 }, &hp(0.0, 0.0), 0.1, &WindingOptions::default());
        assert_eq!(w.unwrap(), 1);
    }

    #[test]
    fn simple_zero_at_minus_one() {
        let w = winding_number(ParamMap::Center { period: 2 }, &hp(-1.0, 0.0), 0.1, &WindingOptions::default());
        assert_eq!(w.unwrap(), 1);
    }

    #[test]
    fn enclosing_both_zeros() {
        let w = winding_number(ParamMap::Center { period: 2 }, &hp(-0.5, 0.0), 1.0, &WindingOptions::default());
        assert_eq!(w.unwrap(), 2);
    }

    #[test]
    fn no_zero_inside() {
        let w = winding_number(ParamMap::Center { period: 2 }, &hp(1.0, 1.0), 0.1, &WindingOptions::default());
        assert_eq!(w.unwrap(), 0);
    }

    #[test]
    fn zero_on_contour_detected() {
        let opts = WindingOptions {
            samples: 4,
            zero_threshold: 1e-12,
            ..Default::default()
        };
        // The circle |c| = 1 passes through the zero at -1 at t = pi.
        let w = winding_number(ParamMap::Center { period: 2 }, &hp(0.0, 0.0), 1.0, &opts);
        assert!(matches!(w, Err(Error::ZeroOnContour)));
    }

    #[test]
    fn misiurewicz_map_counts_i() {
        // c = i is a simple zero of z_4 - z_2; small circle around it.
        let spec = MisiurewiczSpec::new(2, 2).unwrap();
        let w = winding_number(ParamMap::Misiurewicz(spec), &hp(0.0, 1.0), 0.01, &WindingOptions::default());
        assert_eq!(w.unwrap(), 1);
    }

    #[test]
    fn invariant_under_sample_doubling() {
        let map = ParamMap::Center { period: 6 };
        let base = WindingOptions::default();
        let a = winding_number(map, &hp(-0.3, 0.2), 1.4, &base).unwrap();
        let b = winding_number(map, &hp(-0.3, 0.2), 1.4, &WindingOptions { samples: 128, ..base }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn escaping_contour_counts_all_centers() {
        // |c| = 3 lies outside M; z_q has 2^(q-1) zeros inside, all centers.
        let w = winding_number(ParamMap::Center { period: 7 }, &hp(0.0, 0.0), 3.0, &WindingOptions::default());
        assert_eq!(w.unwrap(), 64);
    }
}
