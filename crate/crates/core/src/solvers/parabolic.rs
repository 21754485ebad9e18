use rug::float::Constant;
use rug::Float;

use super::ParabolicSpec;
use crate::error::{Error, Result};
use crate::hp::{HpComplex, Scratch};

#[derive(Clone, Debug)]
pub struct ParabolicRoot {
    pub c: HpComplex,
    pub z: HpComplex,
    pub multiplier: HpComplex,
}

/// exp(2 pi i num/den) at `prec` bits.
pub(crate) fn root_of_unity(num: u64, den: u64, prec: u32) -> HpComplex {
    let mut angle = Float::with_val(prec, Constant::Pi);
    angle *= 2 * num;
    angle /= den;
    HpComplex::exp_i(&angle)
}

struct Residual {
    cycle: HpComplex,
    mult: HpComplex,
    /// Jacobian rows: d(cycle)/dc, d(cycle)/dz ; d(mult)/dc, d(mult)/dz
    j: [HpComplex; 4],
}

impl Residual {
    fn size(&self) -> f64 {
        self.cycle.abs_f64().max(self.mult.abs_f64())
    }
}

/// Residuals (P_c^m(z) - z, (P_c^m)'(z) - lambda) with the exact Jacobian.
fn evaluate(c: &HpComplex, z0: &HpComplex, m: usize, lambda: &HpComplex) -> Residual {
    let prec = c.prec().max(z0.prec());
    let mut s = Scratch::new(prec);
    let mut z = z0.with_prec(prec);
    // a = dz/dc, d = dz/dz0, e = d2z/dz0^2, f = d(dz/dz0)/dc
    let mut a = HpComplex::zero(prec);
    let mut d = HpComplex::real(1.0, prec);
    let mut e = HpComplex::zero(prec);
    let mut f = HpComplex::zero(prec);
    for _ in 0..m {
        let e_next = (&d.square() + &(&z * &e)).scale(2.0);
        let f_next = (&(&a * &d) + &(&z * &f)).scale(2.0);
        e = e_next;
        f = f_next;
        s.double_mul_add(&mut a, &z, 1);
        s.double_mul_add(&mut d, &z, 0);
        s.square_add(&mut z, c);
    }
    let one = HpComplex::real(1.0, prec);
    Residual {
        cycle: &z - z0,
        mult: &d - lambda,
        j: [a, &d - &one, f, e],
    }
}

/// 2x2 complex Newton on (c, z) for a cycle of period m whose multiplier
/// is exp(2 pi i num/den).
pub fn solve_parabolic_root(
    spec: ParabolicSpec,
    seed_c: &HpComplex,
    seed_z: &HpComplex,
    tol: f64,
) -> Result<ParabolicRoot> {
    let spec = ParabolicSpec::new(spec.period, spec.num, spec.den)?;
    let prec = seed_c.prec().max(seed_z.prec());
    let lambda = root_of_unity(spec.num, spec.den, prec);
    let mut c = seed_c.with_prec(prec);
    let mut z = seed_z.with_prec(prec);
    let mut r = evaluate(&c, &z, spec.period, &lambda);
    let mut steps = 1;
    while steps < 200 {
        let [jcc, jcz, jmc, jmz] = &r.j;
        let det = &(jcc * jmz) - &(jcz * jmc);
        if det.is_zero() || !det.is_finite() {
            return Err(Error::DegenerateConfiguration);
        }
        // Cramer's rule for J (dc, dz) = (cycle, mult)
        let dc = &(&(&r.cycle * jmz) - &(jcz * &r.mult)) / &det;
        let dz = &(&(jcc * &r.mult) - &(jmc * &r.cycle)) / &det;
        let step = dc.abs_f64().max(dz.abs_f64());
        if !step.is_finite() {
            return Err(Error::DegenerateConfiguration);
        }
        if r.size() < tol && step < tol * 1e-6 {
            break;
        }
        let mut lambda_step = 1.0;
        loop {
            let cn = &c - &dc.scale(lambda_step);
            let zn = &z - &dz.scale(lambda_step);
            let rn = evaluate(&cn, &zn, spec.period, &lambda);
            steps += 1;
            if rn.size() <= r.size() || lambda_step < 1e-6 || steps >= 200 {
                c = cn;
                z = zn;
                r = rn;
                break;
            }
            lambda_step *= 0.5;
        }
        if r.size() == 0.0 {
            break;
        }
    }
    if r.size() >= tol {
        return Err(Error::ParabolicNoConvergence {
            cycle: r.cycle.abs_f64(),
            multiplier: r.mult.abs_f64(),
        });
    }
    let multiplier = &r.mult + &lambda;
    Ok(ParabolicRoot { c, z, multiplier })
}
