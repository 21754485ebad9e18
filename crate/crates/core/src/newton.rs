//! Damped complex Newton iteration with precision escalation.

use crate::hp::HpComplex;

#[derive(Clone, Debug)]
pub(crate) struct Newton {
    pub tol: f64,
    pub max_steps: usize,
    pub max_prec: u32,
}

impl Newton {
    pub(crate) fn new(tol: f64) -> Self {
        Self {
            tol,
            max_steps: 200,
            max_prec: 4096,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Converged {
    pub x: HpComplex,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub(crate) enum Failure {
    NoConvergence,
    Degenerate,
}

fn mag(z: &HpComplex) -> f64 {
    let r = z.abs_f64();
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

impl Newton {
    /// Solves f(x) = 0 where `eval` returns (f(x), f'(x)) at the precision of x.
    ///
    /// A trial step is halved while it increases |f|; each evaluation counts
    /// against `max_steps`. Precision doubles after three stalled steps.
    pub(crate) fn solve<F>(&self, seed: &HpComplex, mut eval: F) -> Result<Converged, Failure>
    where
        F: FnMut(&HpComplex) -> (HpComplex, HpComplex),
    {
        let mut x = seed.clone();
        let (mut f, mut df) = eval(&x);
        let mut r = mag(&f);
        let mut steps = 1;
        let mut stalled = 0;
        while steps < self.max_steps {
            if r == 0.0 {
                return Ok(Converged { x, residual: 0.0 });
            }
            if df.is_zero() || !df.is_finite() {
                return Err(Failure::Degenerate);
            }
            let step = &f / &df;
            let step_len = mag(&step);
            if !step_len.is_finite() {
                return Err(Failure::Degenerate);
            }
            let scale = mag(&x).max(1.0);
            if r < self.tol && (step_len <= self.tol * 1e-6 * scale || stalled >= 2) {
                return Ok(Converged { x, residual: r });
            }
            let mut lambda = 1.0;
            let (mut xn, mut fnew, mut dfn, mut rn);
            loop {
                xn = &x - &step.scale(lambda);
                (fnew, dfn) = eval(&xn);
                rn = mag(&fnew);
                steps += 1;
                if rn <= r || lambda < 1e-6 || steps >= self.max_steps {
                    break;
                }
                lambda *= 0.5;
            }
            if rn >= 0.5 * r {
                stalled += 1;
            } else {
                stalled = 0;
            }
            if stalled >= 3 && x.prec() < self.max_prec && r >= self.tol {
                let prec = (x.prec() * 2).min(self.max_prec);
                xn.set_prec(prec);
                (fnew, dfn) = eval(&xn);
                rn = mag(&fnew);
                stalled = 0;
            }
            x = xn;
            f = fnew;
            df = dfn;
            r = rn;
        }
        if r < self.tol {
            return Ok(Converged { x, residual: r });
        }
        Err(Failure::NoConvergence)
    }
}
