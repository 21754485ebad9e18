use crate::dynamics::{critical_moduli, orbit_with_dc};
use crate::error::{Error, Result};
use crate::hp::{HpComplex, Scratch};
use crate::newton::{Failure, Newton};

pub fn proper_divisors(q: usize) -> Vec<usize> {
    (1..q).filter(|d| q % d == 0).collect()
}

fn zero(prec: u32) -> HpComplex {
    HpComplex::zero(prec)
}

/// Newton on c -> P_c^period(0) from `seed`, then an exact-period check.
pub fn solve_superattracting_center(period: usize, seed: &HpComplex, tol: f64) -> Result<HpComplex> {
    if period == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    let newton = Newton::new(tol);
    let out = newton
        .solve(seed, |c| orbit_with_dc(c, &zero(c.prec()), period))
        .map_err(|e| match e {
            Failure::Degenerate | Failure::NoConvergence => Error::NoCenterNearSeed,
        })?;
    let moduli = critical_moduli(&out.x, period);
    if let Some(d) = proper_divisors(period).into_iter().find(|&d| moduli[d] <= tol) {
        return Err(Error::PeriodCollapse {
            requested: period,
            found: d,
        });
    }
    Ok(out.x)
}

/// Complex scale of the small copy of M centered at `center`: the copy looks
/// like center + scale * M near its center.
pub fn copy_scale(center: &HpComplex, period: usize) -> HpComplex {
    let prec = center.prec();
    let mut s = Scratch::new(prec);
    let mut z = HpComplex::zero(prec);
    let mut l = HpComplex::real(1.0, prec);
    let mut b = HpComplex::real(1.0, prec);
    for _ in 1..period {
        s.square_add(&mut z, center);
        let twice_z = z.scale(2.0);
        s.mul_assign(&mut l, &twice_z);
        b += &l.recip();
    }
    (&b * &l.square()).recip()
}

/// Smallest q <= q_max whose Newton solve from `seed` lands on a center of
/// exact period q lying within half the copy scale of the seed.
pub fn find_center_near(seed: &HpComplex, q_max: usize, tol: f64) -> Result<(HpComplex, usize)> {
    if q_max == 0 {
        return Err(Error::InvalidInput("q_max must be at least 1".into()));
    }
    for q in 1..=q_max {
        let Ok(center) = solve_superattracting_center(q, seed, tol) else {
            continue;
        };
        let dist = (&center - seed).abs_f64();
        let size = copy_scale(&center, q).abs_f64();
        if dist <= 0.5 * size {
            return Ok((center, q));
        }
    }
    Err(Error::NoCenterWithin(q_max))
}
