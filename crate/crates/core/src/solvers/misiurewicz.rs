use super::center::{copy_scale, solve_superattracting_center};
use super::MisiurewiczSpec;
use crate::dynamics::{critical_moduli, critical_orbit_with_dc};
use crate::error::{Error, Result};
use crate::hp::{HpComplex, Scratch};
use crate::newton::{Failure, Newton};

/// z_{l+k} - z_l and its c-derivative.
fn relation(c: &HpComplex, spec: MisiurewiczSpec) -> (HpComplex, HpComplex) {
    let orbit = critical_orbit_with_dc(c, spec.preperiod + spec.period);
    let (zl, dl) = &orbit[spec.preperiod];
    let (zk, dk) = &orbit[spec.preperiod + spec.period];
    (zk - zl, dk - dl)
}

/// First pair (l', k') with l' + k' < l + k (l' >= 0) whose relation holds
/// within `tol`. l' = 0 means the critical point is periodic.
fn smaller_relation(c: &HpComplex, spec: MisiurewiczSpec, tol: f64) -> Option<(usize, usize)> {
    let total = spec.preperiod + spec.period;
    let mut s = Scratch::new(c.prec());
    let mut z = HpComplex::zero(c.prec());
    let mut orbit = vec![z.clone()];
    for _ in 1..total {
        s.square_add(&mut z, c);
        orbit.push(z.clone());
    }
    for sum in 1..total {
        for k in 1..=sum {
            let l = sum - k;
            if (&orbit[l + k] - &orbit[l]).abs_f64() <= tol {
                return Some((l, k));
            }
        }
    }
    None
}

/// Newton on c -> P_c^{l+k}(0) - P_c^l(0), then strict preperiodicity and
/// minimality checks.
pub fn solve_misiurewicz(spec: MisiurewiczSpec, seed: &HpComplex, tol: f64) -> Result<HpComplex> {
    let spec = MisiurewiczSpec::new(spec.preperiod, spec.period)?;
    let newton = Newton::new(tol);
    let out = newton
        .solve(seed, |c| relation(c, spec))
        .map_err(|e| match e {
            Failure::Degenerate | Failure::NoConvergence => Error::NoMisiurewiczNearSeed,
        })?;
    if let Some((l, k)) = smaller_relation(&out.x, spec, tol) {
        return Err(Error::DegenerateMisiurewicz(l, k));
    }
    Ok(out.x)
}

/// Multiplier of the cycle {P_c^l(0), ..., P_c^{l+k-1}(0)}.
pub fn multiplier_at_misiurewicz(c: &HpComplex, spec: MisiurewiczSpec) -> Result<HpComplex> {
    let spec = MisiurewiczSpec::new(spec.preperiod, spec.period)?;
    let (r, _) = relation(c, spec);
    let mut s = Scratch::new(c.prec());
    let mut z = HpComplex::zero(c.prec());
    for _ in 0..spec.preperiod {
        s.square_add(&mut z, c);
    }
    let scale = z.abs_f64().max(1.0);
    if r.abs_f64() > 1e-8 * scale {
        return Err(Error::NotRepelling);
    }
    let mut mu = HpComplex::real(1.0, c.prec());
    for _ in 0..spec.period {
        s.mul_assign(&mut mu, &z.scale(2.0));
        s.square_add(&mut z, c);
    }
    if mu.abs_f64() <= 1.0 {
        return Err(Error::NotRepelling);
    }
    Ok(mu)
}

#[derive(Clone, Debug)]
pub struct TuneOptions {
    pub tol: f64,
    /// Acceptance ball radius in units of |s0 - (nearest period-2p center)|.
    pub copy_radius_factor: f64,
}

impl TuneOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            copy_radius_factor: 10.0,
        }
    }
}

/// Newton seed for s0 ⊥ c0: the copy's linear approximation s0 + scale * c0.
pub fn tune_seed(s0: &HpComplex, p: usize, c0: &HpComplex) -> HpComplex {
    s0 + &(&copy_scale(s0, p) * c0)
}

/// s0 ⊥ c0: the (p*l, p*k) Misiurewicz point of the small copy centered at
/// s0 that corresponds to the (l, k) point c0 of M.
///
/// `c0` only needs to be close enough for Newton to find the intended
/// (l, k) point; it is refined before tuning.
pub fn tune_misiurewicz(
    s0: &HpComplex,
    p: usize,
    c0: &HpComplex,
    spec: MisiurewiczSpec,
    opts: &TuneOptions,
) -> Result<HpComplex> {
    if p == 0 {
        return Err(Error::InvalidInput("tuning period must be at least 1".into()));
    }
    let moduli = critical_moduli(s0, p);
    if moduli[p] > opts.tol {
        return Err(Error::InvalidInput(format!("s0 is not a center of period {p}")));
    }
    if let Some(d) = super::proper_divisors(p).into_iter().find(|&d| moduli[d] <= opts.tol) {
        return Err(Error::InvalidInput(format!("s0 has period {d}, not {p}")));
    }
    let prec = s0.prec().max(c0.prec());
    let s0 = s0.with_prec(prec);
    let c0 = solve_misiurewicz(spec, &c0.with_prec(prec), opts.tol)?;
    if p == 1 {
        return Ok(c0);
    }
    // The copy's image of -1 is the period-2p center nearest s0.
    let minus_one = HpComplex::real(-1.0, prec);
    let doubled = solve_superattracting_center(2 * p, &tune_seed(&s0, p, &minus_one), opts.tol)?;
    let radius = opts.copy_radius_factor * (&doubled - &s0).abs_f64();

    // Near 0, P_{s0}^p(z) ≈ a z² with a = Π 2 z_j, so the small Julia set is
    // K_{c0} / a to first order. The cycle reached by the tuned point must sit
    // where that picture puts it; this separates s0 ⊥ c0 from other roots of
    // the same relation (for p = 2, c = -2 solves z_6 = z_4 as well).
    let a = dynamic_scale(&s0, p);
    let orbit0 = critical_orbit_with_dc(&c0, spec.preperiod);
    let expected = &orbit0[spec.preperiod].0 / &a;
    let tuned = spec.tuned(p);
    let scale = copy_scale(&s0, p);
    // The linear copy estimate overshoots for low periods; seeds shrunk
    // toward s0 are tried too and the most consistent root wins.
    let mut best: Option<(f64, HpComplex)> = None;
    for t in [1.0, 0.8, 0.65, 0.5, 0.4, 0.3] {
        let seed = &s0 + &(&scale * &c0.scale(t));
        let Ok(out) = Newton::new(opts.tol).solve(&seed, |c| relation(c, tuned)) else {
            continue;
        };
        let c1 = out.x;
        if (&c1 - &s0).abs_f64() >= radius || is_periodic(&c1, tuned, opts.tol) {
            continue;
        }
        let orbit = critical_orbit_with_dc(&c1, tuned.preperiod);
        let mismatch = (&orbit[tuned.preperiod].0 - &expected).abs_f64() / expected.abs_f64();
        if mismatch <= 0.3 && best.as_ref().is_none_or(|(m, _)| mismatch < *m) {
            best = Some((mismatch, c1));
        }
    }
    best.map(|(_, c1)| c1).ok_or(Error::TuningEscaped)
}

/// a = Π_{j=1}^{p-1} 2 z_j(s0): P_{s0}^p(z) = a z² + O(z³).
fn dynamic_scale(s0: &HpComplex, p: usize) -> HpComplex {
    let prec = s0.prec();
    let mut s = Scratch::new(prec);
    let mut z = HpComplex::zero(prec);
    let mut a = HpComplex::real(1.0, prec);
    for _ in 1..p {
        s.square_add(&mut z, s0);
        s.mul_assign(&mut a, &z.scale(2.0));
    }
    a
}

/// Whether 0 is periodic for c, i.e. z_j = 0 for some 1 <= j <= l + k.
fn is_periodic(c: &HpComplex, spec: MisiurewiczSpec, tol: f64) -> bool {
    critical_moduli(c, spec.preperiod + spec.period)[1..].iter().any(|&m| m <= tol)
}
