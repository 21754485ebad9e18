//! Finite-orbit proxy for non-recurrence of the critical point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::VerificationReport;
use crate::hp::{HpComplex, Scratch};
use crate::model::PointCloud;

const HEURISTIC_NOTE: &str =
    "finite-orbit heuristic: inspects n_iter iterates of 0 only; it is evidence of non-recurrence, not a proof of semihyperbolicity";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemihypOptions {
    pub n_iter: usize,
    /// trap radius; default 1e-3 of the orbit diameter
    pub delta: Option<f64>,
    pub transient: usize,
}

impl Default for SemihypOptions {
    fn default() -> Self {
        Self {
            n_iter: 10_000,
            delta: None,
            transient: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SemiClass {
    SuperattractingLike,
    HeuristicallySemihyperbolic,
    RecurrentSuspect,
}

impl SemiClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SemiClass::SuperattractingLike => "superattracting-like",
            SemiClass::HeuristicallySemihyperbolic => "heuristically semihyperbolic",
            SemiClass::RecurrentSuspect => "recurrent-suspect",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemihypOutcome {
    pub class: SemiClass,
    /// min |P_c^n(0)| over transient < n <= n_iter (before escape)
    pub min_distance: f64,
    pub bounded: bool,
    pub escape_iter: Option<usize>,
    /// first n >= 1 with |P_c^n(0)| < delta
    pub period: Option<usize>,
    pub delta: f64,
}

/// Iterates 0 under z^2 + c at the precision of `c` and classifies the orbit.
pub fn semihyperbolic_classify(c: &HpComplex, opts: &SemihypOptions) -> SemihypOutcome {
    assert!(opts.n_iter > opts.transient, "n_iter must exceed the transient");
    let prec = c.prec();
    let mut z = HpComplex::zero(prec);
    let mut s = Scratch::new(prec);
    // orbit[n - 1] = P_c^n(0)
    let mut orbit: Vec<Complex64> = Vec::with_capacity(opts.n_iter);
    let mut escape_iter = None;
    for n in 1..=opts.n_iter {
        s.square_add(&mut z, c);
        let zf = z.to_c64();
        orbit.push(zf);
        if !(zf.norm_sqr() <= 4.0) {
            escape_iter = Some(n);
            break;
        }
    }
    let delta = opts.delta.unwrap_or_else(|| {
        let mut pts = PointCloud::from_points("orbit", orbit.iter().copied(), None);
        pts.points.push(crate::model::CloudPoint {
            z: Complex64::new(0.0, 0.0),
            level: None,
        });
        (1e-3 * pts.diameter()).max(f64::MIN_POSITIVE)
    });

    let tail = orbit.iter().enumerate().skip(opts.transient);
    let min_distance = tail.map(|(_, z)| z.norm()).fold(f64::INFINITY, f64::min);
    let hits: Vec<usize> = orbit
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() < delta)
        .map(|(i, _)| i + 1)
        .collect();
    let period = hits.first().copied();

    let bounded = escape_iter.is_none();
    let last = escape_iter.unwrap_or(opts.n_iter);
    let class = if !bounded {
        SemiClass::HeuristicallySemihyperbolic
    } else if let Some(p) = period.filter(|_| min_distance < delta) {
        let late: Vec<usize> = hits.iter().copied().filter(|&n| n > opts.transient).collect();
        let expected: Vec<usize> = (opts.transient + 1..=last).filter(|n| n % p == 0).collect();
        if late == expected {
            SemiClass::SuperattractingLike
        } else {
            SemiClass::RecurrentSuspect
        }
    } else if min_distance > delta {
        SemiClass::HeuristicallySemihyperbolic
    } else {
        SemiClass::RecurrentSuspect
    };
    SemihypOutcome {
        class,
        min_distance,
        bounded,
        escape_iter,
        period,
        delta,
    }
}

/// Report form of `semihyperbolic_classify`; passes for the
/// "heuristically semihyperbolic" class.
pub fn semihyperbolic_test(c: &HpComplex, opts: &SemihypOptions) -> VerificationReport {
    let out = semihyperbolic_classify(c, opts);
    let mut r = VerificationReport::new("semihyperbolic");
    r.metric("n_iter", opts.n_iter as f64)
        .metric("transient", opts.transient as f64)
        .metric("bounded", if out.bounded { 1.0 } else { 0.0 })
        .label("c", c.to_string_digits(20))
        .label("classification", out.class.as_str())
        .note(HEURISTIC_NOTE);
    if let Some(n) = out.escape_iter {
        r.metric("escape_iter", n as f64);
    }
    if let Some(p) = out.period {
        r.metric("period", p as f64);
    }
    if out.bounded {
        r.check_at_least("min_distance", out.min_distance, out.delta);
    } else {
        r.metric("min_distance", out.min_distance).metric("delta", out.delta);
    }
    r.passed = out.class == SemiClass::HeuristicallySemihyperbolic;
    r
}
