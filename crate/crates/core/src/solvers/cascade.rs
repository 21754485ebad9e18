use num_complex::Complex64;
use serde::Serialize;

use super::center::solve_superattracting_center;
use crate::dynamics::critical_moduli;
use crate::error::{Error, Result};
use crate::hp::HpComplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    /// |s_n - c1| ~ |mu|^-n
    Geometric,
    /// |s_n - c1| ~ n^-2 (one petal)
    InverseSquare,
    /// |s_n - c1| ~ n^-1 (two or more petals)
    InverseLinear,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct CascadeOptions {
    pub tol: f64,
    /// Petal count used to predict the first parabolic step (ignored when
    /// a multiplier is given).
    pub petals: u64,
    /// Largest RMS misfit, in natural-log units, for a law to be accepted.
    pub max_fit_residual: f64,
    /// Acceptance band on the fitted log-log slope around -2 or -1.
    pub slope_band: f64,
}

impl Default for CascadeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-30,
            petals: 2,
            max_fit_residual: 0.1,
            slope_band: 0.25,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CascadeRecord {
    pub c1: HpComplex,
    /// (s_n, period q_n), starting with the base center.
    pub centers: Vec<(HpComplex, usize)>,
    pub mu: Option<HpComplex>,
    pub fitted_law: Law,
    /// K0 with s_n - c1 ≈ 1/(mu^n K0) (geometric), or C with
    /// s_n - c1 ≈ C / q_n^2 or C / q_n (power laws).
    pub fitted_constant: Option<Complex64>,
    /// Fitted slope: log|ratio| per step (geometric) or d log|s_n - c1| / d log q_n.
    pub fitted_slope: f64,
    pub fit_residual: f64,
    /// r_n = (s_{n+1} - c1) / (s_n - c1)
    pub ratios: Vec<Complex64>,
    /// First n from which every ratio stays within 5% of 1/mu.
    pub settled_from: Option<usize>,
    /// Why the sequence stopped early, if it did.
    pub aborted: Option<String>,
}

impl CascadeRecord {
    pub fn offsets(&self) -> Vec<HpComplex> {
        self.centers.iter().map(|(s, _)| s - &self.c1).collect()
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - icept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, icept, rms)
}

/// Centers s_n of period q_base + n dq accumulating on c1.
///
/// Each step is seeded at c1 + (s_{n-1} - c1) g, with g = 1/mu when a
/// multiplier is given (Misiurewicz accumulation) and otherwise the ratio
/// of the two previous offsets (parabolic accumulation). The first
/// parabolic step predicts g from the petal count. A failed step ends the
/// sequence; the partial record is returned with `aborted` set.
pub fn cascade(
    c1: &HpComplex,
    s_base: &HpComplex,
    q_base: usize,
    dq: usize,
    count: usize,
    mu: Option<&HpComplex>,
    opts: &CascadeOptions,
) -> Result<CascadeRecord> {
    if dq == 0 || count < 2 {
        return Err(Error::InvalidInput("cascade needs dq >= 1 and count >= 2".into()));
    }
    let prec = c1.prec().max(s_base.prec());
    let c1 = c1.with_prec(prec);
    let base = s_base.with_prec(prec);
    if critical_moduli(&base, q_base)[q_base] > opts.tol.max(1e-12) {
        return Err(Error::InvalidInput(format!("s_base is not a center of period {q_base}")));
    }
    let base = solve_superattracting_center(q_base, &base, opts.tol)?;
    let inv_mu = mu.map(|m| m.recip());
    let mut centers = vec![(base, q_base)];
    let mut aborted = None;

    for n in 1..count {
        let q = q_base + n * dq;
        let prev = &centers[n - 1].0 - &c1;
        let g = match (&inv_mu, n) {
            (Some(g), _) => g.clone(),
            (None, 1) => {
                let e = if opts.petals <= 1 { 2.0 } else { 1.0 };
                HpComplex::real((q_base as f64 / q as f64).powf(e), prec)
            }
            (None, _) => &prev / &(&centers[n - 2].0 - &c1),
        };
        let seed = &c1 + &(&prev * &g);
        match solve_superattracting_center(q, &seed, opts.tol) {
            Ok(s) => {
                let off = (&s - &c1).abs_f64();
                if off >= prev.abs_f64() {
                    aborted = Some(format!("step {n}: center of period {q} does not approach c1"));
                    break;
                }
                centers.push((s, q));
            }
            Err(e) => {
                aborted = Some(format!("step {n}: {e}"));
                break;
            }
        }
    }

    let offsets: Vec<Complex64> = centers.iter().map(|(s, _)| (s - &c1).to_c64()).collect();
    let ratios: Vec<Complex64> = offsets.windows(2).map(|w| w[1] / w[0]).collect();
    let logs: Vec<f64> = offsets.iter().map(|o| o.norm().ln()).collect();

    let mut record = CascadeRecord {
        c1: c1.clone(),
        centers,
        mu: mu.cloned(),
        fitted_law: Law::Inconclusive,
        fitted_constant: None,
        fitted_slope: f64::NAN,
        fit_residual: f64::NAN,
        ratios,
        settled_from: None,
        aborted,
    };
    if record.centers.len() < 3 {
        return Ok(record);
    }

    if let Some(inv) = &inv_mu {
        let target = inv.to_c64();
        record.settled_from = (0..record.ratios.len())
            .find(|&i| record.ratios[i..].iter().all(|r| (r - target).norm() < 0.05 * target.norm()));
        let xs: Vec<f64> = (0..logs.len()).map(|n| n as f64).collect();
        let (slope, _, rms) = least_squares(&xs, &logs);
        record.fitted_slope = slope;
        record.fit_residual = rms;
        let m = mu.unwrap().to_c64();
        let last = offsets.len() - 1;
        record.fitted_constant = Some(1.0 / (m.powu(last as u32) * offsets[last]));
        if rms <= opts.max_fit_residual {
            record.fitted_law = Law::Geometric;
        }
    } else {
        let xs: Vec<f64> = record.centers.iter().map(|(_, q)| (*q as f64).ln()).collect();
        let (slope, _, rms) = least_squares(&xs, &logs);
        record.fitted_slope = slope;
        record.fit_residual = rms;
        let law = if rms > opts.max_fit_residual {
            Law::Inconclusive
        } else if (slope + 2.0).abs() <= opts.slope_band {
            Law::InverseSquare
        } else if (slope + 1.0).abs() <= opts.slope_band {
            Law::InverseLinear
        } else {
            Law::Inconclusive
        };
        record.fitted_law = law;
        let power = match law {
            Law::InverseSquare => Some(2),
            Law::InverseLinear => Some(1),
            _ => None,
        };
        if let Some(p) = power {
            let (s, q) = (offsets.last().unwrap(), record.centers.last().unwrap().1);
            record.fitted_constant = Some(s * (q as f64).powi(p));
        }
    }
    Ok(record)
}
