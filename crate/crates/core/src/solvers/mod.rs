//! Locating special parameters: superattracting centers, Misiurewicz points,
//! parabolic roots, tuned parameters and center cascades.

mod cascade;
mod center;
mod misiurewicz;
mod parabolic;
mod winding;

pub use cascade::{cascade, CascadeOptions, CascadeRecord, Law};
pub use center::{copy_scale, find_center_near, proper_divisors, solve_superattracting_center};
pub use misiurewicz::{
    multiplier_at_misiurewicz, solve_misiurewicz, tune_misiurewicz, tune_seed, TuneOptions,
};
pub use parabolic::{solve_parabolic_root, ParabolicRoot};
pub use winding::{winding_number, ParamMap, WindingOptions};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Preperiod l and period k of a critical orbit relation P^{l+k}(0) = P^l(0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisiurewiczSpec {
    pub preperiod: usize,
    pub period: usize,
}

impl MisiurewiczSpec {
    pub fn new(preperiod: usize, period: usize) -> Result<Self> {
        if preperiod == 0 || period == 0 {
            return Err(Error::InvalidInput(format!(
                "Misiurewicz spec needs l >= 1 and k >= 1, got ({preperiod}, {period})"
            )));
        }
        Ok(Self { preperiod, period })
    }

    /// The relation transported into a small copy of period p.
    pub fn tuned(self, p: usize) -> Self {
        Self {
            preperiod: self.preperiod * p,
            period: self.period * p,
        }
    }
}

/// Period m of the parabolic cycle and rotation number num/den of its multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicSpec {
    pub period: usize,
    pub num: u64,
    pub den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ParabolicSpec {
    pub fn new(period: usize, num: u64, den: u64) -> Result<Self> {
        if period == 0 || den == 0 || gcd(num, den) != 1 {
            return Err(Error::InvalidInput(format!(
                "parabolic spec needs m >= 1 and a reduced rotation number, got m={period}, {num}/{den}"
            )));
        }
        Ok(Self { period, num, den })
    }

    /// Number of petals at the parabolic point (denominator of the rotation).
    pub fn petals(&self) -> u64 {
        self.den
    }
}
