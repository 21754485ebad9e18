//! Arbitrary-precision complex numbers over MPFR floats.
//!
//! Results of binary operations carry the larger of the two operand
//! precisions, so a single high-precision input lifts a whole computation.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_complex::Complex64;
use rug::float::Round;
use rug::ops::NegAssign;
use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Default working precision in mantissa bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Smallest precision accepted; below this doubles would be more accurate.
pub const MIN_PRECISION: u32 = 53;

#[derive(Clone, Debug, PartialEq)]
pub struct HpComplex {
    re: Float,
    im: Float,
}

impl HpComplex {
    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_c64(z: Complex64, prec: u32) -> Self {
        Self::from_f64(z.re, z.im, prec)
    }

    pub fn real(x: f64, prec: u32) -> Self {
        Self::from_f64(x, 0.0, prec)
    }

    /// Builds from two floats; the lower-precision part is widened.
    pub fn from_parts(mut re: Float, mut im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        re.set_prec(prec);
        im.set_prec(prec);
        Self { re, im }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn into_parts(self) -> (Float, Float) {
        (self.re, self.im)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn set_prec(&mut self, prec: u32) {
        self.re.set_prec(prec);
        self.im.set_prec(prec);
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let mut out = self.clone();
        out.set_prec(prec);
        out
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> Float {
        let mut out = Float::with_val(self.prec(), self.re.square_ref());
        let im2 = Float::with_val(self.prec(), self.im.square_ref());
        out += &im2;
        out
    }

    pub fn norm(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Modulus rounded to a double (saturates to infinity on overflow).
    pub fn abs_f64(&self) -> f64 {
        self.norm().to_f64()
    }

    /// Natural log of the modulus, finite even when |z| overflows a double.
    pub fn ln_abs(&self) -> f64 {
        self.norm().ln().to_f64()
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn arg_f64(&self) -> f64 {
        self.arg().to_f64()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn square(&self) -> Self {
        let prec = self.prec();
        let mut re = Float::with_val(prec, &self.re + &self.im);
        let t = Float::with_val(prec, &self.re - &self.im);
        re *= &t;
        let mut im = Float::with_val(prec, &self.re * &self.im);
        im <<= 1;
        Self { re, im }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let re = Float::with_val(self.prec(), &self.re / &n);
        let mut im = Float::with_val(self.prec(), &self.im / &n);
        im.neg_assign();
        Self { re, im }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            re: Float::with_val(self.re.prec(), &self.re * k),
            im: Float::with_val(self.im.prec(), &self.im * k),
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        if self.is_zero() {
            return Self::zero(prec);
        }
        let r = self.norm();
        // sqrt((r + |re|)/2) is computed without cancellation; the other
        // component follows from im / (2 t).
        let mut t = r;
        t += Float::with_val(prec, self.re.abs_ref());
        t >>= 1;
        t.sqrt_mut();
        let mut other = Float::with_val(prec, &self.im / &t);
        other >>= 1;
        if self.re.is_sign_positive() {
            Self { re: t, im: other }
        } else {
            let mut re = other.abs();
            re.set_prec(prec);
            let mut im = t;
            if self.im.is_sign_negative() {
                im.neg_assign();
            }
            Self { re, im }
        }
    }

    pub fn exp_i(theta: &Float) -> Self {
        let mut s = Float::new(theta.prec());
        let mut c = Float::new(theta.prec());
        (&mut s, &mut c).assign(theta.sin_cos_ref());
        Self { re: c, im: s }
    }

    /// Parses `RE+IMi`, `RE-IMi`, `RE,IM`, `IMi` or `RE`.
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("not a complex number: {text:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        let parse_real = |t: &str| -> Result<Float> {
            let v = Float::parse(t).map_err(|_| bad())?;
            Ok(Float::with_val(prec, v))
        };
        if let Some((a, b)) = s.split_once(',') {
            return Ok(Self {
                re: parse_real(a)?,
                im: parse_real(b)?,
            });
        }
        let Some(body) = s.strip_suffix(['i', 'I']) else {
            return Ok(Self {
                re: parse_real(&s)?,
                im: Float::new(prec),
            });
        };
        // Split at the last sign that is not a leading sign or an exponent sign.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        let (re_txt, im_txt) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im_txt {
            "" | "+" => Float::with_val(prec, 1),
            "-" => Float::with_val(prec, -1),
            t => parse_real(t)?,
        };
        Ok(Self {
            re: parse_real(re_txt)?,
            im,
        })
    }

    /// Decimal rendering with `digits` significant digits per component.
    pub fn to_string_digits(&self, digits: usize) -> String {
        let re = format_float(&self.re, digits);
        let im = format_float(&self.im, digits);
        if im.starts_with('-') {
            format!("{re}{im}i")
        } else {
            format!("{re}+{im}i")
        }
    }

    /// Digits needed to round-trip this precision.
    pub fn full_digits(&self) -> usize {
        (self.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
    }
}

/// Plain decimal when the exponent is moderate, scientific otherwise.
pub fn format_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (neg, mant, exp) = x.to_sign_string_exp_round(10, Some(digits.max(1)), Round::Nearest);
    let exp = exp.unwrap_or(0);
    // value = 0.MANT x 10^exp
    let mant = mant.trim_end_matches('0');
    let mant = if mant.is_empty() { "0" } else { mant };
    let sign = if neg { "-" } else { "" };
    if (-8..=21).contains(&exp) {
        let e = exp as isize;
        let body = if e <= 0 {
            format!("0.{}{}", "0".repeat((-e) as usize), mant)
        } else if (e as usize) >= mant.len() {
            format!("{}{}", mant, "0".repeat(e as usize - mant.len()))
        } else {
            format!("{}.{}", &mant[..e as usize], &mant[e as usize..])
        };
        format!("{sign}{body}")
    } else {
        let (head, tail) = mant.split_at(1);
        let tail = if tail.is_empty() { String::new() } else { format!(".{tail}") };
        format!("{sign}{head}{tail}e{}", exp - 1)
    }
}

impl fmt::Display for HpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_string_digits(digits))
    }
}

impl FromStr for HpComplex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, DEFAULT_PRECISION)
    }
}

impl<'a> Add<&'a HpComplex> for &'a HpComplex {
    type Output = HpComplex;
    fn add(self, rhs: &HpComplex) -> HpComplex {
        let prec = self.prec().max(rhs.prec());
        HpComplex {
            re: Float::with_val(prec, &self.re + &rhs.re),
            im: Float::with_val(prec, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a HpComplex> for &'a HpComplex {
    type Output = HpComplex;
    fn sub(self, rhs: &HpComplex) -> HpComplex {
        let prec = self.prec().max(rhs.prec());
        HpComplex {
            re: Float::with_val(prec, &self.re - &rhs.re),
            im: Float::with_val(prec, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a HpComplex> for &'a HpComplex {
    type Output = HpComplex;
    fn mul(self, rhs: &HpComplex) -> HpComplex {
        let prec = self.prec().max(rhs.prec());
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        re -= Float::with_val(prec, &self.im * &rhs.im);
        let mut im = Float::with_val(prec, &self.re * &rhs.im);
        im += Float::with_val(prec, &self.im * &rhs.re);
        HpComplex { re, im }
    }
}

impl<'a> Div<&'a HpComplex> for &'a HpComplex {
    type Output = HpComplex;
    fn div(self, rhs: &HpComplex) -> HpComplex {
        let prec = self.prec().max(rhs.prec());
        let n = rhs.norm_sqr();
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        re += Float::with_val(prec, &self.im * &rhs.im);
        re /= &n;
        let mut im = Float::with_val(prec, &self.im * &rhs.re);
        im -= Float::with_val(prec, &self.re * &rhs.im);
        im /= &n;
        HpComplex { re, im }
    }
}

impl Neg for &HpComplex {
    type Output = HpComplex;
    fn neg(self) -> HpComplex {
        HpComplex {
            re: Float::with_val(self.re.prec(), -&self.re),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<HpComplex> for HpComplex {
            type Output = HpComplex;
            fn $m(self, rhs: HpComplex) -> HpComplex {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a HpComplex> for HpComplex {
            type Output = HpComplex;
            fn $m(self, rhs: &HpComplex) -> HpComplex {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&HpComplex> for HpComplex {
    fn add_assign(&mut self, rhs: &HpComplex) {
        let prec = self.prec().max(rhs.prec());
        self.set_prec(prec);
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&HpComplex> for HpComplex {
    fn sub_assign(&mut self, rhs: &HpComplex) {
        let prec = self.prec().max(rhs.prec());
        self.set_prec(prec);
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&HpComplex> for HpComplex {
    fn mul_assign(&mut self, rhs: &HpComplex) {
        *self = &*self * rhs;
    }
}

/// In-place kernels with reusable temporaries for the hot loops.
pub(crate) struct Scratch {
    a: Float,
    b: Float,
}

impl Scratch {
    pub(crate) fn new(prec: u32) -> Self {
        Self {
            a: Float::new(prec),
            b: Float::new(prec),
        }
    }

    /// z <- z^2 + c
    pub(crate) fn square_add(&mut self, z: &mut HpComplex, c: &HpComplex) {
        self.a.assign(&z.re + &z.im);
        self.b.assign(&z.re - &z.im);
        self.a *= &self.b;
        self.b.assign(&z.re * &z.im);
        self.b <<= 1;
        z.re.assign(&self.a + &c.re);
        z.im.assign(&self.b + &c.im);
    }

    /// d <- 2 z d + k   (k = 1 for d/dc, 0 for d/dz0)
    pub(crate) fn double_mul_add(&mut self, d: &mut HpComplex, z: &HpComplex, k: u32) {
        self.a.assign(&z.re * &d.re);
        self.b.assign(&z.im * &d.im);
        self.a -= &self.b;
        d.im *= &z.re;
        d.re *= &z.im;
        // d.re now holds im(z) re(d); d.im holds re(z) im(d)
        d.im += &d.re;
        d.im <<= 1;
        d.re.assign(&self.a << 1);
        if k != 0 {
            d.re += k;
        }
    }

    /// acc <- acc * w
    pub(crate) fn mul_assign(&mut self, acc: &mut HpComplex, w: &HpComplex) {
        self.a.assign(&acc.re * &w.re);
        self.b.assign(&acc.im * &w.im);
        self.a -= &self.b;
        self.b.assign(&acc.re * &w.im);
        acc.im *= &w.re;
        acc.im += &self.b;
        std::mem::swap(&mut acc.re, &mut self.a);
    }

    pub(crate) fn norm_sqr(&mut self, z: &HpComplex) -> &Float {
        self.a.assign(z.re.square_ref());
        self.b.assign(z.im.square_ref());
        self.a += &self.b;
        &self.a
    }
}
