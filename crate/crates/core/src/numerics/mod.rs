//! Precision contract and multiprecision complex arithmetic.
//!
//! All real arithmetic is delegated to MPFR through `rug::Float`; complex
//! values are pairs of floats carried together with the [`Precision`] they
//! were produced at.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::{Float, Rational};

use crate::error::{Error, Result};

pub mod quad;

pub const DEFAULT_BITS: u32 = 256;
pub const DEFAULT_GUARD_BITS: u32 = 32;
pub const MIN_BITS: u32 = 64;

/// Requested accuracy (`bits`) plus internal headroom (`guard_bits`).
///
/// Values are computed with `bits + guard_bits` mantissa bits and are meant to
/// be correct to about `2^(guard_bits - bits)` relative error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    bits: u32,
    guard_bits: u32,
}

impl Precision {
    pub fn new(bits: u32, guard_bits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::InvalidPrecision(format!(
                "bits must be at least {MIN_BITS}, got {bits}"
            )));
        }
        if bits > 1 << 20 || guard_bits > 1 << 16 {
            return Err(Error::InvalidPrecision(format!(
                "bits={bits}, guard_bits={guard_bits} is unreasonably large"
            )));
        }
        Ok(Precision { bits, guard_bits })
    }

    pub fn with_bits(bits: u32) -> Result<Self> {
        Self::new(bits, DEFAULT_GUARD_BITS)
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn guard_bits(self) -> u32 {
        self.guard_bits
    }

    /// Mantissa length used for every intermediate float.
    pub fn working(self) -> u32 {
        self.bits + self.guard_bits
    }

    /// Same guard, `extra` more bits. Used for internal headroom.
    pub fn raised(self, extra: u32) -> Self {
        Precision {
            bits: self.bits + extra,
            guard_bits: self.guard_bits,
        }
    }

    pub fn max(self, other: Self) -> Self {
        match self.working().cmp(&other.working()) {
            Ordering::Less => other,
            Ordering::Greater => self,
            Ordering::Equal if self.bits >= other.bits => self,
            Ordering::Equal => other,
        }
    }

    /// log2 of the accuracy target `2^(guard_bits - bits)`.
    pub fn log2_target(self) -> i32 {
        self.guard_bits as i32 - self.bits as i32
    }

    pub fn target(self) -> f64 {
        2f64.powi(self.log2_target())
    }

    /// `2^(-working)`, the unit roundoff of intermediates.
    pub fn unit_roundoff(self) -> f64 {
        2f64.powi(-(self.working() as i32))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            bits: DEFAULT_BITS,
            guard_bits: DEFAULT_GUARD_BITS,
        }
    }
}

pub fn pi(prec: Precision) -> Float {
    Float::with_val(prec.working(), Constant::Pi)
}

pub fn ln2_f64() -> f64 {
    std::f64::consts::LN_2
}

/// log2 of a float without overflowing f64 for huge or tiny magnitudes.
/// Returns `-inf` for zero.
pub fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log2() + e as f64
}

/// Complex number with MPFR real and imaginary parts.
#[derive(Clone, Debug)]
pub struct BigComplex {
    re: Float,
    im: Float,
    prec: Precision,
}

impl BigComplex {
    pub fn zero(prec: Precision) -> Self {
        Self::from_f64(0.0, 0.0, prec)
    }

    pub fn one(prec: Precision) -> Self {
        Self::from_f64(1.0, 0.0, prec)
    }

    pub fn i(prec: Precision) -> Self {
        Self::from_f64(0.0, 1.0, prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: Precision) -> Self {
        let w = prec.working();
        BigComplex {
            re: Float::with_val(w, re),
            im: Float::with_val(w, im),
            prec,
        }
    }

    pub fn from_i64(n: i64, prec: Precision) -> Self {
        let w = prec.working();
        BigComplex {
            re: Float::with_val(w, n),
            im: Float::new(w),
            prec,
        }
    }

    /// Rounds both parts to the working precision of `prec`.
    pub fn from_parts(re: Float, im: Float, prec: Precision) -> Self {
        let w = prec.working();
        BigComplex {
            re: Float::with_val(w, re),
            im: Float::with_val(w, im),
            prec,
        }
    }

    pub fn from_real(re: Float, prec: Precision) -> Self {
        let w = prec.working();
        BigComplex {
            re: Float::with_val(w, re),
            im: Float::new(w),
            prec,
        }
    }

    pub fn from_rationals(re: &Rational, im: &Rational, prec: Precision) -> Self {
        let w = prec.working();
        BigComplex {
            re: Float::with_val(w, re),
            im: Float::with_val(w, im),
            prec,
        }
    }

    /// Parses `"re,im"` or `a±bi` shorthand, where each part is a decimal
    /// (`0.25`, `1e-3`) or a fraction (`1/2`). Examples: `1/2+8i`, `-3.5i`,
    /// `2`, `0.3,2`.
    pub fn parse(text: &str, prec: Precision) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Domain(format!("cannot parse complex number {text:?}"));
        if t.is_empty() {
            return Err(bad());
        }
        let w = prec.working();
        let (re, im) = if let Some((a, b)) = t.split_once(',') {
            (parse_real(a, w).ok_or_else(bad)?, parse_real(b, w).ok_or_else(bad)?)
        } else if let Some(body) = t.strip_suffix('i') {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
            let (re_txt, im_txt) = match split {
                Some(k) => (&body[..k], &body[k..]),
                None => ("0", body),
            };
            let im_txt = match im_txt {
                "" | "+" => "1",
                "-" => "-1",
                other => other,
            };
            (parse_real(re_txt, w).ok_or_else(bad)?, parse_real(im_txt, w).ok_or_else(bad)?)
        } else {
            (parse_real(&t, w).ok_or_else(bad)?, Float::new(w))
        };
        Ok(BigComplex { re, im, prec })
    }

    /// `e^(2πi·k/m)`, computed from the reduced fraction so that quarter
    /// turns come out exact.
    pub fn root_of_unity(k: u64, m: u64, prec: Precision) -> Self {
        assert!(m > 0, "root of unity of order zero");
        let k = k % m;
        if k == 0 {
            return Self::one(prec);
        }
        if 2 * k == m {
            return Self::from_f64(-1.0, 0.0, prec);
        }
        if 4 * k == m {
            return Self::i(prec);
        }
        if 4 * k == 3 * m {
            return Self::from_f64(0.0, -1.0, prec);
        }
        let w = prec.working() + 8;
        let angle = Float::with_val(w, Constant::Pi) * 2u32 * Float::with_val(w, k) / m;
        let (s, c) = angle.sin_cos(Float::new(w));
        Self::from_parts(c, s, prec)
    }

    /// `e^(iθ)` for a real angle.
    pub fn cis(theta: &Float, prec: Precision) -> Self {
        let (s, c) = Float::with_val(prec.working(), theta).sin_cos(Float::new(prec.working()));
        BigComplex { re: c, im: s, prec }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn into_parts(self) -> (Float, Float) {
        (self.re, self.im)
    }

    /// Re-rounds to `prec` (raising precision pads with zeros).
    pub fn with_prec(&self, prec: Precision) -> Self {
        Self::from_parts(self.re.clone(), self.im.clone(), prec)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Exact equality of both parts, including the sign of zero being ignored.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }

    /// If the value is an exact integer `n ≤ 0`, returns `-n`.
    pub fn as_nonpositive_integer(&self) -> Option<u64> {
        if !self.im.is_zero() || !self.re.is_integer() || self.re.is_sign_positive() && !self.re.is_zero() {
            return None;
        }
        let n = self.re.to_integer()?;
        (-n).to_u64()
    }

    pub fn ensure_finite(self, what: &str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::Overflow(what.to_string()))
        }
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: Float::with_val(self.prec.working(), -&self.im),
            prec: self.prec,
        }
    }

    pub fn mul_i(&self) -> Self {
        BigComplex {
            re: Float::with_val(self.prec.working(), -&self.im),
            im: self.re.clone(),
            prec: self.prec,
        }
    }

    pub fn scale(&self, k: &Float) -> Self {
        let w = self.prec.working();
        BigComplex {
            re: Float::with_val(w, &self.re * k),
            im: Float::with_val(w, &self.im * k),
            prec: self.prec,
        }
    }

    pub fn scale_f64(&self, k: f64) -> Self {
        self.scale(&Float::with_val(53, k))
    }

    pub fn div_real(&self, k: &Float) -> Self {
        let w = self.prec.working();
        BigComplex {
            re: Float::with_val(w, &self.re / k),
            im: Float::with_val(w, &self.im / k),
            prec: self.prec,
        }
    }

    pub fn add_real(&self, k: &Float) -> Self {
        let w = self.prec.working();
        BigComplex {
            re: Float::with_val(w, &self.re + k),
            im: self.im.clone(),
            prec: self.prec,
        }
    }

    pub fn add_f64(&self, re: f64, im: f64) -> Self {
        let w = self.prec.working();
        BigComplex {
            re: Float::with_val(w, &self.re + re),
            im: Float::with_val(w, &self.im + im),
            prec: self.prec,
        }
    }

    /// `|z|^2`.
    pub fn norm(&self) -> Float {
        let w = self.prec.working();
        Float::with_val(w, self.re.clone().square() + self.im.clone().square())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec.working(), self.re.clone().hypot(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    /// log2 |z|, safe against f64 overflow.
    pub fn log2_abs(&self) -> f64 {
        log2_abs(&self.abs())
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec.working(), self.im.clone().atan2(&self.re))
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (self - other).abs_f64()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        let w = self.prec.working();
        let n = self.norm();
        Ok(BigComplex {
            re: Float::with_val(w, &self.re / &n),
            im: -Float::with_val(w, &self.im / &n),
            prec: self.prec,
        })
    }

    pub fn exp(&self) -> Self {
        let w = self.prec.working();
        let m = Float::with_val(w, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(w));
        BigComplex {
            re: Float::with_val(w, &m * &c),
            im: Float::with_val(w, &m * &s),
            prec: self.prec,
        }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("logarithm of zero".into()));
        }
        let w = self.prec.working();
        let m = Float::with_val(w, self.norm().ln()) / 2u32;
        Ok(BigComplex {
            re: m,
            im: self.arg(),
            prec: self.prec,
        })
    }

    pub fn sin(&self) -> Self {
        let w = self.prec.working();
        let (s, c) = self.re.clone().sin_cos(Float::new(w));
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(w));
        BigComplex {
            re: Float::with_val(w, &s * &ch),
            im: Float::with_val(w, &c * &sh),
            prec: self.prec,
        }
    }

    pub fn cos(&self) -> Self {
        let w = self.prec.working();
        let (s, c) = self.re.clone().sin_cos(Float::new(w));
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(w));
        BigComplex {
            re: Float::with_val(w, &c * &ch),
            im: -Float::with_val(w, &s * &sh),
            prec: self.prec,
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let w = self.prec.working();
        if self.is_zero() {
            return Self::zero(self.prec);
        }
        let r = self.abs();
        // sqrt((r + |re|)/2) is computed without cancellation.
        let t = Float::with_val(w, (Float::with_val(w, &r + self.re.clone().abs()) / 2u32).sqrt());
        let half_im = Float::with_val(w, &self.im / 2u32);
        if self.re.is_sign_positive() {
            BigComplex {
                im: Float::with_val(w, &half_im / &t),
                re: t,
                prec: self.prec,
            }
        } else {
            let re = Float::with_val(w, half_im.clone().abs() / &t);
            let im = if self.im.is_sign_negative() { -t } else { t };
            BigComplex { re, im, prec: self.prec }
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Ok(Self::one(self.prec));
        }
        let mut base = if k < 0 { self.recip()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Decimal rendering with `digits` significant digits per part.
    pub fn to_string_digits(&self, digits: usize) -> (String, String) {
        (format_float(&self.re, digits), format_float(&self.im, digits))
    }
}

fn parse_real(text: &str, w: u32) -> Option<Float> {
    let text = text.strip_prefix('+').unwrap_or(text);
    let one = |t: &str| -> Option<Float> {
        if t.is_empty() || t.chars().any(|c| c.is_alphabetic() && c != 'e' && c != 'E') {
            return None;
        }
        Float::parse(t).ok().map(|v| Float::with_val(w, v))
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let d = one(d)?;
            if d.is_zero() {
                return None;
            }
            Some(one(n)? / d)
        }
        None => one(text),
    }
}

/// Scientific notation with `digits` significant digits, e.g. `1.25e-3`.
pub fn format_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let s = x.to_string_radix(10, Some(digits));
    // MPFR style is `d.ddde±x`; normalise the exponent marker.
    match s.find('e') {
        Some(pos) => {
            let (mant, exp) = s.split_at(pos);
            let exp: i64 = exp[1..].parse().unwrap_or(0);
            format!("{mant}e{exp}")
        }
        None => s,
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let (re, im) = self.to_string_digits(digits);
        if im.starts_with('-') {
            write!(f, "{re} - {}i", &im[1..])
        } else {
            write!(f, "{re} + {im}i")
        }
    }
}

impl PartialEq for BigComplex {
    fn eq(&self, other: &Self) -> bool {
        self.bit_eq(other)
    }
}

fn promote(a: &BigComplex, b: &BigComplex) -> Precision {
    a.prec.max(b.prec)
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &'a BigComplex) -> BigComplex {
        let prec = promote(self, rhs);
        let w = prec.working();
        BigComplex {
            re: Float::with_val(w, &self.re + &rhs.re),
            im: Float::with_val(w, &self.im + &rhs.im),
            prec,
        }
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &'a BigComplex) -> BigComplex {
        let prec = promote(self, rhs);
        let w = prec.working();
        BigComplex {
            re: Float::with_val(w, &self.re - &rhs.re),
            im: Float::with_val(w, &self.im - &rhs.im),
            prec,
        }
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &'a BigComplex) -> BigComplex {
        let prec = promote(self, rhs);
        let w = prec.working();
        let ac = Float::with_val(w, &self.re * &rhs.re);
        let bd = Float::with_val(w, &self.im * &rhs.im);
        let ad = Float::with_val(w, &self.re * &rhs.im);
        let bc = Float::with_val(w, &self.im * &rhs.re);
        BigComplex {
            re: ac - bd,
            im: ad + bc,
            prec,
        }
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    /// Panics on division by an exact zero; callers check for poles first.
    fn div(self, rhs: &'a BigComplex) -> BigComplex {
        let prec = promote(self, rhs);
        let w = prec.working();
        assert!(!rhs.is_zero(), "complex division by zero");
        let n = rhs.norm();
        let ac = Float::with_val(w, &self.re * &rhs.re);
        let bd = Float::with_val(w, &self.im * &rhs.im);
        let bc = Float::with_val(w, &self.im * &rhs.re);
        let ad = Float::with_val(w, &self.re * &rhs.im);
        BigComplex {
            re: Float::with_val(w, (ac + bd) / &n),
            im: Float::with_val(w, (bc - ad) / &n),
            prec,
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: Float::with_val(self.prec.working(), -&self.re),
            im: Float::with_val(self.prec.working(), -&self.im),
            prec: self.prec,
        }
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &'a BigComplex) -> BigComplex {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<BigComplex> for &'a BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: &BigComplex) {
        if rhs.prec.working() > self.prec.working() {
            *self = &*self + rhs;
        } else {
            self.re += &rhs.re;
            self.im += &rhs.im;
        }
    }
}

impl AddAssign<BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: BigComplex) {
        *self += &rhs;
    }
}

impl SubAssign<&BigComplex> for BigComplex {
    fn sub_assign(&mut self, rhs: &BigComplex) {
        if rhs.prec.working() > self.prec.working() {
            *self = &*self - rhs;
        } else {
            self.re -= &rhs.re;
            self.im -= &rhs.im;
        }
    }
}

impl MulAssign<&BigComplex> for BigComplex {
    fn mul_assign(&mut self, rhs: &BigComplex) {
        *self = &*self * rhs;
    }
}

/// Principal-branch power `base^exponent = exp(exponent · log base)`.
///
/// Integer exponents are evaluated by repeated squaring so that negative
/// bases stay exact. The result carries the larger of the two precisions.
pub fn complex_pow(base: &BigComplex, exponent: &BigComplex) -> Result<BigComplex> {
    let prec = promote(base, exponent);
    if base.is_zero() {
        if exponent.re.is_sign_positive() && !exponent.re.is_zero() {
            return Ok(BigComplex::zero(prec));
        }
        return Err(Error::Domain(
            "zero raised to an exponent with non-positive real part".into(),
        ));
    }
    if exponent.is_real() && exponent.re.is_integer() {
        if let Some(k) = exponent.re.to_integer().and_then(|k| k.to_i64()) {
            if k.unsigned_abs() <= 1 << 20 {
                return base.with_prec(prec).powi(k);
            }
        }
    }
    let b = base.with_prec(prec);
    let e = exponent.with_prec(prec);
    Ok((&e * &b.ln()?).exp())
}

/// `base^exponent` for a positive real base using the real logarithm.
pub fn real_pow(base: &Float, exponent: &BigComplex) -> Result<BigComplex> {
    if !base.is_finite() || base.is_sign_negative() || base.is_zero() {
        return Err(Error::Domain("real_pow needs a positive finite base".into()));
    }
    let prec = exponent.prec;
    let lb = Float::with_val(prec.working(), base.ln_ref());
    Ok(exponent.scale(&lb).exp())
}

/// `|a − b| ≤ 2^(−tol_bits) · max(1, |a|, |b|)`.
pub fn nearly_equal(a: &BigComplex, b: &BigComplex, tol_bits: u32) -> bool {
    let diff = (a - b).abs();
    let mut scale = a.abs();
    let bb = b.abs();
    if bb > scale {
        scale = bb;
    }
    if scale < 1 {
        scale = Float::with_val(scale.prec(), 1);
    }
    let bound = scale >> tol_bits;
    diff <= bound
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_shorthand() {
        let p = Precision::default();
        let half = Float::with_val(p.working(), 0.5);
        let z = BigComplex::parse("1/2+8i", p).unwrap();
        assert_eq!(*z.re(), half);
        assert_eq!(*z.im(), 8);
        let z = BigComplex::parse("0.5, -12", p).unwrap();
        assert_eq!((z.re().to_f64(), z.im().to_f64()), (0.5, -12.0));
        assert_eq!(BigComplex::parse("-3.5i", p).unwrap().to_f64_pair(), (0.0, -3.5));
        assert_eq!(BigComplex::parse("2", p).unwrap().to_f64_pair(), (2.0, 0.0));
        assert_eq!(BigComplex::parse("1e-3-i", p).unwrap().to_f64_pair(), (1e-3, -1.0));
        assert_eq!(BigComplex::parse("i", p).unwrap().to_f64_pair(), (0.0, 1.0));
        for junk in ["", "abc", "1/0", "1+2j", "nan"] {
            assert!(BigComplex::parse(junk, p).is_err(), "{junk}");
        }
    }

    fn p(bits: u32) -> Precision {
        Precision::with_bits(bits).unwrap()
    }

    #[test]
    fn precision_rejects_small_bits() {
        assert!(Precision::new(63, 0).is_err());
        assert!(Precision::new(64, 0).is_ok());
        assert_eq!(Precision::default().working(), 288);
    }

    #[test]
    fn promotion_takes_the_larger_precision() {
        let a = BigComplex::from_f64(1.5, 2.0, p(100));
        let b = BigComplex::from_f64(0.5, -1.0, p(300));
        assert_eq!((&a * &b).prec(), p(300));
        assert_eq!((&b + &a).prec(), p(300));
        assert_eq!((&a / &b).prec(), p(300));
    }

    #[test]
    fn pow_identities() {
        let prec = p(200);
        let one = BigComplex::one(prec);
        let z = BigComplex::from_f64(0.3, -7.0, prec);
        assert!(complex_pow(&one, &z).unwrap().bit_eq(&one));
        let q_over_pi = BigComplex::from_real(Float::with_val(288, 5) / pi(prec), prec);
        assert!(complex_pow(&q_over_pi, &BigComplex::zero(prec)).unwrap().bit_eq(&one));
    }

    #[test]
    fn pow_of_two_matches_decomposition() {
        // 2^(1/2 + 8i) = sqrt(2) · cis(8 ln 2), built from independent pieces.
        let prec = p(200);
        let two = BigComplex::from_f64(2.0, 0.0, prec);
        let s = BigComplex::from_f64(0.5, 8.0, prec);
        let direct = complex_pow(&two, &s).unwrap();
        let w = prec.working();
        let sqrt2 = Float::with_val(w, 2).sqrt();
        let ang = Float::with_val(w, Float::with_val(w, 2).ln() * 8u32);
        let other = BigComplex::cis(&ang, prec).scale(&sqrt2);
        assert!(nearly_equal(&direct, &other, 190));
    }

    #[test]
    fn integer_pow_matches_repeated_multiplication() {
        let prec = p(128);
        let z = BigComplex::from_f64(-1.25, 0.75, prec);
        let mut acc = BigComplex::one(prec);
        for _ in 0..13 {
            acc = &acc * &z;
        }
        let e = BigComplex::from_i64(13, prec);
        assert!(nearly_equal(&complex_pow(&z, &e).unwrap(), &acc, 120));
        let via_log = (&e * &z.ln().unwrap()).exp();
        assert!(nearly_equal(&via_log, &acc, 110));
    }

    #[test]
    fn zero_base() {
        let prec = p(64);
        let z = BigComplex::zero(prec);
        assert!(complex_pow(&z, &BigComplex::from_f64(-1.0, 3.0, prec)).is_err());
        assert!(complex_pow(&z, &BigComplex::from_f64(0.5, 3.0, prec)).unwrap().is_zero());
    }

    #[test]
    fn nearly_equal_cases() {
        let prec = p(256);
        let x = BigComplex::from_f64(0.25, -3.0, prec);
        assert!(nearly_equal(&x, &x, 250));
        let tiny = BigComplex::from_real(Float::with_val(300, Float::i_exp(1, -200)), prec);
        assert!(nearly_equal(&BigComplex::zero(prec), &tiny, 100));
        let near_one = BigComplex::from_real(Float::with_val(300, 1) + Float::with_val(300, Float::i_exp(1, -50)), prec);
        assert!(!nearly_equal(&BigComplex::one(prec), &near_one, 100));
    }

    #[test]
    fn elementary_functions_agree() {
        let prec = p(160);
        let z = BigComplex::from_f64(0.7, -2.3, prec);
        let lhs = &z.sin() * &z.sin() + &z.cos() * &z.cos();
        assert!(nearly_equal(&lhs, &BigComplex::one(prec), 150));
        let r = z.sqrt();
        assert!(nearly_equal(&(&r * &r), &z, 150));
        let neg = BigComplex::from_f64(-4.0, -0.0, prec);
        assert!(neg.sqrt().re().is_zero() || neg.sqrt().re().to_f64().abs() < 1e-40);
        assert!(nearly_equal(&z.ln().unwrap().exp(), &z, 150));
    }

    #[test]
    fn roots_of_unity_quarters_are_exact() {
        let prec = p(64);
        assert!(BigComplex::root_of_unity(1, 4, prec).bit_eq(&BigComplex::i(prec)));
        assert!(BigComplex::root_of_unity(3, 6, prec).bit_eq(&BigComplex::from_f64(-1.0, 0.0, prec)));
        let z = BigComplex::root_of_unity(1, 3, prec);
        assert!(nearly_equal(&z.powi(3).unwrap(), &BigComplex::one(prec), 80));
    }

    #[test]
    fn formatting() {
        assert_eq!(format_float(&Float::with_val(64, 0.00125), 3), "1.25e-3");
        let z = BigComplex::from_f64(1.5, -0.25, p(64));
        assert_eq!(format!("{z:.3}"), "1.50 - 2.50e-1i");
    }
}
