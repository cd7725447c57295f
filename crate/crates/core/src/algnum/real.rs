//! Fixed-point ball arithmetic.
//!
//! A [`PrecisionReal`] is a midpoint `mid / 2^bits` together with a radius
//! `rad / 2^bits` such that the true value lies in `[mid - rad, mid + rad] / 2^bits`.
//! Errors are absolute, which is what fractional parts and distances to the
//! nearest integer need. Every operation rounds the midpoint and widens the
//! radius so that the enclosure stays valid.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionReal {
    mid: BigInt,
    rad: BigUint,
    bits: u32,
}

/// `x / 2^s` rounded to nearest, plus whether any bit was discarded.
pub(crate) fn round_shift(x: &BigInt, s: u32) -> (BigInt, bool) {
    if s == 0 {
        return (x.clone(), false);
    }
    let inexact = match x.trailing_zeros() {
        None => false,
        Some(tz) => tz < u64::from(s),
    };
    let half = BigInt::one() << (s - 1);
    ((x + half) >> s, inexact)
}

pub(crate) fn ceil_shift(x: &BigUint, s: u32) -> BigUint {
    if s == 0 || x.is_zero() {
        return x.clone();
    }
    let q = x >> s;
    if (&q << s) == *x {
        q
    } else {
        q + 1u32
    }
}

fn big_to_f64_scaled(x: &BigInt, bits: u32) -> f64 {
    let len = x.bits();
    if len == 0 {
        return 0.0;
    }
    let (top, shift) = if len > 64 {
        let s = len - 64;
        (x >> s, s as i64)
    } else {
        (x.clone(), 0)
    };
    let f = top.to_f64().unwrap_or(0.0);
    let e = shift - i64::from(bits);
    if e > 2000 {
        return f * f64::INFINITY;
    }
    if e < -2200 {
        return 0.0;
    }
    // split the exponent so neither factor overflows on its own
    let e1 = e / 2;
    let e2 = e - e1;
    f * (e1 as f64).exp2() * (e2 as f64).exp2()
}

impl PrecisionReal {
    pub fn from_parts(mid: BigInt, rad: BigUint, bits: u32) -> Self {
        PrecisionReal { mid, rad, bits }
    }

    pub fn zero(bits: u32) -> Self {
        PrecisionReal { mid: BigInt::zero(), rad: BigUint::zero(), bits }
    }

    pub fn from_int(n: &BigInt, bits: u32) -> Self {
        PrecisionReal { mid: n << bits, rad: BigUint::zero(), bits }
    }

    pub fn from_i64(n: i64, bits: u32) -> Self {
        Self::from_int(&BigInt::from(n), bits)
    }

    /// Nearest fixed-point value to `q`; exact when `q` is dyadic with at most `bits` fraction bits.
    pub fn from_ratio(q: &BigRational, bits: u32) -> Self {
        let num: BigInt = q.numer() << bits;
        let den = q.denom();
        let (quot, rem) = num.div_mod_floor(den);
        if rem.is_zero() {
            return PrecisionReal { mid: quot, rad: BigUint::zero(), bits };
        }
        let twice: BigInt = rem << 1;
        let mid = if &twice >= den { quot + 1 } else { quot };
        PrecisionReal { mid, rad: BigUint::one(), bits }
    }

    /// The exact binary value of `x` rounded to `bits` fraction bits.
    pub fn from_f64(x: f64, bits: u32) -> Result<Self> {
        let q = BigRational::from_float(x)
            .ok_or_else(|| Error::InvalidInput(format!("non-finite float {x}")))?;
        Ok(Self::from_ratio(&q, bits))
    }

    /// Ball `[q - err, q + err]` at `bits` fraction bits.
    pub fn from_ratio_with_error(q: &BigRational, err: &BigRational, bits: u32) -> Self {
        let mut out = Self::from_ratio(q, bits);
        let scaled = err.abs() * BigRational::from_integer(BigInt::one() << bits);
        let r = scaled.ceil().to_integer().to_biguint().unwrap_or_default();
        out.rad += r;
        out
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mid(&self) -> &BigInt {
        &self.mid
    }

    pub fn rad(&self) -> &BigUint {
        &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Midpoint as a double.
    pub fn value(&self) -> f64 {
        big_to_f64_scaled(&self.mid, self.bits)
    }

    /// Upper bound on the absolute error, rounded up to a double.
    pub fn abs_error(&self) -> f64 {
        if self.rad.is_zero() {
            return 0.0;
        }
        let len = self.rad.bits();
        let (top, shift) = if len > 60 {
            let s = len - 60;
            ((&self.rad >> s) + 1u32, s as i64)
        } else {
            (self.rad.clone(), 0)
        };
        let f = top.to_f64().unwrap_or(f64::INFINITY);
        let e = shift - i64::from(self.bits);
        let e1 = e / 2;
        let e2 = e - e1;
        let v = f * (e1 as f64).exp2() * (e2 as f64).exp2();
        v * (1.0 + f64::EPSILON * 4.0) + f64::from_bits(1)
    }

    /// `log2` of the radius in absolute units; `-inf` for exact values.
    pub fn error_log2(&self) -> f64 {
        if self.rad.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.rad.bits() as f64 - f64::from(self.bits)
    }

    /// True when the radius is at most `2^-target_bits`.
    pub fn error_within_bits(&self, target_bits: u32) -> bool {
        if self.rad.is_zero() {
            return true;
        }
        if target_bits > self.bits {
            return false;
        }
        self.rad <= (BigUint::one() << (self.bits - target_bits))
    }

    /// Re-express at a different number of fraction bits.
    pub fn rescale(&self, bits: u32) -> Self {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = bits - self.bits;
                PrecisionReal { mid: &self.mid << s, rad: &self.rad << s, bits }
            }
            Ordering::Less => {
                let s = self.bits - bits;
                let (mid, inexact) = round_shift(&self.mid, s);
                let mut rad = ceil_shift(&self.rad, s);
                if inexact {
                    rad += 1u32;
                }
                PrecisionReal { mid, rad, bits }
            }
        }
    }

    fn aligned<'a>(
        a: &'a PrecisionReal,
        b: &'a PrecisionReal,
    ) -> (std::borrow::Cow<'a, PrecisionReal>, std::borrow::Cow<'a, PrecisionReal>) {
        use std::borrow::Cow;
        match a.bits.cmp(&b.bits) {
            Ordering::Equal => (Cow::Borrowed(a), Cow::Borrowed(b)),
            Ordering::Less => (Cow::Owned(a.rescale(b.bits)), Cow::Borrowed(b)),
            Ordering::Greater => (Cow::Borrowed(a), Cow::Owned(b.rescale(a.bits))),
        }
    }

    /// Widen the radius by `extra` units in the last place.
    pub fn widen_ulps(&self, extra: &BigUint) -> Self {
        PrecisionReal { mid: self.mid.clone(), rad: &self.rad + extra, bits: self.bits }
    }

    /// Widen the radius so that it also covers `err` (absolute units).
    pub fn widen_by(&self, err: &PrecisionReal) -> Self {
        let e = err.upper_abs_ulps(self.bits);
        self.widen_ulps(&e)
    }

    /// An upper bound on `|x|` expressed in ulps of `2^-bits`.
    pub fn upper_abs_ulps(&self, bits: u32) -> BigUint {
        let m = self.mid.magnitude() + &self.rad;
        if bits >= self.bits {
            m << (bits - self.bits)
        } else {
            ceil_shift(&m, self.bits - bits)
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        PrecisionReal {
            mid: &self.mid * n,
            rad: &self.rad * n.magnitude(),
            bits: self.bits,
        }
    }

    pub fn add_int(&self, n: &BigInt) -> Self {
        PrecisionReal { mid: &self.mid + (n << self.bits), rad: self.rad.clone(), bits: self.bits }
    }

    pub fn div_int(&self, n: &BigInt) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::DomainError("division by zero".into()));
        }
        let (q, r) = self.mid.div_mod_floor(n);
        let mut rad = &self.rad / n.magnitude();
        if !(&rad * n.magnitude() == self.rad) {
            rad += 1u32;
        }
        if !r.is_zero() {
            rad += 1u32;
        }
        Ok(PrecisionReal { mid: q, rad, bits: self.bits })
    }

    /// Multiply by `2^e` exactly. Negative `e` increases the fraction bits.
    pub fn mul_pow2(&self, e: i64) -> Self {
        if e >= 0 {
            let s = e as u32;
            PrecisionReal { mid: &self.mid << s, rad: &self.rad << s, bits: self.bits }
        } else {
            PrecisionReal {
                mid: self.mid.clone(),
                rad: self.rad.clone(),
                bits: self.bits + (-e) as u32,
            }
        }
    }

    pub fn abs(&self) -> Self {
        PrecisionReal { mid: self.mid.abs(), rad: self.rad.clone(), bits: self.bits }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Ball division. Fails when the divisor's enclosure contains zero.
    pub fn checked_div(&self, other: &PrecisionReal) -> Result<Self> {
        let (a, b) = Self::aligned(self, other);
        let bits = a.bits;
        let mb_abs = b.mid.magnitude();
        if mb_abs <= &b.rad {
            return Err(Error::IndeterminateSign);
        }
        let num: BigInt = &a.mid << bits;
        let (q, r) = num.div_mod_floor(&b.mid);
        // round to nearest
        let twice: BigInt = BigInt::from(r.magnitude().clone()) << 1;
        let (q, inexact) = if r.is_zero() {
            (q, false)
        } else if twice >= BigInt::from(mb_abs.clone()) {
            (q + 1, true)
        } else {
            (q, true)
        };
        let err_num: BigUint = &a.rad * mb_abs + a.mid.magnitude() * &b.rad;
        let mut rad = BigUint::zero();
        if !err_num.is_zero() {
            let den: BigUint = mb_abs * (mb_abs - &b.rad);
            let scaled: BigUint = err_num << bits;
            let (qq, rr) = scaled.div_rem(&den);
            rad = if rr.is_zero() { qq } else { qq + 1u32 };
        }
        if inexact {
            rad += 1u32;
        }
        Ok(PrecisionReal { mid: q, rad, bits })
    }

    pub fn recip(&self) -> Result<Self> {
        PrecisionReal::from_i64(1, self.bits).checked_div(self)
    }

    /// `mid - rad` as a fixed-point integer.
    pub fn lower_scaled(&self) -> BigInt {
        &self.mid - BigInt::from(self.rad.clone())
    }

    pub fn upper_scaled(&self) -> BigInt {
        &self.mid + BigInt::from(self.rad.clone())
    }

    pub fn lower(&self) -> f64 {
        big_to_f64_scaled(&self.lower_scaled(), self.bits)
    }

    pub fn upper(&self) -> f64 {
        big_to_f64_scaled(&self.upper_scaled(), self.bits)
    }

    /// Certified sign: `Some` only when the enclosure excludes zero (or is exactly zero).
    pub fn sign(&self) -> Option<Ordering> {
        if self.mid.magnitude() > &self.rad {
            Some(if self.mid.is_positive() { Ordering::Greater } else { Ordering::Less })
        } else if self.mid.is_zero() && self.rad.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.magnitude() <= &self.rad
    }

    /// Certified comparison against a rational; `None` when `q` lies in the enclosure.
    pub fn cmp_ratio(&self, q: &BigRational) -> Option<Ordering> {
        // compare (mid ± rad) * den with num * 2^bits
        let den = q.denom();
        let target: BigInt = q.numer() << self.bits;
        let lo = self.lower_scaled() * den;
        let hi = self.upper_scaled() * den;
        if lo > target {
            Some(Ordering::Greater)
        } else if hi < target {
            Some(Ordering::Less)
        } else if self.rad.is_zero() && lo == target {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison of two balls.
    pub fn cmp_certified(&self, other: &PrecisionReal) -> Option<Ordering> {
        (self - other).sign()
    }

    /// True when the two enclosures intersect.
    pub fn overlaps(&self, other: &PrecisionReal) -> bool {
        let d = self - other;
        d.contains_zero()
    }

    /// Certified floor.
    pub fn floor(&self) -> Result<BigInt> {
        let lo = self.lower_scaled() >> self.bits;
        let hi = self.upper_scaled() >> self.bits;
        if lo == hi {
            Ok(lo)
        } else {
            Err(Error::BoundaryAmbiguous)
        }
    }

    /// Certified nearest integer; ambiguous when the enclosure touches a half-integer.
    pub fn round_nearest(&self) -> Result<BigInt> {
        if self.bits == 0 {
            if self.rad.is_zero() {
                return Ok(self.mid.clone());
            }
            return Err(Error::BoundaryAmbiguous);
        }
        let half = BigInt::one() << (self.bits - 1);
        let lo = (self.lower_scaled() + &half) >> self.bits;
        let hi = (self.upper_scaled() + &half) >> self.bits;
        // an enclosure endpoint sitting exactly on n + 1/2 is a tie
        let is_tie = |v: BigInt| {
            let u = v + &half;
            u.is_zero() || u.trailing_zeros().is_some_and(|tz| tz >= u64::from(self.bits))
        };
        if lo == hi && !is_tie(self.upper_scaled()) && !is_tie(self.lower_scaled()) {
            Ok(lo)
        } else {
            Err(Error::BoundaryAmbiguous)
        }
    }

    /// Fractional part in `[0, 1)` with the same error bound.
    pub fn frac(&self) -> Result<Self> {
        if self.abs_error() >= 0.25 {
            return Err(Error::BoundaryAmbiguous);
        }
        let f = self.floor()?;
        Ok(PrecisionReal {
            mid: &self.mid - (f << self.bits),
            rad: self.rad.clone(),
            bits: self.bits,
        })
    }

    /// Distance to the nearest integer. The map is 1-Lipschitz, so the radius carries over.
    pub fn nearest_integer_distance(&self) -> Result<Self> {
        if self.abs_error() >= 0.25 {
            return Err(Error::InvalidInput(
                "nearest-integer distance needs an error below 1/4".into(),
            ));
        }
        let dist = if self.bits == 0 {
            BigInt::zero()
        } else {
            let one = BigInt::one() << self.bits;
            let r = self.mid.mod_floor(&one);
            let alt = &one - &r;
            if r <= alt {
                r
            } else {
                alt
            }
        };
        Ok(PrecisionReal { mid: dist, rad: self.rad.clone(), bits: self.bits })
    }

    /// Midpoint as an exact rational.
    pub fn mid_ratio(&self) -> BigRational {
        BigRational::new(self.mid.clone(), BigInt::one() << self.bits)
    }

    /// Midpoint shortened to a double, with the radius widened to keep the enclosure valid.
    pub fn to_f64_ball(&self) -> (f64, f64) {
        let v = self.value();
        let back = BigRational::from_float(v).unwrap_or_else(BigRational::zero);
        let diff = (back - self.mid_ratio()).abs();
        let diff = diff.to_f64().unwrap_or(f64::INFINITY);
        (v, self.abs_error() + diff * (1.0 + 1e-15))
    }
}

impl fmt::Display for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:e}", self.value(), self.abs_error())
    }
}

impl Serialize for PrecisionReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PrecisionReal", 3)?;
        st.serialize_field("value", &self.value())?;
        st.serialize_field("abs_error", &self.abs_error())?;
        st.serialize_field("working_precision", &self.bits)?;
        st.end()
    }
}

impl<'a> Add<&'a PrecisionReal> for &'a PrecisionReal {
    type Output = PrecisionReal;
    fn add(self, rhs: &'a PrecisionReal) -> PrecisionReal {
        let (a, b) = PrecisionReal::aligned(self, rhs);
        PrecisionReal { mid: &a.mid + &b.mid, rad: &a.rad + &b.rad, bits: a.bits }
    }
}

impl<'a> Sub<&'a PrecisionReal> for &'a PrecisionReal {
    type Output = PrecisionReal;
    fn sub(self, rhs: &'a PrecisionReal) -> PrecisionReal {
        let (a, b) = PrecisionReal::aligned(self, rhs);
        PrecisionReal { mid: &a.mid - &b.mid, rad: &a.rad + &b.rad, bits: a.bits }
    }
}

impl<'a> Mul<&'a PrecisionReal> for &'a PrecisionReal {
    type Output = PrecisionReal;
    fn mul(self, rhs: &'a PrecisionReal) -> PrecisionReal {
        let (a, b) = PrecisionReal::aligned(self, rhs);
        let bits = a.bits;
        let prod = &a.mid * &b.mid;
        let (mid, inexact) = round_shift(&prod, bits);
        let mut err = BigUint::zero();
        if !b.rad.is_zero() {
            err += a.mid.magnitude() * &b.rad;
        }
        if !a.rad.is_zero() {
            err += b.mid.magnitude() * &a.rad;
            err += &a.rad * &b.rad;
        }
        let mut rad = ceil_shift(&err, bits);
        if inexact {
            rad += 1u32;
        }
        PrecisionReal { mid, rad, bits }
    }
}

impl Neg for &PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        PrecisionReal { mid: -&self.mid, rad: self.rad.clone(), bits: self.bits }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;
            fn $m(self, rhs: PrecisionReal) -> PrecisionReal {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;
            fn $m(self, rhs: &'a PrecisionReal) -> PrecisionReal {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        -&self
    }
}
