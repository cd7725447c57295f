//! Elementary functions on [`PrecisionReal`] balls.
//!
//! Series are summed in ball arithmetic, so rounding is tracked by the
//! arithmetic itself; only the truncated tail is added by hand.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::real::PrecisionReal;
use crate::error::{Error, Result};

const GUARD: u32 = 24;

fn negligible(x: &PrecisionReal, bits: u32) -> bool {
    x.upper_abs_ulps(bits) <= BigUint::from(8u32)
}

/// `sum_{i>=0} z^{2i+1} / (2i+1)` for `|z| <= 1/2`.
fn atanh_series(z: &PrecisionReal) -> PrecisionReal {
    let bits = z.bits();
    let z2 = z.square();
    let mut pow = z.clone();
    let mut sum = z.clone();
    let mut i: u64 = 1;
    loop {
        pow = &pow * &z2;
        let term = pow.div_int(&BigInt::from(2 * i + 1)).expect("nonzero divisor");
        sum = &sum + &term;
        if negligible(&pow, bits) {
            break;
        }
        i += 1;
    }
    // remaining terms are bounded by |pow| * z^2 / (1 - z^2) <= |pow|
    sum.widen_ulps(&pow.upper_abs_ulps(bits))
}

/// `atan(1/n)` for an integer `n >= 2`.
fn atan_inv(n: u64, bits: u32) -> PrecisionReal {
    let x = PrecisionReal::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(n)), bits);
    let n2 = BigInt::from(n) * BigInt::from(n);
    let mut pow = x.clone();
    let mut sum = x;
    let mut i: u64 = 1;
    loop {
        pow = pow.div_int(&n2).expect("nonzero divisor");
        let term = pow.div_int(&BigInt::from(2 * i + 1)).expect("nonzero divisor");
        sum = if i % 2 == 1 { &sum - &term } else { &sum + &term };
        if negligible(&pow, bits) {
            break;
        }
        i += 1;
    }
    sum.widen_ulps(&pow.upper_abs_ulps(bits))
}

/// `pi` to `bits` fraction bits.
pub fn pi(bits: u32) -> PrecisionReal {
    let w = bits + GUARD;
    let a = atan_inv(5, w).mul_int(&BigInt::from(16));
    let b = atan_inv(239, w).mul_int(&BigInt::from(4));
    (&a - &b).rescale(bits)
}

/// `ln 2 = 2 atanh(1/3)`.
pub fn ln2(bits: u32) -> PrecisionReal {
    let w = bits + GUARD;
    let third = PrecisionReal::from_ratio(&BigRational::new(1.into(), 3.into()), w);
    atanh_series(&third).mul_int(&BigInt::from(2)).rescale(bits)
}

impl PrecisionReal {
    /// Square root. A ball that reaches below zero is clipped to `[0, sqrt(upper)]`.
    pub fn sqrt(&self) -> Result<Self> {
        let bits = self.bits();
        let upper = self.upper_scaled();
        if upper.is_negative() {
            return Err(Error::DomainError("square root of a negative number".into()));
        }
        let lower = self.lower_scaled();
        if !lower.is_positive() {
            let s = (upper << bits).sqrt() + 1u32;
            let half = &s >> 1u32;
            let rad = (&s - &half).to_biguint().unwrap_or_default() + 1u32;
            return Ok(PrecisionReal::from_parts(half, rad, bits));
        }
        let m = self.mid().clone();
        let s = (&m << bits).sqrt();
        // the isqrt floor is within one ulp
        let mut rad = BigUint::one();
        if !self.rad().is_zero() {
            let lo_root = (lower << bits).sqrt();
            if lo_root.is_zero() {
                return Err(Error::IndeterminateSign);
            }
            let num: BigUint = self.rad() << bits;
            let den = lo_root.magnitude();
            rad += (&num + den - 1u32) / den;
        }
        Ok(PrecisionReal::from_parts(s, rad, bits))
    }

    /// Natural logarithm of a certified-positive ball.
    pub fn ln(&self) -> Result<Self> {
        if !self.lower_scaled().is_positive() {
            return Err(Error::DomainError("logarithm of a non-positive number".into()));
        }
        let bits = self.bits();
        let w = bits + GUARD;
        // mid / 2^bits lies in [2^j, 2^(j+1))
        let j = self.mid().bits() as i64 - i64::from(bits) - 1;
        let y = self.mul_pow2(-j).rescale(w);
        let one = PrecisionReal::from_i64(1, w);
        let z = (&y - &one).checked_div(&(&y + &one))?;
        let series = atanh_series(&z).mul_int(&BigInt::from(2));
        let j_big = BigInt::from(j);
        let extra = j_big.bits() as u32;
        let l2 = ln2(w + extra).mul_int(&j_big);
        Ok((&series + &l2).rescale(bits))
    }

    /// Exponential.
    pub fn exp(&self) -> Result<Self> {
        let bits = self.bits();
        let approx = self.value();
        if !approx.is_finite() || approx.abs() > 1.0e6 {
            return Err(Error::DomainError(format!("exp argument {approx} out of range")));
        }
        let n = (approx / std::f64::consts::LN_2).round() as i64;
        let halvings: u32 = 12;
        let w = bits + GUARD + halvings + n.max(0) as u32;
        let n_big = BigInt::from(n);
        let r = &self.rescale(w) - &ln2(w + 64).mul_int(&n_big);
        let t = r.mul_pow2(-i64::from(halvings)).rescale(w);
        let mut sum = PrecisionReal::from_i64(1, w);
        let mut term = PrecisionReal::from_i64(1, w);
        let mut i: u64 = 1;
        loop {
            term = (&term * &t).div_int(&BigInt::from(i)).expect("nonzero divisor");
            sum = &sum + &term;
            if negligible(&term, w) || term.is_exact() && term.mid().is_zero() {
                break;
            }
            i += 1;
        }
        // |t| < 1/2, so the tail is below |term|
        let mut acc = sum.widen_ulps(&term.upper_abs_ulps(w));
        for _ in 0..halvings {
            acc = acc.square();
        }
        Ok(acc.mul_pow2(n).rescale(bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn within(x: &PrecisionReal, want: f64, tol: f64) {
        assert!((x.value() - want).abs() <= tol, "{} vs {want}", x.value());
    }

    #[test]
    fn constants() {
        let p = pi(200);
        within(&p, std::f64::consts::PI, 1e-15);
        assert!(p.abs_error() < 1e-58);
        let l = ln2(100);
        within(&l, std::f64::consts::LN_2, 1e-16);
    }

    #[test]
    fn pi_is_consistent_across_precisions() {
        let lo = pi(80);
        let hi = pi(400);
        assert!(lo.overlaps(&hi));
    }

    #[test]
    fn ln_and_exp_invert() {
        for v in [0.001, 0.5, 1.0, 2.0, 10.0, 18.0, 12345.678] {
            let x = PrecisionReal::from_f64(v, 120).unwrap();
            let y = x.ln().unwrap();
            within(&y, v.ln(), 1e-13 * v.ln().abs().max(1.0));
            let back = y.exp().unwrap();
            assert!(back.overlaps(&x), "exp(ln {v}) = {back}");
        }
    }

    #[test]
    fn exp_of_two() {
        let e2 = PrecisionReal::from_i64(2, 100).exp().unwrap();
        within(&e2, 2f64.exp(), 1e-14);
        assert!(e2.abs_error() < 1e-25);
        let small = PrecisionReal::from_i64(-30, 100).exp().unwrap();
        within(&small, (-30f64).exp(), 1e-25);
    }

    #[test]
    fn sqrt_encloses() {
        let two = PrecisionReal::from_i64(2, 100);
        let r = two.sqrt().unwrap();
        within(&r, std::f64::consts::SQRT_2, 1e-16);
        let sq = r.square();
        assert!(sq.overlaps(&two));
        assert!(PrecisionReal::from_i64(-1, 10).sqrt().is_err());
        let z = PrecisionReal::zero(30).sqrt().unwrap();
        assert!(z.lower() <= 0.0 && z.upper() >= 0.0);
    }

    #[test]
    fn ln_rejects_nonpositive() {
        assert!(PrecisionReal::zero(10).ln().is_err());
        assert!(PrecisionReal::from_i64(-2, 10).ln().is_err());
    }
}
