//! Complex roots with certified inclusion discs.
//!
//! Approximate roots come from an Aberth iteration in doubles, are polished by
//! Weierstrass (Durand-Kerner) steps in fixed point, and are then certified: with
//! `W_i = p(z_i) / (a_d prod_{j != i} (z_i - z_j))`, the discs `|z - z_i| <= d |W_i|`
//! cover every root, and a disc disjoint from all others holds exactly one.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use super::poly::IntPolynomial;
use super::real::PrecisionReal;
use super::{bits_for_error, PrecisionPolicy};
use crate::error::{Error, Result};

/// A disc `|z - center| <= radius` containing exactly one root.
#[derive(Clone, Debug, Serialize)]
pub struct RootDisc {
    pub re: PrecisionReal,
    pub im: PrecisionReal,
    /// Upper bound on the disc radius.
    pub radius: PrecisionReal,
    /// Enclosure of the modulus of the root inside the disc.
    pub modulus: PrecisionReal,
}

fn horner_f64(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let d = c.len() - 1;
    let mut p = Complex64::new(c[d], 0.0);
    let mut dp = Complex64::zero();
    for a in c[..d].iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn aberth(c: &[f64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let lead = c[d].abs();
    // Fujiwara bound
    let r = (0..d)
        .map(|i| (c[i].abs() / lead).powf(1.0 / (d - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3)
        * 2.0;
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(r * 0.9, std::f64::consts::TAU * k as f64 / d as f64 + 0.7))
        .collect();
    for _ in 0..1000 {
        let mut done = true;
        for k in 0..d {
            let (p, dp) = horner_f64(c, z[k]);
            if p == Complex64::zero() {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[k] -= w;
            if w.norm() > 1e-15 * z[k].norm().max(1e-300) {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    z
}

/// Fixed-point complex number `(re + i im) / 2^bits`.
#[derive(Clone, Debug)]
struct Fx {
    re: BigInt,
    im: BigInt,
}

impl Fx {
    fn mul(&self, o: &Fx, bits: u32) -> Fx {
        Fx {
            re: (&self.re * &o.re - &self.im * &o.im) >> bits,
            im: (&self.re * &o.im + &self.im * &o.re) >> bits,
        }
    }

    fn sub(&self, o: &Fx) -> Fx {
        Fx { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn div(&self, o: &Fx, bits: u32) -> Option<Fx> {
        let den = &o.re * &o.re + &o.im * &o.im;
        if den.is_zero() {
            return None;
        }
        let re = (&self.re * &o.re + &self.im * &o.im) << bits;
        let im = (&self.im * &o.re - &self.re * &o.im) << bits;
        Some(Fx { re: re / &den, im: im / &den })
    }
}

/// One sweep of Weierstrass corrections; returns the largest correction in ulps.
fn weierstrass_sweep(coeffs: &[BigInt], z: &mut [Fx], bits: u32) -> BigUint {
    let d = z.len();
    let mut worst = BigUint::zero();
    for i in 0..d {
        let mut p = Fx { re: &coeffs[d] << bits, im: BigInt::zero() };
        for c in coeffs[..d].iter().rev() {
            p = p.mul(&z[i], bits);
            p.re += c << bits;
        }
        let mut den = Fx { re: &coeffs[d] << bits, im: BigInt::zero() };
        for j in 0..d {
            if j != i {
                den = den.mul(&z[i].sub(&z[j]), bits);
            }
        }
        if let Some(w) = p.div(&den, bits) {
            let size = w.re.magnitude().max(w.im.magnitude()).clone();
            if size > worst {
                worst = size;
            }
            z[i] = z[i].sub(&w);
        }
    }
    worst
}

#[derive(Clone)]
struct CBall {
    re: PrecisionReal,
    im: PrecisionReal,
}

impl CBall {
    fn mul(&self, o: &CBall) -> CBall {
        CBall {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    fn abs2(&self) -> PrecisionReal {
        &self.re.square() + &self.im.square()
    }
}

/// Certify discs around the centers; `None` if they are not pairwise disjoint.
fn certify(coeffs: &[BigInt], z: &[Fx], bits: u32) -> Result<Option<Vec<RootDisc>>> {
    let d = z.len();
    let balls: Vec<CBall> = z
        .iter()
        .map(|c| CBall {
            re: PrecisionReal::from_parts(c.re.clone(), BigUint::zero(), bits),
            im: PrecisionReal::from_parts(c.im.clone(), BigUint::zero(), bits),
        })
        .collect();
    let lead = PrecisionReal::from_int(&coeffs[d], bits);
    let mut radii = Vec::with_capacity(d);
    for i in 0..d {
        let mut p = CBall { re: lead.clone(), im: PrecisionReal::zero(bits) };
        for c in coeffs[..d].iter().rev() {
            p = p.mul(&balls[i]);
            p.re = p.re.add_int(c);
        }
        let mut den = CBall { re: lead.clone(), im: PrecisionReal::zero(bits) };
        for j in 0..d {
            if j != i {
                let diff = CBall { re: &balls[i].re - &balls[j].re, im: &balls[i].im - &balls[j].im };
                den = den.mul(&diff);
            }
        }
        let w2 = match p.abs2().checked_div(&den.abs2()) {
            Ok(v) => v,
            Err(Error::IndeterminateSign) => return Ok(None),
            Err(e) => return Err(e),
        };
        let w = w2.abs().sqrt()?;
        let upper = w.mul_int(&BigInt::from(d)).upper_scaled();
        radii.push(PrecisionReal::from_parts(upper, BigUint::zero(), w.bits()));
    }
    for i in 0..d {
        for j in i + 1..d {
            let diff = CBall { re: &balls[i].re - &balls[j].re, im: &balls[i].im - &balls[j].im };
            let reach = (&radii[i] + &radii[j]).square();
            if (&diff.abs2() - &reach).sign() != Some(std::cmp::Ordering::Greater) {
                return Ok(None);
            }
        }
    }
    let mut out = Vec::with_capacity(d);
    for (b, r) in balls.into_iter().zip(radii) {
        let modulus = b.abs2().sqrt()?.widen_by(&r);
        out.push(RootDisc { re: b.re, im: b.im, radius: r, modulus });
    }
    Ok(Some(out))
}

/// Certified discs for all `d` complex roots, each modulus accurate to `2^-target_bits`.
pub fn certified_roots(
    p: &IntPolynomial,
    target_bits: u32,
    policy: &PrecisionPolicy,
) -> Result<Vec<RootDisc>> {
    p.require_squarefree()?;
    let coeffs = p.coeffs();
    let approx = aberth(&p.coeffs_f64_scaled());
    let mut bits = (target_bits + 16).max(64);
    let mut z: Vec<Fx> = approx
        .iter()
        .map(|c| Fx {
            re: PrecisionReal::from_f64(c.re, bits).map(|x| x.mid().clone()).unwrap_or_default(),
            im: PrecisionReal::from_f64(c.im, bits).map(|x| x.mid().clone()).unwrap_or_default(),
        })
        .collect();
    loop {
        let w = policy.check(u64::from(bits))?;
        let mut sweeps = 0;
        let limit = 2 * (32 - w.leading_zeros()) + 40;
        loop {
            let worst = weierstrass_sweep(coeffs, &mut z, w);
            sweeps += 1;
            if worst.bits() <= 2 || sweeps >= limit {
                break;
            }
        }
        if let Some(discs) = certify(coeffs, &z, w)? {
            if discs.iter().all(|disc| disc.modulus.error_within_bits(target_bits)) {
                return Ok(discs);
            }
        }
        let next = u64::from(bits) * 2;
        if bits >= policy.max_bits {
            return Err(Error::PrecisionExhausted { needed: next, max: policy.max_bits });
        }
        let next = policy.max_bits.min(next as u32);
        for c in z.iter_mut() {
            c.re <<= next - bits;
            c.im <<= next - bits;
        }
        bits = next;
    }
}

/// Moduli of all `d` complex roots, largest first, each within `target_abs_error`.
pub fn conjugate_moduli(
    p: &IntPolynomial,
    target_abs_error: f64,
    policy: &PrecisionPolicy,
) -> Result<Vec<PrecisionReal>> {
    let bits = bits_for_error(target_abs_error)?;
    let mut m: Vec<PrecisionReal> =
        certified_roots(p, bits, policy)?.into_iter().map(|d| d.modulus).collect();
    m.sort_by(|a, b| b.value().total_cmp(&a.value()));
    Ok(m)
}
