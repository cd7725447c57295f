//! Real roots of integer polynomials, isolated by Sturm sequences and refined on demand.

use std::cmp::Ordering;
use std::fmt;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{IntPolynomial, SturmChain};
use super::real::PrecisionReal;
use super::{bits_for_error, PrecisionPolicy};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Enclosure {
    Exact(BigRational),
    /// The root lies strictly between `lo / 2^bits` and `hi / 2^bits`, where `p` has opposite signs.
    Dyadic { lo: BigInt, hi: BigInt, bits: u32 },
}

/// A real algebraic number: the unique root of a squarefree polynomial in `[lo, hi]`.
///
/// Refinements are cached, so repeated requests at the same or lower precision are cheap.
pub struct RealAlgebraic {
    poly: IntPolynomial,
    lo: BigRational,
    hi: BigRational,
    cache: RwLock<Enclosure>,
}

impl Clone for RealAlgebraic {
    fn clone(&self) -> Self {
        RealAlgebraic {
            poly: self.poly.clone(),
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            cache: RwLock::new(self.enclosure()),
        }
    }
}

impl fmt::Debug for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealAlgebraic")
            .field("poly", &self.poly.to_string())
            .field("lo", &self.lo.to_string())
            .field("hi", &self.hi.to_string())
            .finish()
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root of {} in [{}, {}]", self.poly, self.lo, self.hi)
    }
}

fn scale(bits: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << bits)
}

fn dyadic(num: &BigInt, bits: u32) -> BigRational {
    BigRational::new(num.clone(), BigInt::one() << bits)
}

/// Dyadic bracket inside `(lo, hi)` when `p(lo)` and `p(hi)` are nonzero with opposite signs.
fn dyadic_inside(poly: &IntPolynomial, lo: &BigRational, hi: &BigRational) -> Enclosure {
    let mut b: u32 = 8;
    loop {
        let sc = scale(b);
        let l = (lo * &sc).ceil().to_integer();
        let h = (hi * &sc).floor().to_integer();
        if l < h {
            let sl = poly.sign_at_dyadic(&l, b);
            let sh = poly.sign_at_dyadic(&h, b);
            if sl == Ordering::Equal {
                return Enclosure::Exact(dyadic(&l, b));
            }
            if sh == Ordering::Equal {
                return Enclosure::Exact(dyadic(&h, b));
            }
            if sl != sh {
                return Enclosure::Dyadic { lo: l, hi: h, bits: b };
            }
        }
        b *= 2;
    }
}

/// Is the half-width of `[lo, hi] / 2^bits` at most `2^-(target + 1)`?
fn narrow_enough(lo: &BigInt, hi: &BigInt, bits: u32, target: u32) -> bool {
    let w: BigInt = hi - lo;
    (w << target) <= (BigInt::one() << bits)
}

/// `p(x)` and `p'(x)` at `x = num / 2^prec`, as fixed-point integers at `prec` bits.
fn fixed_eval(coeffs: &[BigInt], x: &BigInt, prec: u32) -> (BigInt, BigInt) {
    let d = coeffs.len() - 1;
    let mut p = &coeffs[d] << prec;
    let mut dp = BigInt::zero();
    for c in coeffs[..d].iter().rev() {
        dp = ((&dp * x) >> prec) + &p;
        p = ((&p * x) >> prec) + (c << prec);
    }
    (p, dp)
}

fn newton_step(coeffs: &[BigInt], x: &BigInt, prec: u32) -> BigInt {
    let (p, dp) = fixed_eval(coeffs, x, prec);
    if dp.is_zero() {
        return x.clone();
    }
    x - (p << prec).div_floor(&dp)
}

impl RealAlgebraic {
    /// The root of `poly` in `[lo, hi]`. The interval must contain exactly one root.
    pub fn new(poly: IntPolynomial, lo: BigRational, hi: BigRational) -> Result<Self> {
        poly.require_squarefree()?;
        if lo > hi {
            return Err(Error::InvalidInput(format!("empty interval [{lo}, {hi}]")));
        }
        let s_lo = poly.sign_at_ratio(&lo);
        let enclosure = if lo == hi {
            if s_lo != Ordering::Equal {
                return Err(Error::InvalidInput(format!("{lo} is not a root of {poly}")));
            }
            Enclosure::Exact(lo.clone())
        } else {
            let sturm = SturmChain::new(&poly);
            let n = sturm.count_in(&lo, &hi) + usize::from(s_lo == Ordering::Equal);
            if n != 1 {
                return Err(Error::InvalidInput(format!(
                    "[{lo}, {hi}] contains {n} roots of {poly}, expected exactly one"
                )));
            }
            if s_lo == Ordering::Equal {
                Enclosure::Exact(lo.clone())
            } else if poly.sign_at_ratio(&hi) == Ordering::Equal {
                Enclosure::Exact(hi.clone())
            } else {
                dyadic_inside(&poly, &lo, &hi)
            }
        };
        Ok(RealAlgebraic { poly, lo, hi, cache: RwLock::new(enclosure) })
    }

    /// The rational number `q` as a degree-one algebraic number.
    pub fn from_rational(q: &BigRational) -> Self {
        RealAlgebraic {
            poly: IntPolynomial::linear_for(q),
            lo: q.clone(),
            hi: q.clone(),
            cache: RwLock::new(Enclosure::Exact(q.clone())),
        }
    }

    /// Parse `"<polynomial> in [lo, hi]"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (p, iv) = s
            .split_once(" in ")
            .ok_or_else(|| Error::Parse(format!("expected '<polynomial> in [lo, hi]', got {s:?}")))?;
        let poly: IntPolynomial = p.trim().parse()?;
        let iv = iv.trim();
        let inner = iv
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("bad interval {iv:?}")))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad interval {iv:?}")))?;
        Self::new(poly, parse_rational(a)?, parse_rational(b)?)
    }

    pub fn polynomial(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    fn enclosure(&self) -> Enclosure {
        self.cache.read().expect("root cache poisoned").clone()
    }

    fn store(&self, e: Enclosure) {
        let mut guard = self.cache.write().expect("root cache poisoned");
        let better = match (&*guard, &e) {
            (Enclosure::Exact(_), _) => false,
            (_, Enclosure::Exact(_)) => true,
            (Enclosure::Dyadic { lo: l0, hi: h0, bits: b0 }, Enclosure::Dyadic { lo, hi, bits }) => {
                // compare widths (h - l) / 2^b
                let old: BigInt = (h0 - l0) << *bits;
                let new: BigInt = (hi - lo) << *b0;
                new < old
            }
        };
        if better {
            *guard = e;
        }
    }

    /// The exact value if it has been found to be a dyadic or interval-endpoint rational.
    pub fn exact_value(&self) -> Option<BigRational> {
        match self.enclosure() {
            Enclosure::Exact(q) => Some(q),
            Enclosure::Dyadic { .. } => None,
        }
    }

    /// Halve the bracket until its half-width is at most `2^-(target+1)`.
    fn bisect(&self, mut lo: BigInt, mut hi: BigInt, mut bits: u32, target: u32) -> Enclosure {
        let s_lo = self.poly.sign_at_dyadic(&lo, bits);
        while !narrow_enough(&lo, &hi, bits, target) {
            let sum: BigInt = &lo + &hi;
            let m = if sum.is_even() {
                sum >> 1u32
            } else {
                lo <<= 1u32;
                hi <<= 1u32;
                bits += 1;
                sum
            };
            match self.poly.sign_at_dyadic(&m, bits) {
                Ordering::Equal => return Enclosure::Exact(dyadic(&m, bits)),
                s if s == s_lo => lo = m,
                _ => hi = m,
            }
        }
        Enclosure::Dyadic { lo, hi, bits }
    }

    /// Newton iteration at doubling precision, certified by a sign change.
    fn newton(&self, lo: &BigInt, hi: &BigInt, bits: u32, target: u32) -> Option<Enclosure> {
        let coeffs = self.poly.coeffs();
        let fin = target + 8;
        let mut prec = bits + 1;
        let mut x: BigInt = lo + hi;
        while prec < fin {
            let next = (prec * 2).min(fin);
            x <<= next - prec;
            prec = next;
            x = newton_step(coeffs, &x, prec);
        }
        let lo_f: BigInt = lo << (fin - bits);
        let hi_f: BigInt = hi << (fin - bits);
        let s_lo = self.poly.sign_at_dyadic(&lo_f, fin);
        for _ in 0..4 {
            x = newton_step(coeffs, &x, fin);
            let a: BigInt = (&x - BigInt::from(16)).max(lo_f.clone());
            let b: BigInt = (&x + BigInt::from(16)).min(hi_f.clone());
            if a >= b {
                continue;
            }
            let sa = self.poly.sign_at_dyadic(&a, fin);
            let sb = self.poly.sign_at_dyadic(&b, fin);
            if sa == Ordering::Equal {
                return Some(Enclosure::Exact(dyadic(&a, fin)));
            }
            if sb == Ordering::Equal {
                return Some(Enclosure::Exact(dyadic(&b, fin)));
            }
            if sa == s_lo && sb != s_lo {
                return Some(Enclosure::Dyadic { lo: a, hi: b, bits: fin });
            }
        }
        None
    }

    fn refine_to(&self, target: u32) -> Enclosure {
        let (lo, hi, bits) = match self.enclosure() {
            Enclosure::Exact(q) => return Enclosure::Exact(q),
            Enclosure::Dyadic { lo, hi, bits } => {
                if narrow_enough(&lo, &hi, bits, target) {
                    return Enclosure::Dyadic { lo, hi, bits };
                }
                (lo, hi, bits)
            }
        };
        let coarse = self.bisect(lo, hi, bits, target.min(64));
        let out = match &coarse {
            Enclosure::Dyadic { lo, hi, bits } if target > 64 => self
                .newton(lo, hi, *bits, target)
                .unwrap_or_else(|| self.bisect(lo.clone(), hi.clone(), *bits, target)),
            _ => coarse.clone(),
        };
        self.store(out.clone());
        out
    }

    /// Ball of radius at most `2^-bits`, with no precision cap.
    pub(crate) fn ball(&self, bits: u32) -> PrecisionReal {
        match self.refine_to(bits + 2) {
            Enclosure::Exact(q) => PrecisionReal::from_ratio(&q, bits),
            Enclosure::Dyadic { lo, hi, bits: b } => {
                let mid: BigInt = &lo + &hi;
                let rad = (&hi - &lo).to_biguint().expect("ordered bracket");
                PrecisionReal::from_parts(mid, rad, b + 1).rescale(bits + 2)
            }
        }
    }

    /// Enclosure with absolute error at most `2^-bits`.
    pub fn refine_bits(&self, bits: u32, policy: &PrecisionPolicy) -> Result<PrecisionReal> {
        policy.check(u64::from(bits))?;
        Ok(self.ball(bits))
    }

    /// Enclosure with absolute error at most `target`.
    pub fn refine(&self, target: f64, policy: &PrecisionPolicy) -> Result<PrecisionReal> {
        self.refine_bits(bits_for_error(target)?, policy)
    }

    pub fn approx_f64(&self) -> f64 {
        self.ball(60).value()
    }

    /// Certified comparison with a rational number.
    pub fn cmp_ratio(&self, q: &BigRational, policy: &PrecisionPolicy) -> Result<Ordering> {
        if let Some(v) = self.exact_value() {
            return Ok(v.cmp(q));
        }
        if q < &self.lo {
            return Ok(Ordering::Greater);
        }
        if q > &self.hi {
            return Ok(Ordering::Less);
        }
        if self.poly.sign_at_ratio(q) == Ordering::Equal {
            // q is in the isolating interval, so it is this root
            return Ok(Ordering::Equal);
        }
        let mut bits = 64u32;
        loop {
            let b = self.refine_bits(bits, policy)?;
            if let Some(o) = b.cmp_ratio(q) {
                return Ok(o);
            }
            if bits >= policy.max_bits {
                return Err(Error::PrecisionExhausted { needed: u64::from(bits) * 2, max: policy.max_bits });
            }
            bits = (bits * 2).min(policy.max_bits);
        }
    }

    /// The value as a rational number, if it is one.
    ///
    /// A rational root `u/v` of a primitive polynomial has `v | a_d`, so it is a
    /// convergent of any approximation closer than `1 / (2 a_d^2)`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if let Some(q) = self.exact_value() {
            return Some(q);
        }
        let lead = self.poly.leading().abs();
        let bits = 2 * lead.bits() as u32 + 8;
        let x = self.ball(bits).mid_ratio();
        let mut rest = x;
        let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
        let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
        loop {
            let a = rest.floor().to_integer();
            let h = &a * &h1 + &h0;
            let k = &a * &k1 + &k0;
            if k > lead {
                return None;
            }
            let c = BigRational::new(h.clone(), k.clone());
            if c >= self.lo && c <= self.hi && self.poly.sign_at_ratio(&c) == Ordering::Equal {
                self.store(Enclosure::Exact(c.clone()));
                return Some(c);
            }
            let f = &rest - BigRational::from_integer(a);
            if f.is_zero() {
                return None;
            }
            rest = f.recip();
            h0 = std::mem::replace(&mut h1, h);
            k0 = std::mem::replace(&mut k1, k);
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Upper bound on `log2 max(|x|, 1)`.
    fn log2_magnitude(&self) -> f64 {
        let b = self.ball(16);
        b.upper().abs().max(b.lower().abs()).max(1.0).log2() + 1e-9
    }

    /// `x^k` with absolute error at most `target`.
    pub fn power(&self, k: u64, target: f64, policy: &PrecisionPolicy) -> Result<PrecisionReal> {
        self.power_bits(k, bits_for_error(target)?, policy)
    }

    /// `x^k` with absolute error at most `2^-out_bits`.
    ///
    /// Working precision starts at `ceil(k log2|x|) + output bits + guard` and grows by
    /// the guard on each retry; it fails once the policy's maximum is exceeded.
    pub fn power_bits(&self, k: u64, out_bits: u32, policy: &PrecisionPolicy) -> Result<PrecisionReal> {
        Ok(self.powers_bits(k, k, out_bits, policy)?.remove(0))
    }

    /// `x^k` for every `k` in `k_min ..= k_max`, each with absolute error at most `target`.
    pub fn powers(
        &self,
        k_min: u64,
        k_max: u64,
        target: f64,
        policy: &PrecisionPolicy,
    ) -> Result<Vec<PrecisionReal>> {
        self.powers_bits(k_min, k_max, bits_for_error(target)?, policy)
    }

    pub fn powers_bits(
        &self,
        k_min: u64,
        k_max: u64,
        out_bits: u32,
        policy: &PrecisionPolicy,
    ) -> Result<Vec<PrecisionReal>> {
        if k_min > k_max {
            return Ok(Vec::new());
        }
        let growth = (k_max as f64 * self.log2_magnitude()).ceil() as u64;
        let mut work = growth + u64::from(out_bits) + u64::from(policy.guard_bits);
        loop {
            let w = policy.check(work)?;
            let extra = 2 * (64 - k_max.leading_zeros()) + 2;
            let base = self.ball(w + extra).rescale(w + extra);
            let mut cur = pow_ball(&base, k_min);
            let mut out = Vec::with_capacity((k_max - k_min + 1) as usize);
            let mut ok = true;
            for k in k_min..=k_max {
                if k > k_min {
                    cur = &cur * &base;
                }
                if !cur.error_within_bits(out_bits) {
                    ok = false;
                    break;
                }
                out.push(cur.clone());
            }
            if ok {
                return Ok(out);
            }
            work += u64::from(policy.guard_bits);
        }
    }

    /// Upper bound on `log2 max(|x|, 1)`.
    pub fn log2_upper(&self) -> f64 {
        self.log2_magnitude()
    }
}

fn pow_ball(x: &PrecisionReal, k: u64) -> PrecisionReal {
    let mut acc = PrecisionReal::from_i64(1, x.bits());
    let mut base = x.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = base.square();
        }
    }
    acc
}

/// Parse `"a"`, `"a/b"` or a finite decimal such as `"-1.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim().replace('\u{2212}', "-");
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s.as_str(), 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits == "-" || digits == "+" { format!("{digits}0") } else { digits };
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let e = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if e >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-e) as usize))
    })
}

/// All real roots of a squarefree polynomial, in increasing order.
pub fn isolate_real_roots(poly: &IntPolynomial) -> Result<Vec<RealAlgebraic>> {
    poly.require_squarefree()?;
    let sturm = SturmChain::new(poly);
    let bound = BigRational::from_integer(BigInt::one() << (poly.cauchy_bound_log2() + 1));
    let lo = -bound.clone();
    let total = sturm.count_in(&lo, &bound);
    let mut out = Vec::with_capacity(total);
    isolate(poly, &sturm, lo, bound, total, &mut out);
    Ok(out)
}

fn isolate(
    poly: &IntPolynomial,
    sturm: &SturmChain,
    lo: BigRational,
    hi: BigRational,
    count: usize,
    out: &mut Vec<RealAlgebraic>,
) {
    if count == 0 {
        return;
    }
    if count == 1 {
        if poly.sign_at_ratio(&hi) == Ordering::Equal {
            out.push(RealAlgebraic {
                poly: poly.clone(),
                lo: hi.clone(),
                hi: hi.clone(),
                cache: RwLock::new(Enclosure::Exact(hi)),
            });
            return;
        }
        if poly.sign_at_ratio(&lo) != Ordering::Equal {
            let e = dyadic_inside(poly, &lo, &hi);
            out.push(RealAlgebraic { poly: poly.clone(), lo, hi, cache: RwLock::new(e) });
            return;
        }
    }
    let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
    let left = sturm.count_in(&lo, &mid);
    isolate(poly, sturm, lo, mid.clone(), left, out);
    isolate(poly, sturm, mid, hi, count - left, out);
}

/// The largest real root, if any.
pub fn largest_real_root(poly: &IntPolynomial) -> Result<RealAlgebraic> {
    isolate_real_roots(poly)?
        .pop()
        .ok_or_else(|| Error::InvalidInput(format!("{poly} has no real roots")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn golden_ratio() {
        let r = RealAlgebraic::new(p("x^2 - x - 1"), q("1"), q("2")).unwrap();
        let b = r.refine(1e-30, &PrecisionPolicy::default()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((b.value() - phi).abs() < 1e-15);
        assert!(b.abs_error() <= 1e-30);
        // phi^2 = phi + 1 holds inside the enclosure
        let lhs = b.square();
        let rhs = b.add_int(&BigInt::one());
        assert!(lhs.overlaps(&rhs));
    }

    #[test]
    fn high_precision_is_consistent() {
        let r = RealAlgebraic::new(p("x^3 - x - 1"), q("1"), q("2")).unwrap();
        let policy = PrecisionPolicy::default();
        let coarse = r.refine_bits(40, &policy).unwrap();
        let fine = r.refine_bits(5000, &policy).unwrap();
        assert!(fine.error_within_bits(5000));
        assert!(coarse.overlaps(&fine));
        assert!((fine.value() - 1.324717957244746).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(RealAlgebraic::new(p("x^2 - 2"), q("-2"), q("2")).is_err());
        assert!(RealAlgebraic::new(p("x^2 - 2"), q("2"), q("3")).is_err());
        assert!(matches!(
            RealAlgebraic::new(p("x^3 - 3x + 2"), q("0"), q("2")),
            Err(Error::NotSquarefree(_))
        ));
    }

    #[test]
    fn rational_roots() {
        let r = RealAlgebraic::new(p("3x^2 - x"), q("1/10"), q("1")).unwrap();
        assert_eq!(r.as_rational(), Some(q("1/3")));
        let s = RealAlgebraic::new(p("x^2 + 2x - 1"), q("0"), q("1")).unwrap();
        assert_eq!(s.as_rational(), None);
        let endpoint = RealAlgebraic::new(p("x^2 - 4"), q("2"), q("3")).unwrap();
        assert_eq!(endpoint.exact_value(), Some(q("2")));
    }

    #[test]
    fn isolation() {
        let roots = isolate_real_roots(&p("x^3 - 3x + 1")).unwrap();
        assert_eq!(roots.len(), 3);
        let v: Vec<f64> = roots.iter().map(|r| r.approx_f64()).collect();
        assert!(v[0] < v[1] && v[1] < v[2]);
        assert!((v[0] + 1.8793852415718).abs() < 1e-12);
        let with_zero = isolate_real_roots(&p("x^3 - x")).unwrap();
        let vals: Vec<f64> = with_zero.iter().map(|r| r.approx_f64()).collect();
        assert_eq!(vals, vec![-1.0, 0.0, 1.0]);
        assert!(isolate_real_roots(&p("x^2 + 1")).unwrap().is_empty());
    }

    #[test]
    fn comparisons() {
        let policy = PrecisionPolicy::default();
        let r = RealAlgebraic::new(p("x^2 - 2"), q("1"), q("2")).unwrap();
        assert_eq!(r.cmp_ratio(&q("1.4142"), &policy).unwrap(), Ordering::Greater);
        assert_eq!(r.cmp_ratio(&q("1.4143"), &policy).unwrap(), Ordering::Less);
        let s = RealAlgebraic::new(p("x^2 - 4"), q("1"), q("3")).unwrap();
        assert_eq!(s.cmp_ratio(&q("2"), &policy).unwrap(), Ordering::Equal);
    }

    #[test]
    fn powers_of_phi() {
        let policy = PrecisionPolicy::default();
        let phi = largest_real_root(&p("x^2 - x - 1")).unwrap();
        let x20 = phi.power(20, 1e-20, &policy).unwrap();
        // phi^20 = L_20 - psi^20 with L_20 = 15127
        assert!((x20.value() - 15126.999933893).abs() < 1e-6);
        assert!(x20.abs_error() <= 1e-20);
        let all = phi.powers(1, 30, 1e-12, &policy).unwrap();
        assert_eq!(all.len(), 30);
        assert!(all[19].overlaps(&x20));
        assert!(matches!(
            phi.power(200_000, 1e-6, &policy),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn parses_rationals_and_roots() {
        assert_eq!(q("-1.25"), BigRational::new((-5).into(), 4.into()));
        assert_eq!(q("2/6"), BigRational::new(1.into(), 3.into()));
        assert_eq!(q("1e-3"), BigRational::new(1.into(), 1000.into()));
        let r = RealAlgebraic::parse("x^2 + 2x - 1 in [0, 1]").unwrap();
        assert!((r.approx_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }
}
