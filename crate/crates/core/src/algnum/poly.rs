//! Primitive integer polynomials.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An integer polynomial `a_0 + a_1 x + ... + a_d x^d`, normalized so that it is
/// primitive and `a_d > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Build from ascending coefficients, normalizing content and sign.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput("polynomial must have degree at least 1".into()));
        }
        let g = content(&coeffs);
        let flip = coeffs.last().is_some_and(|c| c.is_negative());
        for c in coeffs.iter_mut() {
            *c = &*c / &g;
            if flip {
                *c = -&*c;
            }
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `den * x - num`, the polynomial of a rational number.
    pub fn linear_for(q: &BigRational) -> Self {
        Self::new(vec![-q.numer().clone(), q.denom().clone()])
            .expect("linear polynomial has degree 1")
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Ascending coefficients `a_0 .. a_d`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty")
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    /// `p(1) = a_0 + ... + a_d`.
    pub fn evaluate_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// `p'(1) = sum s a_s`.
    pub fn derivative_at_one(&self) -> BigInt {
        self.coeffs.iter().enumerate().map(|(s, a)| a * BigInt::from(s)).sum()
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        horner(&self.coeffs, x)
    }

    pub fn eval_ratio(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Sign of `p(num / 2^bits)`, computed exactly.
    pub fn sign_at_dyadic(&self, num: &BigInt, bits: u32) -> Ordering {
        let d = self.degree();
        let mut acc = self.coeffs[d].clone();
        for (i, c) in self.coeffs[..d].iter().enumerate().rev() {
            let shift = (bits as usize) * (d - i);
            acc = acc * num + (c << shift);
        }
        acc.cmp(&BigInt::zero())
    }

    pub fn sign_at_ratio(&self, x: &BigRational) -> Ordering {
        self.eval_ratio(x).cmp(&BigRational::zero())
    }

    /// Ascending coefficients of `p'`.
    pub fn derivative_coeffs(&self) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect()
    }

    /// Largest `|a_i / a_d|` plus one, rounded up to a power of two; all roots lie strictly inside.
    pub fn cauchy_bound_log2(&self) -> u32 {
        let lead = self.leading().magnitude().clone();
        let max = self.coeffs[..self.degree()]
            .iter()
            .map(|c| c.magnitude().clone())
            .max()
            .unwrap_or_default();
        let ratio = max.div_ceil(&lead) + 2u32;
        ratio.bits() as u32
    }

    pub fn is_squarefree(&self) -> bool {
        let dp = self.derivative_coeffs();
        poly_gcd(&self.coeffs, &dp).len() <= 1
    }

    /// Errors with [`Error::NotSquarefree`] when `gcd(p, p')` is nonconstant.
    pub fn require_squarefree(&self) -> Result<()> {
        let g = poly_gcd(&self.coeffs, &self.derivative_coeffs());
        if g.len() > 1 {
            let shown = IntPolynomial::new(g).map(|p| p.to_string()).unwrap_or_default();
            return Err(Error::NotSquarefree(shown));
        }
        Ok(())
    }

    /// Coefficients as doubles, scaled so the largest has magnitude one.
    pub fn coeffs_f64_scaled(&self) -> Vec<f64> {
        let max_bits = self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0);
        let shift = max_bits.saturating_sub(60);
        self.coeffs
            .iter()
            .map(|c| {
                let v = (c >> shift).to_f64().unwrap_or(0.0);
                if c.is_negative() && v == 0.0 {
                    -0.0
                } else {
                    v
                }
            })
            .collect()
    }
}

fn horner(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn content(coeffs: &[BigInt]) -> BigInt {
    let g = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

fn primitive(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        return p;
    }
    let g = content(&p);
    for c in p.iter_mut() {
        *c = &*c / &g;
    }
    p
}

/// Pseudo-remainder of `a` by `b`, scaled by a positive factor.
fn signed_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    // multiply by |lb| each step so the remainder keeps the sign of the true remainder
    let lb_abs = lb.abs();
    let lb_sign = if lb.is_negative() { -BigInt::one() } else { BigInt::one() };
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * &lb_abs;
        }
        let factor = &lr * &lb_sign;
        for (i, bc) in b.iter().enumerate() {
            let idx = dr - db + i;
            r[idx] -= &factor * bc;
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

/// Primitive gcd of two integer polynomials (ascending coefficients).
pub(crate) fn poly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut x = primitive(a.to_vec());
    let mut y = primitive(b.to_vec());
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = primitive(signed_prem(&x, &y));
        x = y;
        y = r;
    }
    x
}

/// Sturm chain of a squarefree polynomial, kept primitive.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Vec<BigInt>>,
}

impl SturmChain {
    pub fn new(p: &IntPolynomial) -> Self {
        let mut chain = vec![p.coeffs().to_vec(), primitive(p.derivative_coeffs())];
        loop {
            let n = chain.len();
            if chain[n - 1].len() <= 1 {
                break;
            }
            let r = signed_prem(&chain[n - 2], &chain[n - 1]);
            let r: Vec<BigInt> = primitive(r).into_iter().map(|c| -c).collect();
            if r.is_empty() {
                break;
            }
            chain.push(r);
        }
        SturmChain { chain }
    }

    fn variations<F: Fn(&[BigInt]) -> Ordering>(&self, sign: F) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.chain {
            let s = sign(p);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &BigRational) -> usize {
        self.variations(|p| {
            let mut acc = BigRational::zero();
            for c in p.iter().rev() {
                acc = acc * x + BigRational::from_integer(c.clone());
            }
            acc.cmp(&BigRational::zero())
        })
    }

    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        self.variations(|p| {
            let lead = p.last().expect("nonempty").cmp(&BigInt::zero());
            if positive || (p.len() - 1) % 2 == 0 {
                lead
            } else {
                lead.reverse()
            }
        })
    }

    /// Number of distinct real roots in `(lo, hi]`.
    pub fn count_in(&self, lo: &BigRational, hi: &BigRational) -> usize {
        self.variations_at(lo).saturating_sub(self.variations_at(hi))
    }

    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false).saturating_sub(self.variations_at_infinity(true))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

fn normalize_minus(s: &str) -> String {
    s.replace(['\u{2212}', '\u{2013}'], "-")
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Accepts `x^2 - x - 1`, `2x-3`, `2*x^3 + 1` and ascending lists like `[-1, -1, 1]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = normalize_minus(s.trim());
        if s.starts_with('[') {
            let inner = s
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("unterminated list: {s}")))?;
            let coeffs = inner
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return IntPolynomial::new(coeffs);
        }
        parse_expression(&s)
    }
}

fn parse_expression(s: &str) -> Result<IntPolynomial> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
            terms.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if (ch == '+' || ch == '-') && i == 0 {
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    terms.push((neg, cur));

    let mut coeffs: Vec<BigInt> = Vec::new();
    for (neg, t) in terms {
        if t.is_empty() {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        let (coef, power) = match t.find('x') {
            None => (parse_int(&t)?, 0usize),
            Some(pos) => {
                let head = t[..pos].trim_end_matches('*');
                let coef = if head.is_empty() { BigInt::one() } else { parse_int(head)? };
                let tail = &t[pos + 1..];
                let power = if tail.is_empty() {
                    1
                } else {
                    let e = tail
                        .strip_prefix('^')
                        .ok_or_else(|| Error::Parse(format!("bad term {t:?}")))?;
                    e.parse::<usize>().map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?
                };
                (coef, power)
            }
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += if neg { -coef } else { coef };
    }
    IntPolynomial::new(coeffs)
}

fn parse_int(t: &str) -> Result<BigInt> {
    t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer {t:?}")))
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sliding-window combination `out_k = sum_s coeffs[s] * values[k + s]`.
///
/// This one kernel produces `e_k`, `eta~_k`, `c_k` and `gamma~_k`; it is generic so the
/// exact integer path and the ball path share the same indexing.
pub fn window_combine<T>(values: &[T], coeffs: &[T]) -> Vec<T>
where
    T: Clone + Send + Sync,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T> + std::ops::Add<&'a T, Output = T>,
{
    use rayon::prelude::*;
    let w = coeffs.len();
    if w == 0 || values.len() < w {
        return Vec::new();
    }
    (0..=values.len() - w)
        .into_par_iter()
        .map(|k| {
            let mut acc = &coeffs[0] * &values[k];
            for s in 1..w {
                let term = &coeffs[s] * &values[k + s];
                acc = &acc + &term;
            }
            acc
        })
        .collect()
}
