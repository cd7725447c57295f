//! Integer sequences driven by an algebraic number, and the parameter maps around them.
//!
//! Indices start at `k = 1` unless a generator says otherwise.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algnum::{window_combine, IntPolynomial, PrecisionPolicy, PrecisionReal, RealAlgebraic, RealInput, RealSpec};
use crate::error::{Error, Result};

/// Longest sequence any generator will materialize.
pub const MAX_TERMS: usize = 1_000_000;

/// Generator name and parameters, embedded in every dump for reproducibility.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl SequenceSpec {
    pub fn new(kind: &str) -> Self {
        SequenceSpec { kind: kind.to_string(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.params.insert(key.to_string(), v);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegerSequence {
    pub start_index: i64,
    #[serde(with = "crate::serde_big")]
    pub terms: Vec<BigInt>,
    pub spec: SequenceSpec,
}

impl IntegerSequence {
    pub fn new(start_index: i64, terms: Vec<BigInt>, spec: SequenceSpec) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("a sequence needs at least one term".into()));
        }
        Ok(IntegerSequence { start_index, terms, spec })
    }

    pub fn from_i64s(start_index: i64, terms: &[i64]) -> Result<Self> {
        Self::new(start_index, terms.iter().map(|&t| BigInt::from(t)).collect(), SequenceSpec::new("explicit"))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn end_index(&self) -> i64 {
        self.start_index + self.terms.len() as i64 - 1
    }

    pub fn term(&self, k: i64) -> Option<&BigInt> {
        let i = k.checked_sub(self.start_index)?;
        usize::try_from(i).ok().and_then(|i| self.terms.get(i))
    }

    pub fn is_increasing(&self) -> bool {
        self.terms.windows(2).all(|w| w[0] < w[1])
    }

    /// CSV with header `k,term`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["k", "term"])?;
        for (i, t) in self.terms.iter().enumerate() {
            out.write_record([(self.start_index + i as i64).to_string(), t.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Read a `k,term` CSV; indices must be consecutive.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut start = None;
        let mut terms = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let bad = || Error::Parse(format!("bad sequence row {rec:?}"));
            let k: i64 = rec.get(0).ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let t: BigInt = rec.get(1).ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let s = *start.get_or_insert(k);
            if k != s + terms.len() as i64 {
                return Err(Error::InvalidInput(format!("index {k} is out of sequence")));
            }
            terms.push(t);
        }
        Self::new(start.unwrap_or(1), terms, SequenceSpec::new("csv"))
    }
}

fn check_length(n: usize) -> Result<()> {
    if n > MAX_TERMS {
        return Err(Error::OutOfRange(format!("{n} terms requested, at most {MAX_TERMS} allowed")));
    }
    Ok(())
}

/// Unroll `sum_s a_s m_{k+s} = 0` from `d` initial terms, for `k = 1 ..= k_max`.
pub fn recurrence_sequence(p: &IntPolynomial, initial: &[BigInt], k_max: usize) -> Result<IntegerSequence> {
    let d = p.degree();
    if !p.is_monic() {
        return Err(Error::NonMonicRecurrence(p.leading().to_string()));
    }
    if initial.len() != d {
        return Err(Error::InvalidInput(format!("{d} initial terms required, got {}", initial.len())));
    }
    if k_max < d {
        return Err(Error::InvalidInput(format!("k_max = {k_max} is below the degree {d}")));
    }
    check_length(k_max)?;
    let a = p.coeffs();
    let mut terms: Vec<BigInt> = Vec::with_capacity(k_max);
    terms.extend_from_slice(initial);
    while terms.len() < k_max {
        let k = terms.len() - d;
        let mut next = BigInt::zero();
        for s in 0..d {
            if !a[s].is_zero() {
                next -= &a[s] * &terms[k + s];
            }
        }
        terms.push(next);
    }
    let spec = SequenceSpec::new("recurrence")
        .with("polynomial", p.to_string())
        .with("initial", initial.iter().map(|t| t.to_string()).collect::<Vec<_>>())
        .with("k_max", k_max);
    IntegerSequence::new(1, terms, spec)
}

/// `m_k` = nearest integer to `xi alpha^k` for `k = k_min ..= k_max`.
pub fn rounded_power_sequence(
    alpha: &RealAlgebraic,
    xi: &RealInput,
    k_min: u64,
    k_max: u64,
    policy: &PrecisionPolicy,
) -> Result<IntegerSequence> {
    if k_min > k_max {
        return Err(Error::InvalidInput(format!("empty range {k_min}..={k_max}")));
    }
    check_length((k_max - k_min + 1) as usize)?;
    if xi.cmp_ratio(&BigRational::zero(), policy)? != std::cmp::Ordering::Greater {
        return Err(Error::InvalidInput("xi must be positive".into()));
    }
    let spec = SequenceSpec::new("rounded-power")
        .with("alpha", RealInput::Algebraic(alpha.clone()).to_spec())
        .with("xi", xi.to_spec())
        .with("k_min", k_min)
        .with("k_max", k_max);
    if let (Some(a), Some(x)) = (alpha.exact_value(), xi.as_rational()) {
        let terms = (k_min..=k_max).map(|k| round_exact(&(x * pow_ratio(&a, k)))).collect::<Result<_>>()?;
        return IntegerSequence::new(k_min as i64, terms, spec);
    }
    let growth = (k_max as f64 * alpha.log2_upper()).ceil() as u32;
    let xi_log = xi.approx_f64().abs().max(1.0).log2().ceil() as u32;
    let terms = policy.escalate(8, |b| {
        let powers = alpha.powers_bits(k_min, k_max, b + xi_log + 4, policy)?;
        let x = xi.approx(b + growth + 8, policy)?;
        let first = &x * &powers[0];
        if first.upper() < 1.0 {
            return Err(Error::InvalidInput("xi alpha^k_min must be at least 1".into()));
        }
        powers.iter().map(|pk| (&x * pk).round_nearest()).collect::<Result<Vec<_>>>()
    })?;
    IntegerSequence::new(k_min as i64, terms, spec)
}

fn pow_ratio(a: &BigRational, k: u64) -> BigRational {
    num_traits::pow::Pow::pow(a, num_bigint::BigUint::from(k))
}

/// Nearest integer to a rational; an exact half-integer has none.
fn round_exact(x: &BigRational) -> Result<BigInt> {
    let two = BigInt::from(2);
    if x.denom() == &two {
        return Err(Error::BoundaryAmbiguous);
    }
    Ok((x + BigRational::new(1.into(), two)).floor().to_integer())
}

/// Greedy `n_{k+1} = round(alpha n_k + beta ln n_k)` from `n_1`, for `k_max` terms.
pub fn log_drift_sequence(
    alpha: &RealAlgebraic,
    beta: &RealInput,
    n1: &BigInt,
    k_max: usize,
    policy: &PrecisionPolicy,
) -> Result<IntegerSequence> {
    if !n1.is_positive() {
        return Err(Error::InvalidInput("n_1 must be at least 1".into()));
    }
    if alpha.cmp_ratio(&BigRational::one(), policy)? != std::cmp::Ordering::Greater {
        return Err(Error::DomainError("alpha must exceed 1".into()));
    }
    check_length(k_max)?;
    let mut terms = vec![n1.clone()];
    while terms.len() < k_max {
        let n = terms.last().expect("nonempty");
        let size = n.bits();
        let next = policy.escalate(40, |w| {
            let a = alpha.refine_bits(policy.check(u64::from(w) + size + 2)?, policy)?;
            let mut x = a.mul_int(n);
            if !beta.is_zero() {
                let ln = PrecisionReal::from_int(n, w + 8).ln()?;
                let log_ln = (size as f64).log2().ceil().max(1.0) as u32;
                let b = beta.approx(w + log_ln + 8, policy)?;
                x = &x + &(&b * &ln);
            }
            x.round_nearest()
        })?;
        if &next <= n {
            return Err(Error::NotIncreasing(terms.len() as i64 + 1));
        }
        terms.push(next);
    }
    let spec = SequenceSpec::new("log-drift")
        .with("alpha", RealInput::Algebraic(alpha.clone()).to_spec())
        .with("beta", beta.to_spec())
        .with("n1", n1.to_string())
        .with("k_max", k_max);
    IntegerSequence::new(1, terms, spec)
}

/// `m_k = n_k + floor(k theta)`.
pub fn m_from_n(n: &IntegerSequence, theta: &RealInput, policy: &PrecisionPolicy) -> Result<IntegerSequence> {
    let floors = theta.floor_multiples(n.start_index, n.len(), policy)?;
    let terms = n.terms.iter().zip(&floors).map(|(t, f)| t + f).collect();
    let spec = SequenceSpec::new("m-from-n")
        .with("source", &n.spec)
        .with("theta", theta.to_spec());
    IntegerSequence::new(n.start_index, terms, spec)
}

/// `n_k = m_k - floor(k theta)`, the inverse of [`m_from_n`].
pub fn n_from_m(m: &IntegerSequence, theta: &RealInput, policy: &PrecisionPolicy) -> Result<IntegerSequence> {
    let floors = theta.floor_multiples(m.start_index, m.len(), policy)?;
    let terms = m.terms.iter().zip(&floors).map(|(t, f)| t - f).collect();
    IntegerSequence::new(m.start_index, terms, SequenceSpec::new("n-from-m").with("theta", theta.to_spec()))
}

fn alpha_above_one(alpha: &RealAlgebraic, bits: u32, policy: &PrecisionPolicy) -> Result<PrecisionReal> {
    if alpha.cmp_ratio(&BigRational::one(), policy)? != std::cmp::Ordering::Greater {
        return Err(Error::DomainError("alpha must exceed 1".into()));
    }
    alpha.refine_bits(bits, policy)
}

/// `theta = beta ln(alpha) / (alpha - 1)`.
pub fn theta_from_beta(
    alpha: &RealAlgebraic,
    beta: &RealInput,
    bits: u32,
    policy: &PrecisionPolicy,
) -> Result<PrecisionReal> {
    let w = bits + 32;
    let a = alpha_above_one(alpha, w, policy)?;
    if beta.is_zero() {
        return Ok(PrecisionReal::zero(bits));
    }
    let factor = a.ln()?.checked_div(&a.add_int(&-BigInt::one()))?;
    Ok((&beta.approx(w, policy)? * &factor).rescale(bits + 2))
}

/// `beta = theta (alpha - 1) / ln(alpha)`.
pub fn beta_from_theta(
    alpha: &RealAlgebraic,
    theta: &PrecisionReal,
    bits: u32,
    policy: &PrecisionPolicy,
) -> Result<PrecisionReal> {
    let w = bits.max(theta.bits()) + 32;
    let a = alpha_above_one(alpha, w, policy)?;
    let factor = a.add_int(&-BigInt::one()).checked_div(&a.ln()?)?;
    Ok((&theta.rescale(w) * &factor).rescale(bits + 2))
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsParams {
    pub a: RealSpec,
    pub b: RealSpec,
    pub b_03: RealSpec,
    pub c: PrecisionReal,
    pub alpha_0: PrecisionReal,
    pub beta_0: PrecisionReal,
}

/// `c = sqrt(4b - 1) / 2`, `alpha_0 = e^(pi / c)`, `beta_0 = (b_03 - a)(alpha_0 - 1)`.
pub fn dynamics_params(
    a: &RealInput,
    b: &RealInput,
    b_03: &RealInput,
    bits: u32,
    policy: &PrecisionPolicy,
) -> Result<DynamicsParams> {
    let quarter = BigRational::new(1.into(), 4.into());
    if b.cmp_ratio(&quarter, policy)? != std::cmp::Ordering::Greater {
        return Err(Error::DomainError("b must exceed 1/4".into()));
    }
    // alpha_0 inherits the relative error of pi / c, so carry log2(alpha_0) extra bits
    let c_approx = (4.0 * b.approx_f64() - 1.0).max(0.0).sqrt() / 2.0;
    let growth = (std::f64::consts::PI / c_approx / std::f64::consts::LN_2).min(1.0e6).ceil() as u32;
    let w = policy.check(u64::from(bits) + 64 + u64::from(growth))?;
    let bb = b.approx(w + 8, policy)?;
    let c = bb.mul_int(&4.into()).add_int(&-BigInt::one()).sqrt()?.mul_pow2(-1).rescale(w);
    let exponent = crate::algnum::pi(w + 8).checked_div(&c)?;
    let alpha_0 = exponent.exp()?;
    let diff = &b_03.approx(w, policy)? - &a.approx(w, policy)?;
    let beta_0 = &diff * &alpha_0.add_int(&-BigInt::one());
    Ok(DynamicsParams {
        a: a.to_spec(),
        b: b.to_spec(),
        b_03: b_03.to_spec(),
        c: c.rescale(bits + 2),
        alpha_0: alpha_0.rescale(bits + 2),
        beta_0: beta_0.rescale(bits + 2),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualKind {
    /// `f_k = m_{k+1} - alpha m_k`
    F,
    /// `g_k = n_{k+1} - alpha n_k - beta ln n_k`
    G,
    /// `eta_k = f_k + {(k+1) theta} - alpha {k theta}`
    Eta,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualSample {
    pub kind: ResidualKind,
    pub start_index: i64,
    pub values: Vec<PrecisionReal>,
    pub sup_abs: PrecisionReal,
}

/// Parameters a residual kind needs beyond the sequence and `alpha`.
#[derive(Clone, Copy, Debug)]
pub enum ResidualParams<'a> {
    F,
    G { beta: &'a RealInput },
    Eta { theta: &'a RealInput },
}

/// Ball around the largest `|value|`.
pub fn sup_abs(values: &[PrecisionReal]) -> PrecisionReal {
    values
        .iter()
        .max_by(|x, y| x.upper_abs_ulps(x.bits().max(y.bits())).cmp(&y.upper_abs_ulps(x.bits().max(y.bits()))))
        .map(|v| v.abs())
        .unwrap_or_else(|| PrecisionReal::zero(0))
}

/// `f_k = m_{k+1} - alpha m_k` for every consecutive pair, each within `2^-target_bits`.
///
/// A direct evaluation needs about `log2 |m_k|` bits of `alpha`. Instead, with
/// `q(x) = p(x) / (x - alpha) = sum_j b_j x^j`, the residuals satisfy
/// `sum_j b_j f_{k+j} = e_k`, a recurrence whose characteristic roots are the
/// conjugates of `alpha`. For a Pisot number it contracts, so it is run forward in
/// ball arithmetic and re-anchored by a direct evaluation whenever the radius grows
/// past the target.
pub fn f_residuals(
    seq: &IntegerSequence,
    alpha: &RealAlgebraic,
    target_bits: u32,
    policy: &PrecisionPolicy,
) -> Result<Vec<PrecisionReal>> {
    let n = seq.len();
    if n < 2 {
        return Err(Error::InsufficientData("residuals need at least two terms".into()));
    }
    let m = &seq.terms;
    let p = alpha.polynomial();
    let d = p.degree();
    let a = p.coeffs();
    let w = target_bits + 32;
    let out = target_bits + 8;
    let direct = |i: usize| -> Result<PrecisionReal> {
        let size = m[i].bits();
        let ab = alpha.refine_bits(policy.check(u64::from(w) + size + 2)?, policy)?;
        let next = PrecisionReal::from_int(&m[i + 1], ab.bits());
        Ok((&next - &ab.mul_int(&m[i])).rescale(w))
    };
    if d == 1 {
        // f_k = e_k / a_1 exactly
        return Ok((0..n - 1)
            .map(|i| {
                let e = &a[0] * &m[i] + &a[1] * &m[i + 1];
                PrecisionReal::from_ratio(&BigRational::new(e, a[1].clone()), out)
            })
            .collect());
    }
    let e = window_combine(m, a);
    let alpha_ball = alpha.ball(w + 32);
    let mut b = vec![PrecisionReal::zero(w + 16); d];
    b[d - 1] = PrecisionReal::from_int(&a[d], w + 16);
    for j in (1..d).rev() {
        b[j - 1] = (&alpha_ball * &b[j]).add_int(&a[j]).rescale(w + 16);
    }
    let mut f: Vec<PrecisionReal> = Vec::with_capacity(n - 1);
    for i in 0..(d - 1).min(n - 1) {
        f.push(direct(i)?);
    }
    while f.len() < n - 1 {
        let i = f.len() + 1 - d;
        let mut acc = PrecisionReal::from_int(&e[i], w);
        for j in 0..d - 1 {
            acc = &acc - &(&b[j] * &f[i + j]);
        }
        let mut next = acc.div_int(&a[d])?.rescale(w);
        if !next.error_within_bits(target_bits + 16) {
            next = direct(f.len())?;
        }
        f.push(next);
    }
    Ok(f.into_iter().map(|v| v.rescale(out)).collect())
}

/// The residuals of `seq` of the requested kind.
pub fn residuals(
    seq: &IntegerSequence,
    alpha: &RealAlgebraic,
    params: ResidualParams<'_>,
    target_bits: u32,
    policy: &PrecisionPolicy,
) -> Result<ResidualSample> {
    let (kind, values) = match params {
        ResidualParams::F => (ResidualKind::F, f_residuals(seq, alpha, target_bits, policy)?),
        ResidualParams::Eta { theta } => {
            (ResidualKind::Eta, eta_values(seq, alpha, theta, target_bits, policy)?)
        }
        ResidualParams::G { beta } => (ResidualKind::G, g_values(seq, alpha, beta, target_bits, policy)?),
    };
    Ok(ResidualSample { kind, start_index: seq.start_index, sup_abs: sup_abs(&values), values })
}

/// `eta_k = f_k + {(k+1) theta} - alpha {k theta}`.
pub(crate) fn eta_values(
    seq: &IntegerSequence,
    alpha: &RealAlgebraic,
    theta: &RealInput,
    target_bits: u32,
    policy: &PrecisionPolicy,
) -> Result<Vec<PrecisionReal>> {
    let f = f_residuals(seq, alpha, target_bits, policy)?;
    if theta.is_zero() {
        return Ok(f);
    }
    let w = target_bits + 16;
    let fr = theta.frac_multiples(seq.start_index, seq.len(), w, policy)?;
    let a = alpha.ball(w + 8);
    Ok(f.iter()
        .enumerate()
        .map(|(i, fi)| (&(fi + &fr[i + 1]) - &(&a * &fr[i])).rescale(target_bits + 8))
        .collect())
}

fn g_values(
    seq: &IntegerSequence,
    alpha: &RealAlgebraic,
    beta: &RealInput,
    target_bits: u32,
    policy: &PrecisionPolicy,
) -> Result<Vec<PrecisionReal>> {
    let n = &seq.terms;
    if n.iter().any(|t| !t.is_positive()) {
        return Err(Error::DomainError("ln n_k needs positive terms".into()));
    }
    let w = target_bits + 16;
    (0..n.len().saturating_sub(1))
        .map(|i| {
            let size = n[i].bits();
            let a = alpha.refine_bits(policy.check(u64::from(w) + size + 2)?, policy)?;
            let mut v = &PrecisionReal::from_int(&n[i + 1], a.bits()) - &a.mul_int(&n[i]);
            if !beta.is_zero() {
                let ln = PrecisionReal::from_int(&n[i], w + 8).ln()?;
                let log_ln = (size as f64).log2().ceil().max(1.0) as u32;
                v = &v - &(&beta.approx(w + log_ln + 8, policy)? * &ln);
            }
            Ok(v.rescale(target_bits + 8))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algnum::largest_real_root;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn poly(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    fn phi() -> RealAlgebraic {
        largest_real_root(&poly("x^2 - x - 1")).unwrap()
    }

    #[test]
    fn recurrences() {
        let lucas = recurrence_sequence(&poly("x^2 - x - 1"), &ints(&[1, 3]), 6).unwrap();
        assert_eq!(lucas.terms, ints(&[1, 3, 4, 7, 11, 18]));
        let fib = recurrence_sequence(&poly("x^2 - x - 1"), &ints(&[1, 1]), 6).unwrap();
        assert_eq!(fib.terms, ints(&[1, 1, 2, 3, 5, 8]));
        let plastic = recurrence_sequence(&poly("x^3 - x - 1"), &ints(&[1, 1, 1]), 7).unwrap();
        assert_eq!(plastic.terms, ints(&[1, 1, 1, 2, 2, 3, 4]));
        assert!(matches!(
            recurrence_sequence(&poly("2x^2 - x - 1"), &ints(&[1, 1]), 5),
            Err(Error::NonMonicRecurrence(_))
        ));
    }

    #[test]
    fn rounded_powers() {
        let policy = PrecisionPolicy::default();
        let one = RealInput::integer(1);
        let s = rounded_power_sequence(&phi(), &one, 2, 7, &policy).unwrap();
        assert_eq!(s.terms, ints(&[3, 4, 7, 11, 18, 29]));
        let two = RealAlgebraic::from_rational(&BigRational::from_integer(2.into()));
        let s = rounded_power_sequence(&two, &one, 1, 4, &policy).unwrap();
        assert_eq!(s.terms, ints(&[2, 4, 8, 16]));
        let s = rounded_power_sequence(&phi(), &one, 0, 1, &policy).unwrap();
        assert_eq!(s.terms, ints(&[1, 2]));
        assert_eq!(s.start_index, 0);
    }

    #[test]
    fn half_integers_are_ambiguous() {
        let three = RealAlgebraic::from_rational(&BigRational::from_integer(3.into()));
        let half = RealInput::rational(1, 2);
        let r = rounded_power_sequence(&three, &half, 1, 3, &PrecisionPolicy::default());
        assert_eq!(r.unwrap_err(), Error::BoundaryAmbiguous);
        let q = rounded_power_sequence(&three, &RealInput::rational(1, 3), 1, 4, &PrecisionPolicy::default());
        assert_eq!(q.unwrap().terms, ints(&[1, 3, 9, 27]));
    }

    #[test]
    fn log_drift() {
        let policy = PrecisionPolicy::default();
        let zero = RealInput::integer(0);
        let s = log_drift_sequence(&phi(), &zero, &2.into(), 5, &policy).unwrap();
        assert_eq!(s.terms, ints(&[2, 3, 5, 8, 13]));
        let two = RealAlgebraic::from_rational(&BigRational::from_integer(2.into()));
        let s = log_drift_sequence(&two, &zero, &1.into(), 4, &policy).unwrap();
        assert_eq!(s.terms, ints(&[1, 2, 4, 8]));
        let s = log_drift_sequence(&phi(), &RealInput::integer(1), &10.into(), 3, &policy).unwrap();
        assert_eq!(s.terms, ints(&[10, 18, 32]));
        let shrinking = log_drift_sequence(&phi(), &RealInput::integer(-40), &3.into(), 4, &policy);
        assert!(matches!(shrinking, Err(Error::NotIncreasing(2))));
    }

    #[test]
    fn theta_shift() {
        let policy = PrecisionPolicy::default();
        let n = IntegerSequence::from_i64s(1, &[1, 2, 3, 4]).unwrap();
        let m = m_from_n(&n, &RealInput::rational(1, 2), &policy).unwrap();
        assert_eq!(m.terms, ints(&[1, 3, 4, 6]));
        let same = m_from_n(&n, &RealInput::integer(0), &policy).unwrap();
        assert_eq!(same.terms, n.terms);
        let fib = IntegerSequence::from_i64s(1, &[1, 1, 2, 3]).unwrap();
        let theta: RealInput = "x^2 + 2x - 1 in [0, 1]".parse().unwrap();
        let m = m_from_n(&fib, &theta, &policy).unwrap();
        assert_eq!(m.terms, ints(&[1, 1, 3, 4]));
        assert_eq!(n_from_m(&m, &theta, &policy).unwrap().terms, fib.terms);
    }

    #[test]
    fn theta_beta_conversion() {
        let policy = PrecisionPolicy::default();
        let two = RealAlgebraic::from_rational(&BigRational::from_integer(2.into()));
        let t = theta_from_beta(&two, &RealInput::integer(1), 64, &policy).unwrap();
        assert!((t.value() - std::f64::consts::LN_2).abs() < 1e-15);
        let z = theta_from_beta(&phi(), &RealInput::integer(0), 64, &policy).unwrap();
        assert_eq!(z.value(), 0.0);
        let b = RealInput::rational(37, 100);
        let t = theta_from_beta(&two, &b, 80, &policy).unwrap();
        let back = beta_from_theta(&two, &t, 80, &policy).unwrap();
        assert!((back.value() - 0.37).abs() < 1e-12);
        assert!(back.abs_error() < 1e-20);
    }

    #[test]
    fn dynamics() {
        let policy = PrecisionPolicy::default();
        let pi = std::f64::consts::PI;
        // b = (1 + pi^2) / 4 makes c = pi / 2 and alpha_0 = e^2
        let pi_ball = crate::algnum::pi(200);
        let b_ball = pi_ball.square().add_int(&1.into()).mul_pow2(-2);
        let tiny = BigRational::new(1.into(), BigInt::from(10).pow(50));
        let b_spec = RealInput::Decimal { value: b_ball.mid_ratio(), error: tiny };
        let d = dynamics_params(&RealInput::integer(0), &b_spec, &RealInput::integer(1), 64, &policy).unwrap();
        assert!((d.c.value() - pi / 2.0).abs() < 1e-14);
        assert!((d.alpha_0.value() - 2f64.exp()).abs() < 1e-12);
        assert!((d.beta_0.value() - (2f64.exp() - 1.0)).abs() < 1e-12);

        let half = RealInput::rational(1, 2);
        let d = dynamics_params(&RealInput::integer(0), &half, &RealInput::integer(0), 64, &policy).unwrap();
        assert!((d.c.value() - 0.5).abs() < 1e-15);
        assert!((d.alpha_0.value() - 535.4916555247646).abs() < 1e-9);
        assert_eq!(d.beta_0.value(), 0.0);
        let same = RealInput::rational(3, 7);
        let d = dynamics_params(&same, &RealInput::integer(5), &same, 64, &policy).unwrap();
        assert_eq!(d.beta_0.value(), 0.0);
        assert!(matches!(
            dynamics_params(&half, &RealInput::rational(1, 4), &half, 64, &policy),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn lucas_residuals() {
        let policy = PrecisionPolicy::default();
        let lucas = recurrence_sequence(&poly("x^2 - x - 1"), &ints(&[1, 3]), 200).unwrap();
        let r = residuals(&lucas, &phi(), ResidualParams::F, 60, &policy).unwrap();
        assert_eq!(r.values.len(), 199);
        let phi_f = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r.values[0].value() - (3.0 - phi_f)).abs() < 1e-15);
        let psi = 1.0 - phi_f;
        for (i, v) in r.values.iter().enumerate().take(40) {
            let k = (i + 1) as i32;
            assert!((v.value() + 5f64.sqrt() * psi.powi(k)).abs() < 1e-14);
            assert!(v.error_within_bits(60));
        }
        assert!((r.sup_abs.value() - (3.0 - phi_f)).abs() < 1e-15);
        let eta = residuals(&lucas, &phi(), ResidualParams::Eta { theta: &RealInput::integer(0) }, 60, &policy)
            .unwrap();
        assert_eq!(eta.values, r.values);
    }

    #[test]
    fn residuals_match_direct_evaluation() {
        let policy = PrecisionPolicy::default();
        let p = poly("x^3 - x - 1");
        let alpha = largest_real_root(&p).unwrap();
        let seq = recurrence_sequence(&p, &ints(&[2, 5, 3]), 3000).unwrap();
        let f = f_residuals(&seq, &alpha, 50, &policy).unwrap();
        for i in [0usize, 1, 2, 100, 2998] {
            let a = alpha.ball(seq.terms[i].bits() as u32 + 80);
            let direct = &PrecisionReal::from_int(&seq.terms[i + 1], a.bits()) - &a.mul_int(&seq.terms[i]);
            assert!(direct.overlaps(&f[i]), "k = {}", i + 1);
        }
        let twos = rounded_power_sequence(
            &RealAlgebraic::from_rational(&BigRational::from_integer(2.into())),
            &RealInput::integer(1),
            1,
            30,
            &policy,
        )
        .unwrap();
        let two = RealAlgebraic::from_rational(&BigRational::from_integer(2.into()));
        let f = f_residuals(&twos, &two, 50, &policy).unwrap();
        assert!(f.iter().all(|v| v.value() == 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let lucas = recurrence_sequence(&poly("x^2 - x - 1"), &ints(&[1, 3]), 100).unwrap();
        let mut buf = Vec::new();
        lucas.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k,term\n1,1\n2,3\n"));
        let back = IntegerSequence::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.terms, lucas.terms);
        let json = serde_json::to_string(&lucas).unwrap();
        let parsed: IntegerSequence = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, lucas);
    }
}
