//! Annihilating a sequence by the minimal polynomial of `alpha`.
//!
//! With `p(x) = sum_s a_s x^s`, the window `sum_s a_s x_{k+s}` turns `m_k` into the
//! integers `e_k`, `eta_k` into `eta~_k = e_{k+1} - alpha e_k + c_k`, and
//! `gamma_k = xi alpha^k - k theta` into a polynomial in `k`. The values `c_k` are
//! `g({k theta})` for one piecewise-linear `g`.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algnum::{window_combine, IntPolynomial, PrecisionPolicy, PrecisionReal, RealAlgebraic, RealInput, RealSpec};
use crate::error::{Error, Result};
use crate::seqgen::{self, IntegerSequence};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnihilatedSequence {
    pub start_index: i64,
    #[serde(with = "crate::serde_big")]
    pub e_terms: Vec<BigInt>,
    /// Sorted distinct values of `e_terms`.
    #[serde(with = "crate::serde_big")]
    pub value_set: Vec<BigInt>,
    pub window_poly: IntPolynomial,
}

impl AnnihilatedSequence {
    pub fn is_identically_zero(&self) -> bool {
        self.e_terms.iter().all(Zero::is_zero)
    }

    pub fn sup_abs(&self) -> BigInt {
        self.e_terms.iter().map(|e| e.abs()).max().unwrap_or_default()
    }
}

/// `e_k = sum_s a_s m_{k+s}`, exactly.
pub fn e_sequence(m: &IntegerSequence, p: &IntPolynomial) -> Result<AnnihilatedSequence> {
    let d = p.degree();
    if m.len() < d + 1 {
        return Err(Error::InsufficientData(format!("{} terms cannot fill a window of {}", m.len(), d + 1)));
    }
    let e_terms = window_combine(&m.terms, p.coeffs());
    let mut value_set = e_terms.clone();
    value_set.sort();
    value_set.dedup();
    Ok(AnnihilatedSequence { start_index: m.start_index, e_terms, value_set, window_poly: p.clone() })
}

/// The bound `|e_k| <= sum_{s=1}^d sum_{t<s} |a_s| alpha^t B` for `|f_k| <= B`.
pub fn e_bound(p: &IntPolynomial, alpha: &RealAlgebraic, f_sup: &PrecisionReal) -> PrecisionReal {
    let bits = f_sup.bits().max(64);
    let a = alpha.ball(bits);
    let mut total = PrecisionReal::zero(bits);
    let mut geometric = PrecisionReal::zero(bits);
    let mut power = PrecisionReal::from_i64(1, bits);
    for coeff in &p.coeffs()[1..] {
        // geometric = sum_{t<s} alpha^t
        geometric = &geometric + &power;
        power = &power * &a;
        total = &total + &geometric.mul_int(&coeff.abs());
    }
    &total * f_sup
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CombinedKind {
    Eta,
    TildeEta,
    C,
    Gamma,
    TildeGamma,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleParams {
    pub polynomial: IntPolynomial,
    pub alpha: RealSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<RealSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<RealSpec>,
}

impl SampleParams {
    fn new(alpha: &RealAlgebraic, theta: Option<&RealInput>, xi: Option<&RealInput>) -> Self {
        let (lo, hi) = alpha.interval();
        SampleParams {
            polynomial: alpha.polynomial().clone(),
            alpha: RealSpec::Algebraic {
                polynomial: alpha.polynomial().to_string(),
                interval: [lo.to_string(), hi.to_string()],
            },
            theta: theta.map(RealInput::to_spec),
            xi: xi.map(RealInput::to_spec),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinedSample {
    pub kind: CombinedKind,
    pub start_index: i64,
    pub values: Vec<PrecisionReal>,
    pub params: SampleParams,
}

impl CombinedSample {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs_error(&self) -> f64 {
        self.values.iter().map(PrecisionReal::abs_error).fold(0.0, f64::max)
    }

    /// CSV with header `k,value,abs_error`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["k", "value", "abs_error"])?;
        for (i, v) in self.values.iter().enumerate() {
            let k = self.start_index + i as i64;
            out.write_record([k.to_string(), format!("{:e}", v.value()), format!("{:e}", v.abs_error())])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn exact_coeffs(p: &IntPolynomial, bits: u32) -> Vec<PrecisionReal> {
    p.coeffs().iter().map(|a| PrecisionReal::from_int(a, bits)).collect()
}

/// `eta_k = m_{k+1} - alpha m_k + {(k+1) theta} - alpha {k theta}`, each within `2^-bits`.
pub fn eta_sequence(
    m: &IntegerSequence,
    alpha: &RealAlgebraic,
    theta: &RealInput,
    bits: u32,
    policy: &PrecisionPolicy,
) -> Result<CombinedSample> {
    Ok(CombinedSample {
        kind: CombinedKind::Eta,
        start_index: m.start_index,
        values: seqgen::eta_values(m, alpha, theta, bits, policy)?,
        params: SampleParams::new(alpha, Some(theta), None),
    })
}

/// `eta~_k = sum_s a_s eta_{k+s}`.
pub fn tilde_eta(eta: &CombinedSample, p: &IntPolynomial) -> Result<CombinedSample> {
    if eta.kind != CombinedKind::Eta {
        return Err(Error::InvalidInput("tilde_eta expects an eta sample".into()));
    }
    Ok(windowed(eta, p, CombinedKind::TildeEta))
}

fn windowed(sample: &CombinedSample, p: &IntPolynomial, kind: CombinedKind) -> CombinedSample {
    let bits = sample.values.first().map_or(64, PrecisionReal::bits);
    CombinedSample {
        kind,
        start_index: sample.start_index,
        values: window_combine(&sample.values, &exact_coeffs(p, bits)),
        params: sample.params.clone(),
    }
}

/// Coefficients `w_s` of `{(k+s) theta}`, `s = 0 ..= d+1`, in `c_k`:
/// `w_0 = -alpha a_0`, `w_s = a_{s-1} - alpha a_s`, `w_{d+1} = a_d`.
pub(crate) fn c_weights(p: &IntPolynomial, alpha: &PrecisionReal) -> Vec<PrecisionReal> {
    let a = p.coeffs();
    let d = p.degree();
    let bits = alpha.bits();
    let mut w = Vec::with_capacity(d + 2);
    w.push(-alpha.mul_int(&a[0]));
    for s in 1..=d {
        w.push(&PrecisionReal::from_int(&a[s - 1], bits) - &alpha.mul_int(&a[s]));
    }
    w.push(PrecisionReal::from_int(&a[d], bits));
    w
}

/// `c_k` for `k = k_first .. k_first + count`, each within `2^-bits`.
pub fn c_direct_range(
    k_first: i64,
    count: usize,
    p: &IntPolynomial,
    alpha: &RealAlgebraic,
    theta: &RealInput,
    bits: u32,
    policy: &PrecisionPolicy,
) -> Result<Vec<PrecisionReal>> {
    check_root(p, alpha)?;
    let d = p.degree();
    let coeff_bits = p.coeffs().iter().map(|c| c.bits()).max().unwrap_or(1) as u32;
    let w = bits + coeff_bits + 2 * (d as u32) + 8;
    let fr = theta.frac_multiples(k_first, count + d + 1, w, policy)?;
    let weights = c_weights(p, &alpha.refine_bits(w + 4, policy)?);
    Ok(window_combine(&fr, &weights).into_iter().map(|c| c.rescale(bits + 4)).collect())
}

/// `c_k = a_d {(k+d+1) theta} + sum_{s=1}^d (a_{s-1} - alpha a_s) {(k+s) theta} - alpha a_0 {k theta}`.
pub fn c_direct(
    k: i64,
    p: &IntPolynomial,
    alpha: &RealAlgebraic,
    theta: &RealInput,
    bits: u32,
    policy: &PrecisionPolicy,
) -> Result<PrecisionReal> {
    Ok(c_direct_range(k, 1, p, alpha, theta, bits, policy)?.remove(0))
}

/// `c_k = eta~_k - (e_{k+1} - alpha e_k)`.
pub fn c_via_identity(
    tilde: &CombinedSample,
    e: &AnnihilatedSequence,
    alpha: &RealAlgebraic,
) -> Result<CombinedSample> {
    if tilde.kind != CombinedKind::TildeEta {
        return Err(Error::InvalidInput("c_via_identity expects an eta~ sample".into()));
    }
    if tilde.start_index != e.start_index {
        return Err(Error::InvalidInput("eta~ and e start at different indices".into()));
    }
    let n = tilde.len().min(e.e_terms.len().saturating_sub(1));
    let bits = tilde.values.first().map_or(64, PrecisionReal::bits);
    let a = alpha.ball(bits + 8);
    let values = (0..n)
        .map(|i| {
            let shift = &PrecisionReal::from_int(&e.e_terms[i + 1], bits) - &a.mul_int(&e.e_terms[i]);
            (&tilde.values[i] - &shift).rescale(bits)
        })
        .collect();
    Ok(CombinedSample { kind: CombinedKind::C, start_index: tilde.start_index, values, params: tilde.params.clone() })
}

/// `g(x) = a_d {x+(d+1)theta} + sum_{s=1}^d (a_{s-1} - alpha a_s) {x+s theta} - alpha a_0 x`.
///
/// `x` must lie in `[0, 1)`; near a breakpoint, where some `x + s theta` is within the
/// enclosure of an integer, the result is `BoundaryAmbiguous`.
pub fn g_eval(
    x: &PrecisionReal,
    p: &IntPolynomial,
    alpha: &RealAlgebraic,
    theta: &RealInput,
    policy: &PrecisionPolicy,
) -> Result<PrecisionReal> {
    check_root(p, alpha)?;
    let bits = x.bits().max(16);
    if x.lower() < 0.0 || x.upper() >= 1.0 {
        return Err(Error::OutOfRange(format!("g is defined on [0, 1), got {x}")));
    }
    let t = theta.approx(bits + 8, policy)?;
    let weights = c_weights(p, &alpha.refine_bits(bits + 8, policy)?);
    let x = x.rescale(bits + 8);
    let mut acc = &weights[0] * &x;
    for (s, w) in weights.iter().enumerate().skip(1) {
        let arg = &x + &t.mul_int(&BigInt::from(s));
        acc = &acc + &(w * &arg.frac()?);
    }
    Ok(acc.rescale(bits))
}

/// `gamma_k = xi alpha^k - k theta` for `k = k_min ..= k_max`, each within `2^-bits`.
pub fn gamma(
    xi: &RealInput,
    alpha: &RealAlgebraic,
    theta: &RealInput,
    k_min: u64,
    k_max: u64,
    bits: u32,
    policy: &PrecisionPolicy,
) -> Result<CombinedSample> {
    if xi.is_zero() {
        return Err(Error::InvalidInput("xi must be nonzero".into()));
    }
    if k_min > k_max {
        return Err(Error::InvalidInput(format!("empty range {k_min}..={k_max}")));
    }
    let w = bits + 8;
    let growth = (k_max as f64 * alpha.log2_upper()).ceil() as u64;
    let xi_log = xi.approx_f64().abs().max(1.0).log2().ceil() as u32;
    let k_log = 64 - k_max.leading_zeros();
    let x = xi.approx(policy.check(growth + u64::from(w) + 8)?, policy)?;
    let t = theta.approx(w + k_log + 4, policy)?;
    let powers = alpha.powers_bits(k_min, k_max, w + xi_log + 2, policy)?;
    let values = powers
        .iter()
        .zip(k_min..)
        .map(|(pk, k)| (&(&x * pk) - &t.mul_int(&BigInt::from(k))).rescale(w))
        .collect();
    Ok(CombinedSample {
        kind: CombinedKind::Gamma,
        start_index: k_min as i64,
        values,
        params: SampleParams::new(alpha, Some(theta), Some(xi)),
    })
}

/// `gamma~_k = sum_s a_s gamma_{k+s}`.
pub fn tilde_gamma(gamma: &CombinedSample, p: &IntPolynomial) -> Result<CombinedSample> {
    if gamma.kind != CombinedKind::Gamma {
        return Err(Error::InvalidInput("tilde_gamma expects a gamma sample".into()));
    }
    Ok(windowed(gamma, p, CombinedKind::TildeGamma))
}

/// `-theta sum_s a_s (k+s) = -theta (p(1) k + p'(1))`.
pub fn tilde_gamma_closed(
    k: i64,
    p: &IntPolynomial,
    theta: &RealInput,
    bits: u32,
    policy: &PrecisionPolicy,
) -> Result<PrecisionReal> {
    let factor = p.evaluate_at_one() * BigInt::from(k) + p.derivative_at_one();
    let extra = factor.bits() as u32 + 2;
    Ok((-theta.approx(bits + extra, policy)?.mul_int(&factor)).rescale(bits + 2))
}

fn check_root(p: &IntPolynomial, alpha: &RealAlgebraic) -> Result<()> {
    if alpha.polynomial() != p {
        return Err(Error::InvalidInput(format!("alpha is a root of {}, not {p}", alpha.polynomial())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algnum::largest_real_root;
    use crate::seqgen::recurrence_sequence;
    use num_rational::BigRational;

    fn poly(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    fn phi() -> RealAlgebraic {
        largest_real_root(&poly("x^2 - x - 1")).unwrap()
    }

    fn two() -> RealAlgebraic {
        RealAlgebraic::from_rational(&BigRational::from_integer(2.into()))
    }

    fn lucas(n: usize) -> IntegerSequence {
        recurrence_sequence(&poly("x^2 - x - 1"), &[1.into(), 3.into()], n).unwrap()
    }

    const PHI: f64 = 1.618033988749895;

    #[test]
    fn annihilation() {
        let p = poly("x^2 - x - 1");
        let fib = recurrence_sequence(&p, &[1.into(), 1.into()], 50).unwrap();
        let e = e_sequence(&fib, &p).unwrap();
        assert!(e.is_identically_zero());
        assert_eq!(e.e_terms.len(), 48);
        let l = lucas(40);
        let perturbed = IntegerSequence::new(
            1,
            l.terms.iter().enumerate().map(|(i, t)| t + if i % 2 == 0 { -1 } else { 1 }).collect(),
            l.spec.clone(),
        )
        .unwrap();
        let e = e_sequence(&perturbed, &p).unwrap();
        assert_eq!(e.value_set, vec![BigInt::from(-1), BigInt::from(1)]);
        assert_eq!(e.e_terms[0], BigInt::from(-1));
        let ks = IntegerSequence::from_i64s(1, &[1, 2, 3, 4, 5]).unwrap();
        let e = e_sequence(&ks, &p).unwrap();
        assert_eq!(e.e_terms, vec![0.into(), BigInt::from(-1), BigInt::from(-2)]);
    }

    #[test]
    fn eta_cycles() {
        let policy = PrecisionPolicy::default();
        let eta = eta_sequence(&lucas(60), &phi(), &RealInput::rational(1, 3), 60, &policy).unwrap();
        let want = [1.0 / 3.0, 2.0 / 3.0 - PHI / 3.0, -2.0 * PHI / 3.0];
        for (i, v) in eta.values.iter().enumerate().skip(40) {
            let k = i + 1;
            assert!((v.value() - want[k % 3]).abs() < 1e-8, "k = {k}");
        }
        let powers: Vec<i64> = (1..=20).map(|k| 1i64 << k).collect();
        let m = IntegerSequence::from_i64s(1, &powers).unwrap();
        let eta = eta_sequence(&m, &two(), &RealInput::rational(1, 2), 40, &policy).unwrap();
        for (i, v) in eta.values.iter().enumerate() {
            let k = i + 1;
            assert_eq!(v.value(), if k % 2 == 0 { 0.5 } else { -1.0 });
        }
        let tilde = tilde_eta(&eta, &poly("x - 2")).unwrap();
        assert_eq!(tilde.values[0].value(), 2.5);
        assert_eq!(tilde.values[1].value(), -2.0);
    }

    #[test]
    fn tilde_eta_of_lucas_vanishes() {
        let policy = PrecisionPolicy::default();
        let p = poly("x^2 - x - 1");
        let eta = eta_sequence(&lucas(80), &phi(), &RealInput::integer(0), 60, &policy).unwrap();
        let tilde = tilde_eta(&eta, &p).unwrap();
        assert!(tilde.values.iter().all(|v| v.value().abs() < 1e-15));
        assert_eq!(tilde.len(), eta.len() - 2);
    }

    #[test]
    fn c_values() {
        let policy = PrecisionPolicy::default();
        let p = poly("x^2 - x - 1");
        let c = c_direct(1, &p, &phi(), &RealInput::rational(1, 2), 60, &policy).unwrap();
        assert!((c.value() + 0.5).abs() < 1e-15);
        let zero = c_direct_range(1, 30, &p, &phi(), &RealInput::integer(0), 60, &policy).unwrap();
        assert!(zero.iter().all(|v| v.value() == 0.0));
    }

    #[test]
    fn identities() {
        let policy = PrecisionPolicy::default();
        let p = poly("x^2 - x - 1");
        let theta: RealInput = "x^2 + 2x - 1 in [0, 1]".parse().unwrap();
        let m = lucas(300);
        let eta = eta_sequence(&m, &phi(), &theta, 60, &policy).unwrap();
        let tilde = tilde_eta(&eta, &p).unwrap();
        let e = e_sequence(&m, &p).unwrap();
        let via = c_via_identity(&tilde, &e, &phi()).unwrap();
        let direct = c_direct_range(1, via.len(), &p, &phi(), &theta, 60, &policy).unwrap();
        let fr = theta.frac_multiples(1, via.len(), 60, &policy).unwrap();
        for i in 0..via.len() {
            assert!(via.values[i].overlaps(&direct[i]), "k = {}", i + 1);
            let g = g_eval(&fr[i], &p, &phi(), &theta, &policy).unwrap();
            assert!(g.overlaps(&direct[i]), "k = {}", i + 1);
        }
    }

    #[test]
    fn perturbed_lucas_identity() {
        let policy = PrecisionPolicy::default();
        let p = poly("x^2 - x - 1");
        let l = lucas(50);
        let terms = l.terms.iter().enumerate().map(|(i, t)| t + if i % 2 == 0 { -1 } else { 1 }).collect();
        let m = IntegerSequence::new(1, terms, l.spec.clone()).unwrap();
        let eta = eta_sequence(&m, &phi(), &RealInput::integer(0), 60, &policy).unwrap();
        let tilde = tilde_eta(&eta, &p).unwrap();
        let c = c_via_identity(&tilde, &e_sequence(&m, &p).unwrap(), &phi()).unwrap();
        assert!(c.values.iter().all(|v| v.value().abs() < 1e-15));
        for (i, v) in tilde.values.iter().enumerate() {
            let sign = if (i + 1) % 2 == 0 { -1.0 } else { 1.0 };
            assert!((v.value() - sign * (1.0 + PHI)).abs() < 1e-12);
        }
    }

    #[test]
    fn g_is_affine_in_theta_zero() {
        let policy = PrecisionPolicy::default();
        let p = poly("x^3 - x - 1");
        let alpha = largest_real_root(&p).unwrap();
        let x = PrecisionReal::from_ratio(&BigRational::new(3.into(), 10.into()), 60);
        let g = g_eval(&x, &p, &alpha, &RealInput::integer(0), &policy);
        // every {x + s theta} = x, so g(x) = x (1 - alpha) p(1)
        let slope = alpha.approx_f64() - 1.0;
        assert!((g.unwrap().value() - 0.3 * slope).abs() < 1e-14);
        assert!(g_eval(&PrecisionReal::from_i64(1, 10), &p, &alpha, &RealInput::integer(0), &policy).is_err());
    }

    #[test]
    fn gamma_cancellation() {
        let policy = PrecisionPolicy::default();
        let p = poly("x^2 - x - 1");
        let one = RealInput::integer(1);
        let g = gamma(&one, &phi(), &RealInput::integer(1), 1, 60, 50, &policy).unwrap();
        let t = tilde_gamma(&g, &p).unwrap();
        for (i, v) in t.values.iter().enumerate() {
            let k = (i + 1) as f64;
            assert!((v.value() - (k - 1.0)).abs() < 1e-12);
            let closed = tilde_gamma_closed(i as i64 + 1, &p, &RealInput::integer(1), 50, &policy).unwrap();
            assert!(closed.overlaps(v));
        }
        let z = tilde_gamma(&gamma(&one, &phi(), &RealInput::integer(0), 1, 30, 50, &policy).unwrap(), &p).unwrap();
        assert!(z.values.iter().all(|v| v.value().abs() < 1e-14));
    }

    #[test]
    fn lemma_bound_holds() {
        let policy = PrecisionPolicy::default();
        let p = poly("x^2 - x - 1");
        let l = lucas(60);
        let terms: Vec<BigInt> = l.terms.iter().enumerate().map(|(i, t)| t + (i % 3) as i64).collect();
        let m = IntegerSequence::new(1, terms, l.spec.clone()).unwrap();
        let f = seqgen::residuals(&m, &phi(), seqgen::ResidualParams::F, 40, &policy).unwrap();
        let bound = e_bound(&p, &phi(), &f.sup_abs);
        let e = e_sequence(&m, &p).unwrap();
        assert!(e.sup_abs().to_string().parse::<f64>().unwrap() <= bound.upper());
        assert!(e.sup_abs() > BigInt::zero());
    }

    #[test]
    fn csv_dump() {
        let policy = PrecisionPolicy::default();
        let eta = eta_sequence(&lucas(5), &phi(), &RealInput::integer(0), 40, &policy).unwrap();
        let mut buf = Vec::new();
        eta.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,value,abs_error\n1,"));
        assert_eq!(text.lines().count(), 5);
    }
}
