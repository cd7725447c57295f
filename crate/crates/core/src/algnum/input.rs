//! Real-number inputs such as theta, xi and beta.
//!
//! Rationality is a property of the input, never of a floating-point value: a
//! rational is exact, an algebraic number is rational only if its polynomial has that
//! rational root, and a decimal with a declared error is taken to stand for an
//! irrational number.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::IntPolynomial;
use super::real::PrecisionReal;
use super::roots::{parse_rational, RealAlgebraic};
use super::PrecisionPolicy;
use crate::error::{Error, Result};

/// Serialized form of a [`RealInput`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealSpec {
    Rational(String),
    Algebraic { polynomial: String, interval: [String; 2] },
    Decimal { value: String, error: String },
}

#[derive(Clone, Debug)]
pub enum RealInput {
    Rational(BigRational),
    Algebraic(RealAlgebraic),
    /// `value ± error`, standing for an irrational number in that range.
    Decimal { value: BigRational, error: BigRational },
}

/// Equal when the serialized forms agree; two descriptions of one number may differ.
impl PartialEq for RealInput {
    fn eq(&self, other: &Self) -> bool {
        self.to_spec() == other.to_spec()
    }
}

impl RealInput {
    pub fn rational(num: i64, den: i64) -> Self {
        RealInput::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn integer(n: i64) -> Self {
        RealInput::Rational(BigRational::from_integer(n.into()))
    }

    /// An algebraic number; a rational root is stored as a rational.
    pub fn algebraic(root: RealAlgebraic) -> Self {
        match root.as_rational() {
            Some(q) => RealInput::Rational(q),
            None => RealInput::Algebraic(root),
        }
    }

    pub fn from_spec(spec: &RealSpec) -> Result<Self> {
        match spec {
            RealSpec::Rational(s) => Ok(RealInput::Rational(parse_rational(s)?)),
            RealSpec::Algebraic { polynomial, interval } => {
                let p: IntPolynomial = polynomial.parse()?;
                let root =
                    RealAlgebraic::new(p, parse_rational(&interval[0])?, parse_rational(&interval[1])?)?;
                Ok(Self::algebraic(root))
            }
            RealSpec::Decimal { value, error } => {
                let error = parse_rational(error)?;
                if !error.is_positive() {
                    return Err(Error::InvalidInput("decimal error must be positive".into()));
                }
                Ok(RealInput::Decimal { value: parse_rational(value)?, error })
            }
        }
    }

    pub fn to_spec(&self) -> RealSpec {
        match self {
            RealInput::Rational(q) => RealSpec::Rational(q.to_string()),
            RealInput::Algebraic(r) => {
                let (lo, hi) = r.interval();
                RealSpec::Algebraic {
                    polynomial: r.polynomial().to_string(),
                    interval: [lo.to_string(), hi.to_string()],
                }
            }
            RealInput::Decimal { value, error } => RealSpec::Decimal {
                value: decimal_string(value),
                error: decimal_string(error),
            },
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            RealInput::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, RealInput::Rational(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RealInput::Rational(q) if q.is_zero())
    }

    /// Certified comparison with a rational number.
    pub fn cmp_ratio(&self, q: &BigRational, policy: &PrecisionPolicy) -> Result<std::cmp::Ordering> {
        match self {
            RealInput::Rational(x) => Ok(x.cmp(q)),
            RealInput::Algebraic(r) => r.cmp_ratio(q, policy),
            RealInput::Decimal { .. } => self.ball(64).cmp_ratio(q).ok_or_else(|| {
                Error::DomainError(format!("{self} cannot be compared with {q} at its declared error"))
            }),
        }
    }

    /// Enclosure at `bits` fraction bits, without a precision cap.
    ///
    /// A decimal input cannot be sharper than its declared error.
    pub(crate) fn ball(&self, bits: u32) -> PrecisionReal {
        match self {
            RealInput::Rational(q) => PrecisionReal::from_ratio(q, bits),
            RealInput::Algebraic(r) => r.ball(bits),
            RealInput::Decimal { value, error } => PrecisionReal::from_ratio_with_error(value, error, bits),
        }
    }

    pub fn approx(&self, bits: u32, policy: &PrecisionPolicy) -> Result<PrecisionReal> {
        policy.check(u64::from(bits))?;
        Ok(self.ball(bits))
    }

    pub fn approx_f64(&self) -> f64 {
        match self {
            RealInput::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            _ => self.ball(64).value(),
        }
    }

    /// `{k x}` for `k = k_first, k_first + 1, ...` (`count` values), each within `2^-bits`.
    ///
    /// Rational inputs are exact up to the final rounding; others are computed from an
    /// enclosure of `x` sharp enough for the largest `|k|`, and escalate while some
    /// fractional part straddles an integer.
    pub fn frac_multiples(
        &self,
        k_first: i64,
        count: usize,
        bits: u32,
        policy: &PrecisionPolicy,
    ) -> Result<Vec<PrecisionReal>> {
        let ks = k_first..k_first + count as i64;
        if let RealInput::Rational(q) = self {
            let (n, d) = (q.numer(), q.denom());
            return Ok(ks
                .map(|k| {
                    let r = (n * BigInt::from(k)).mod_floor(d);
                    PrecisionReal::from_ratio(&BigRational::new(r, d.clone()), bits)
                })
                .collect());
        }
        let kmax = k_first.unsigned_abs().max((k_first + count as i64).unsigned_abs()).max(1);
        let extra = 64 - kmax.leading_zeros() + 4;
        policy.escalate(u64::from(bits + extra), |w| {
            let x = self.approx(w, policy)?;
            let out_bits = bits + 4;
            ks.clone()
                .map(|k| Ok(x.mul_int(&BigInt::from(k)).frac()?.rescale(out_bits.min(w))))
                .collect()
        })
    }

    /// `floor(k x)` for `k = k_first, ...` (`count` values).
    pub fn floor_multiples(&self, k_first: i64, count: usize, policy: &PrecisionPolicy) -> Result<Vec<BigInt>> {
        let ks = k_first..k_first + count as i64;
        if let RealInput::Rational(q) = self {
            let (n, d) = (q.numer(), q.denom());
            return Ok(ks.map(|k| (n * BigInt::from(k)).div_floor(d)).collect());
        }
        let kmax = k_first.unsigned_abs().max((k_first + count as i64).unsigned_abs()).max(1);
        let extra = 64 - kmax.leading_zeros() + 4;
        policy.escalate(u64::from(16 + extra), |w| {
            let x = self.approx(w, policy)?;
            ks.clone().map(|k| x.mul_int(&BigInt::from(k)).floor()).collect()
        })
    }
}

fn decimal_string(q: &BigRational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    q.to_string()
}

impl fmt::Display for RealInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealInput::Rational(q) => write!(f, "{q}"),
            RealInput::Algebraic(r) => write!(f, "{r}"),
            RealInput::Decimal { value, error } => {
                write!(f, "{} +- {}", value.to_f64().unwrap_or(f64::NAN), error.to_f64().unwrap_or(f64::NAN))
            }
        }
    }
}

impl FromStr for RealInput {
    type Err = Error;

    /// Accepts `"1/3"`, `"0.25"`, `"x^2 + 2x - 1 in [0, 1]"` and `"0.4142 +- 1e-4"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(" in ") {
            return Ok(Self::algebraic(RealAlgebraic::parse(s)?));
        }
        let split = s.split_once("+-").or_else(|| s.split_once('±'));
        if let Some((v, e)) = split {
            return Self::from_spec(&RealSpec::Decimal { value: v.trim().into(), error: e.trim().into() });
        }
        Ok(RealInput::Rational(parse_rational(s)?))
    }
}

impl Serialize for RealInput {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealInput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
            Tagged(RealSpec),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            // a JSON number is read as the exact decimal it prints as
            Raw::Number(x) => x.to_string().parse().map_err(serde::de::Error::custom),
            Raw::Tagged(spec) => RealInput::from_spec(&spec).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        let r: RealInput = "1/3".parse().unwrap();
        assert!(r.is_rational());
        let a: RealInput = "x^2 + 2x - 1 in [0, 1]".parse().unwrap();
        assert!(!a.is_rational());
        assert!((a.approx_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let d: RealInput = "0.41421356 +- 1e-8".parse().unwrap();
        assert!(!d.is_rational());
        // an algebraic input with a rational root is rational
        let q: RealInput = "2x^2 - x in [1/4, 1]".parse().unwrap();
        assert_eq!(q.as_rational(), Some(&BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn serde_round_trip() {
        for s in ["2/7", "x^2 + 2x - 2 in [0, 1]", "0.25 +- 1/1000"] {
            let r: RealInput = s.parse().unwrap();
            let j = serde_json::to_string(&r).unwrap();
            let back: RealInput = serde_json::from_str(&j).unwrap();
            assert_eq!(back.to_spec(), r.to_spec(), "{j}");
        }
        let from_text: RealInput = serde_json::from_str("\"1/3\"").unwrap();
        assert!(from_text.is_rational());
        let from_num: RealInput = serde_json::from_str("0.37").unwrap();
        assert_eq!(from_num.as_rational(), Some(&BigRational::new(37.into(), 100.into())));
    }

    #[test]
    fn fractional_multiples() {
        let policy = PrecisionPolicy::default();
        let third = RealInput::rational(1, 3);
        let f = third.frac_multiples(1, 3, 40, &policy).unwrap();
        let v: Vec<f64> = f.iter().map(|x| x.value()).collect();
        assert!((v[0] - 1.0 / 3.0).abs() < 1e-12 && (v[1] - 2.0 / 3.0).abs() < 1e-12 && v[2] == 0.0);
        let neg = RealInput::rational(-1, 4).frac_multiples(1, 1, 20, &policy).unwrap();
        assert_eq!(neg[0].value(), 0.75);
        let t: RealInput = "x^2 + 2x - 1 in [0, 1]".parse().unwrap();
        let g = t.frac_multiples(1, 1000, 50, &policy).unwrap();
        let s = 2f64.sqrt() - 1.0;
        for (i, x) in g.iter().enumerate() {
            let k = (i + 1) as f64;
            assert!(((k * s).fract() - x.value()).abs() < 1e-9);
            assert!(x.error_within_bits(50));
        }
        let fl = t.floor_multiples(1, 4, &policy).unwrap();
        assert_eq!(fl, vec![0.into(), 0.into(), 1.into(), 1.into()]);
    }
}
