//! Pisot classification of a real root.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::complex::certified_roots;
use super::poly::IntPolynomial;
use super::real::PrecisionReal;
use super::roots::RealAlgebraic;
use super::PrecisionPolicy;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct PisotReport {
    pub polynomial: IntPolynomial,
    pub alpha: PrecisionReal,
    pub is_algebraic_integer: bool,
    pub alpha_gt_one: bool,
    /// Moduli of the roots other than `alpha`, largest first.
    pub conjugate_moduli: Vec<PrecisionReal>,
    pub is_pisot: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Decide whether `alpha` is a Pisot number, with certified separation of every
/// conjugate modulus from 1.
pub fn classify_pisot(
    p: &IntPolynomial,
    alpha: &RealAlgebraic,
    policy: &PrecisionPolicy,
) -> Result<PisotReport> {
    if alpha.polynomial() != p {
        return Err(Error::InvalidInput(format!(
            "root is defined by {}, not {p}",
            alpha.polynomial()
        )));
    }
    let one = BigRational::one();
    let is_algebraic_integer = p.is_monic();
    let alpha_gt_one = alpha.cmp_ratio(&one, policy)? == Ordering::Greater;
    let mut target: u32 = 24;
    loop {
        let discs = match certified_roots(p, target, policy) {
            Ok(d) => d,
            Err(Error::PrecisionExhausted { .. }) if target > 24 => {
                return Err(Error::Inconclusive(
                    "a conjugate modulus cannot be separated from 1 at maximum precision".into(),
                ))
            }
            Err(e) => return Err(e),
        };
        let bits = discs[0].re.bits();
        let a = alpha.ball(bits);
        // the disc containing alpha; discs are disjoint so at most one can
        let own = discs.iter().position(|d| {
            let dx = &d.re - &a;
            let dist2 = &dx.square() + &d.im.square();
            let r = d.radius.widen_by(&a);
            (&dist2 - &r.square()).sign() != Some(Ordering::Greater)
        });
        let Some(own) = own else {
            target = target.saturating_mul(2);
            if target > policy.max_bits {
                return Err(Error::Inconclusive("cannot locate the root among its conjugates".into()));
            }
            continue;
        };
        let mut moduli: Vec<PrecisionReal> = discs
            .into_iter()
            .enumerate()
            .filter(|(i, _)| *i != own)
            .map(|(_, d)| d.modulus)
            .collect();
        moduli.sort_by(|x, y| y.value().total_cmp(&x.value()));
        let report = |is_pisot: bool, reason: Option<String>, moduli: Vec<PrecisionReal>| PisotReport {
            polynomial: p.clone(),
            alpha: a.clone(),
            is_algebraic_integer,
            alpha_gt_one,
            conjugate_moduli: moduli,
            is_pisot,
            reason,
        };
        if !is_algebraic_integer {
            return Ok(report(false, Some(format!("not an algebraic integer (leading coefficient {})", p.leading())), moduli));
        }
        if !alpha_gt_one {
            return Ok(report(false, Some("alpha is not greater than 1".into()), moduli));
        }
        let unit = PrecisionReal::from_int(&BigInt::one(), bits);
        let cmp: Vec<Option<Ordering>> = moduli.iter().map(|m| m.cmp_certified(&unit)).collect();
        if let Some(i) = cmp.iter().position(|c| matches!(c, Some(Ordering::Greater | Ordering::Equal))) {
            let reason = format!("conjugate modulus {} is at least 1", moduli[i].value());
            return Ok(report(false, Some(reason), moduli));
        }
        if cmp.iter().all(|c| *c == Some(Ordering::Less)) {
            return Ok(report(true, None, moduli));
        }
        if target >= policy.max_bits {
            return Err(Error::Inconclusive(
                "a conjugate modulus cannot be separated from 1 at maximum precision".into(),
            ));
        }
        target = target.saturating_mul(2).min(policy.max_bits);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algnum::roots::largest_real_root;

    fn classify(s: &str) -> PisotReport {
        let p: IntPolynomial = s.parse().unwrap();
        let a = largest_real_root(&p).unwrap();
        classify_pisot(&p, &a, &PrecisionPolicy::default()).unwrap()
    }

    #[test]
    fn pisot_numbers() {
        let r = classify("x^2 - x - 1");
        assert!(r.is_pisot && r.is_algebraic_integer && r.alpha_gt_one);
        assert_eq!(r.conjugate_moduli.len(), 1);
        assert!((r.conjugate_moduli[0].value() - 0.6180339887).abs() < 1e-9);
        let r = classify("x^3 - x - 1");
        assert!(r.is_pisot);
        assert_eq!(r.conjugate_moduli.len(), 2);
    }

    #[test]
    fn non_pisot_numbers() {
        let r = classify("x^2 - 2");
        assert!(!r.is_pisot && r.is_algebraic_integer && r.alpha_gt_one);
        assert!((r.conjugate_moduli[0].value() - 2f64.sqrt()).abs() < 1e-9);
        let r = classify("2x - 3");
        assert!(!r.is_pisot && !r.is_algebraic_integer);
        assert!(r.alpha.value() == 1.5);
        assert!(!classify("x^2 - 3").is_pisot);
    }

    #[test]
    fn salem_number_is_inconclusive() {
        let salem: IntPolynomial = "x^4 - x^3 - x^2 - x + 1".parse().unwrap();
        let s = largest_real_root(&salem).unwrap();
        let small = PrecisionPolicy::with_max_bits(256);
        assert!(matches!(classify_pisot(&salem, &s, &small), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn rejects_foreign_root() {
        let p: IntPolynomial = "x^2 - 2".parse().unwrap();
        let other = largest_real_root(&"x^2 - 3".parse().unwrap()).unwrap();
        assert!(classify_pisot(&p, &other, &PrecisionPolicy::default()).is_err());
    }
}
