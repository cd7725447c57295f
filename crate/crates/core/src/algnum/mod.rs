//! Exact algebraic-number foundation.
//!
//! Integer polynomials, certified real roots, complex-root moduli, Pisot
//! classification and the fixed-point ball arithmetic that carries every
//! non-integer quantity in the crate.

mod complex;
mod input;
mod pisot;
mod poly;
mod real;
mod roots;
mod transcendental;

pub use complex::{certified_roots, conjugate_moduli, RootDisc};
pub use input::{RealInput, RealSpec};
pub use pisot::{classify_pisot, PisotReport};
pub use poly::{window_combine, IntPolynomial, SturmChain};
pub use real::PrecisionReal;
pub use roots::{isolate_real_roots, largest_real_root, parse_rational, RealAlgebraic};
pub use transcendental::{ln2, pi};

use crate::error::{Error, Result};

/// How much precision operations may use.
///
/// Working precision starts from an operation-specific estimate and doubles on
/// ambiguity until `max_bits`, after which the operation fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub max_bits: u32,
    pub guard_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { max_bits: 16384, guard_bits: 32 }
    }
}

impl PrecisionPolicy {
    pub fn with_max_bits(max_bits: u32) -> Self {
        PrecisionPolicy { max_bits, ..Self::default() }
    }

    pub fn check(&self, needed: u64) -> Result<u32> {
        if needed > u64::from(self.max_bits) {
            Err(Error::PrecisionExhausted { needed, max: self.max_bits })
        } else {
            Ok(needed as u32)
        }
    }

    /// Run `f` at increasing precision until it stops failing for precision reasons.
    pub fn escalate<T>(&self, start_bits: u64, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
        let mut bits = self.check(start_bits.max(16))?;
        loop {
            match f(bits) {
                Err(e) if e.is_precision_related() => {
                    if bits >= self.max_bits {
                        return Err(e);
                    }
                    bits = bits.saturating_mul(2).min(self.max_bits);
                }
                other => return other,
            }
        }
    }
}

/// Fraction bits needed for an absolute error of at most `target`.
pub fn bits_for_error(target: f64) -> Result<u32> {
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::InvalidInput(format!("target error must be positive, got {target}")));
    }
    Ok((-target.log2()).ceil().max(0.0) as u32 + 1)
}
