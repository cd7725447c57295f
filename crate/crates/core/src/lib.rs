//! Pisot numbers, annihilated linear recurrences and the Birkhoff densities of
//! their fractional-part sequences, with certified error bounds.

pub mod algnum;
pub mod annihilate;
pub mod density;
pub mod error;
pub mod measures;
pub mod serde_big;
pub mod seqgen;

pub use error::{Error, Result};
