//! Computational workbench for fixed-length source coding with side
//! information over finite alphabets.
//!
//! The crate is organised bottom-up:
//!
//! * [`measures`]: finite probability tables, KL divergence, the
//!   `G` functional `Σ ν²/μ`, conditional restriction and the recursive
//!   tilting construction.
//! * [`codes`]: explicit A-codes (side information at both ends) and
//!   B-codes (side information at the decoder only), their correct sets,
//!   exact error probabilities and optimal constructions.
//! * [`multicode`]: joint miss probability of several equal-size B-codes and
//!   the smallest number of extra B-codes needed to match an A-code.
//! * [`exponents`]: reliability-function curves for i.i.d. sources and the
//!   limiting error of two-component mixtures.
//! * [`oracles`]: brute-force verifiers used to certify the optimized paths.
//!
//! All entropies, rates and divergences are in bits.

pub mod codes;
mod error;
pub mod exponents;
pub mod measures;
pub mod multicode;
pub mod oracles;
pub mod partition;
pub mod rng;

pub use codes::{ACode, BCode, Code, CodingSystemView, CorrectSet, PairAlphabet};
pub use error::{Error, Result};
pub use exponents::{ExponentCurve, SingleLetterModel};
pub use measures::{Dist, EventSet, ExtReal, TiltTrace};
pub use multicode::{KIndex, MultiCodeResult, SearchMode};
pub use oracles::{ProbeReport, ProbeVerdict};


/// Absolute tolerance used when comparing probabilities.
pub const PROB_TOL: f64 = 1e-9;
