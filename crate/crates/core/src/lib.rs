//! GHZ-based quantum secret sharing: an exact state-vector simulator, the
//! n-party sharing protocol, the intercept-entangle attack and the
//! biseparability-witness security check that detects it.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod error;
pub mod protocol;
pub mod quantum;
pub mod witness;

pub use error::{QssError, Result};
