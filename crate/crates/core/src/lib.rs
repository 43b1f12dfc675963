//! Exact arithmetic for the reversion of `z^i < x^i + y^i` on integer
//! triplets: classification, reversion exponents, reversor intervals,
//! logarithmic bounds, the equalizing exponent, and exhaustive scans.

pub mod arith;
pub mod error;

pub use error::{Error, Result};
pub mod classify;
pub mod reversion;
pub mod logbounds;
pub mod corollary2;
pub mod scan;
