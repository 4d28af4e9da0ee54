//! Verification decoding of sparse (j,k)-regular graph codes for compressed
//! sensing, with density evolution, high-rate threshold constants, stopping
//! set exponents and a Monte Carlo harness.

pub mod de;
pub mod decode;
pub mod error;
pub mod graph;
pub mod harness;
pub mod numeric;
pub mod rng;
pub mod signal;
pub mod stopping;
pub mod thresholds;

pub use error::{Error, Result};
