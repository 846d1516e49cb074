//! Polarized path metrics for successive-cancellation decoding of polar and
//! PAC codes: channel construction, fast list decoding over special nodes,
//! metric-based list pruning and a Monte-Carlo harness.

pub mod channel;
pub mod codes;
pub mod decode;
pub mod error;
pub mod metric;
pub mod polarize;
pub mod sim;

pub use error::{Error, Result};
