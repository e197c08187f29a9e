//! Exact simulation of the discrete Witsenhausen problem over a
//! Kochen–Specker zero-error channel, with entangled and classical
//! controllers, plus a certified exhaustive search for the classical optimum.

pub mod bounds;
pub mod certify;
pub mod cli;
pub mod entangled;
pub mod error;
pub mod exact;
pub mod ks;
pub mod report;
pub mod witsenhausen;
pub mod zero_error;

pub use error::{Error, Result};
