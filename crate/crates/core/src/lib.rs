//! Asynchronous measurement-device-independent quantum digital signatures.
//!
//! The classical messaging stage (one-time LFSR-Toeplitz hashing with XOR key
//! shares) is executable; the quantum distribution stage is simulated through
//! an analytic finite-key model, with an MDI-QDS baseline for comparison.

pub mod baseline;
pub mod error;
pub mod finitekey;
pub mod gf2;
pub mod messaging;
pub mod optimize;
pub mod otuh;
pub mod photonics;
pub mod sweep;

pub use error::{Error, Result};
