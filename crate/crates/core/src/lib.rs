//! Parametric amplification of photons in a cavity split by a moving semi-transparent wall.
//!
//! Lengths are metres and frequencies inverse metres throughout; see [`units`] for SI.

pub mod cavity;
pub mod detuning;
pub mod effective;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod lindblad;
pub mod par;
pub mod propagator;
pub mod quad;
pub mod response;
pub mod special;
pub mod units;

pub use error::{Error, Result};
