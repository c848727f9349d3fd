//! Multi-layered recursive least squares (m-RLS) for identifying rapidly
//! time-varying systems.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: complex vectors/matrices, the rank-one gain recursion and
//!   seeded random streams.
//! - [`channel`]: the AR(1) time-varying impulse response and signal model.
//! - [`estimators`]: classic RLS and the m-RLS layer stack with online layer
//!   selection.
//! - [`theory`]: closed-form MSE, ACF and coherence predictors plus
//!   brute-force oracles for them.
//! - [`harness`]: Monte Carlo experiments and CSV/JSON/SVG output.

pub mod channel;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod numerics;
pub mod theory;

pub use error::{MrlsError, Result};
