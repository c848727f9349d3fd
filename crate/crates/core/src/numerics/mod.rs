//! Complex linear algebra and random streams shared by the rest of the crate.

mod linalg;
mod random;

pub use linalg::{herm_dot, rank1_gain_update, CMat, CVec, ComplexSample, GainUpdate};
pub(crate) use linalg::{herm_dot_unchecked, rank1_gain_update_in_place};
pub use random::{bpsk_stream, cgauss_stream, RngStream};
