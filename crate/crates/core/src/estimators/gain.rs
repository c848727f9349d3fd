use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::{rank1_gain_update_in_place, CMat, CVec};

/// Gain vector `k[n]`, inverse correlation matrix `P[n]` and `T[n] = 1 − kᴴx`.
///
/// These depend only on λ and the input, so one instance serves every layer.
#[derive(Debug, Clone)]
pub struct SharedGain {
    k: CVec,
    p: CMat,
    t: Complex64,
    scratch: CVec,
    updates: u64,
}

impl SharedGain {
    /// `P[−1] = δ⁻¹I`, `k[−1] = 0`.
    pub fn new(taps: usize, delta: f64) -> Self {
        SharedGain {
            k: CVec::zeros(taps),
            p: CMat::scaled_identity(taps, 1.0 / delta),
            t: Complex64::new(1.0, 0.0),
            scratch: CVec::zeros(taps),
            updates: 0,
        }
    }

    pub fn update(&mut self, x: &CVec, lambda: f64) -> Result<()> {
        self.t =
            rank1_gain_update_in_place(&mut self.p, x, lambda, &mut self.k, &mut self.scratch)?;
        self.updates += 1;
        Ok(())
    }

    pub fn k(&self) -> &CVec {
        &self.k
    }

    pub fn p(&self) -> &CMat {
        &self.p
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    /// How many times [`SharedGain::update`] has succeeded.
    pub fn update_count(&self) -> u64 {
        self.updates
    }
}
