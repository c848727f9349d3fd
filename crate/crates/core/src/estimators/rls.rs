use num_complex::Complex64;

use super::{FilterParams, SharedGain};
use crate::error::{MrlsError, Result};
use crate::numerics::{herm_dot_unchecked, CVec};

/// Classic exponentially weighted RLS identifier.
#[derive(Debug, Clone)]
pub struct RlsEstimator {
    lambda: f64,
    gain: SharedGain,
    h_hat: CVec,
}

impl RlsEstimator {
    pub fn new(params: &FilterParams) -> Result<Self> {
        params.validate()?;
        Ok(RlsEstimator {
            lambda: params.lambda,
            gain: SharedGain::new(params.taps, params.delta),
            h_hat: CVec::zeros(params.taps),
        })
    }

    /// Consumes one `(x[n], d[n])` pair and returns the a priori error
    /// `e[n] = d[n] − ĥᴴ[n−1]x[n]`.
    pub fn step(&mut self, x: &CVec, d: Complex64) -> Result<Complex64> {
        if x.len() != self.h_hat.len() {
            return Err(MrlsError::Dimension {
                expected: self.h_hat.len(),
                found: x.len(),
            });
        }
        let e = d - herm_dot_unchecked(self.h_hat.as_slice(), x.as_slice());
        self.gain.update(x, self.lambda)?;
        self.h_hat.axpy(e.conj(), self.gain.k());
        Ok(e)
    }

    pub fn estimate(&self) -> &CVec {
        &self.h_hat
    }

    pub fn gain(&self) -> &SharedGain {
        &self.gain
    }
}
