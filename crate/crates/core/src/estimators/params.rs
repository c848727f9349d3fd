use serde::{Deserialize, Serialize};

use crate::error::{MrlsError, Result};

/// Scalar hyperparameters shared by the RLS and m-RLS estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    pub taps: usize,
    pub lambda: f64,
    pub delta: f64,
    pub z: f64,
    pub layers_max: usize,
    /// Noise power handed to the layer selector.
    pub noise_variance: f64,
}

impl FilterParams {
    /// Defaults used by the experiments: `λ = 1 − 1/(2M)`, `δ = 0.01`,
    /// `z = 2⁻⁵`, five layers.
    pub fn with_taps(taps: usize, noise_variance: f64) -> Self {
        FilterParams {
            taps,
            lambda: 1.0 - 1.0 / (2.0 * taps as f64),
            delta: 0.01,
            z: 1.0 / 32.0,
            layers_max: 5,
            noise_variance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.taps == 0 {
            return Err(MrlsError::argument("filter needs at least one tap"));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(MrlsError::argument(format!(
                "forgetting factor must lie in (0, 1], got {}",
                self.lambda
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(MrlsError::argument(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        if !(self.z > 0.0 && self.z < 1.0) {
            return Err(MrlsError::argument(format!(
                "z must lie in (0, 1), got {}",
                self.z
            )));
        }
        if self.layers_max == 0 {
            return Err(MrlsError::argument("layers_max must be >= 1"));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(MrlsError::argument(
                "noise variance must be finite and >= 0",
            ));
        }
        if !self.is_stable() {
            log::warn!(
                "forgetting factor {} outside the stable range ({}, 1)",
                self.lambda,
                1.0 - 2.0 / self.taps as f64
            );
        }
        Ok(())
    }

    /// `1 − 2/M < λ < 1`.
    pub fn is_stable(&self) -> bool {
        self.lambda < 1.0 && self.lambda > 1.0 - 2.0 / self.taps as f64
    }

    /// `ε = 1 − λ`.
    pub fn epsilon(&self) -> f64 {
        1.0 - self.lambda
    }

    /// `εM`.
    pub fn epsilon_m(&self) -> f64 {
        self.epsilon() * self.taps as f64
    }

    /// Selection offsets `r(l) = 2(1 − εM)^l σ_w²` for `l = 1..=layers_max`.
    pub fn selection_offsets(&self) -> Vec<f64> {
        let base = 1.0 - self.epsilon_m();
        (1..=self.layers_max)
            .map(|l| 2.0 * base.powi(l as i32) * self.noise_variance)
            .collect()
    }
}
