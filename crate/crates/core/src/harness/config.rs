use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSpec, InputKind};
use crate::error::{MrlsError, Result};
use crate::estimators::FilterParams;

/// Default exponential PDP decay per tap.
pub const DEFAULT_PDP_DECAY: f64 = 0.1;

/// Everything needed to reproduce one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub channel: ChannelSpec,
    pub filter: FilterParams,
    pub n_samples: usize,
    pub rounds: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub snr_db_list: Vec<f64>,
    /// `u` in `(1 + u·randn)σ_w²`, the noise power handed to the estimator.
    #[serde(default)]
    pub noise_uncertainty: f64,
    #[serde(default)]
    pub record_effective_irs: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

/// `σ_w² = 10^(−SNR/10)` for a unit-power impulse response.
pub fn noise_variance_for_snr(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

impl RunConfig {
    /// M = 50, N = 200, SNR 20 dB, `λ = 1 − 1/(2M)`, five layers, `z = 2⁻⁵`,
    /// 3000 samples, 200 rounds.
    pub fn standard() -> Self {
        let taps = 50;
        let noise = noise_variance_for_snr(20.0);
        RunConfig {
            channel: ChannelSpec::new(taps, 200.0, DEFAULT_PDP_DECAY, noise)
                .expect("default channel is valid"),
            filter: FilterParams::with_taps(taps, noise),
            n_samples: 3000,
            rounds: 200,
            base_seed: 1,
            snr_db_list: Vec::new(),
            noise_uncertainty: 0.0,
            record_effective_irs: false,
            output_dir: None,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| MrlsError::io(path, e))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| MrlsError::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(MrlsError::argument("rounds must be >= 1"));
        }
        if self.n_samples == 0 {
            return Err(MrlsError::argument("n_samples must be >= 1"));
        }
        self.channel.validate()?;
        self.filter.validate()?;
        if self.channel.taps != self.filter.taps {
            return Err(MrlsError::Config(format!(
                "channel has {} taps but the filter has {}",
                self.channel.taps, self.filter.taps
            )));
        }
        if !(self.noise_uncertainty >= 0.0 && self.noise_uncertainty.is_finite()) {
            return Err(MrlsError::argument("noise uncertainty must be >= 0"));
        }
        if self.snr_db_list.iter().any(|s| !s.is_finite()) {
            return Err(MrlsError::argument("SNR values must be finite"));
        }
        Ok(())
    }

    /// Sets the true and the assumed noise power from an SNR in dB.
    pub fn set_snr_db(&mut self, snr_db: f64) {
        let noise = noise_variance_for_snr(snr_db);
        self.channel.noise_variance = noise;
        self.filter.noise_variance = noise;
    }

    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.set_snr_db(snr_db);
        self
    }

    pub fn snr_db(&self) -> f64 {
        -10.0 * self.channel.noise_variance.log10()
    }

    /// Changes the tap count, resetting the PDP to the default shape and the
    /// forgetting factor to `1 − 1/(2M)`.
    pub fn set_taps(&mut self, taps: usize) -> Result<()> {
        self.channel.pdp = crate::channel::default_pdp(taps, DEFAULT_PDP_DECAY)?;
        self.channel.taps = taps;
        self.filter.taps = taps;
        self.filter.lambda = 1.0 - 1.0 / (2.0 * taps as f64);
        Ok(())
    }

    pub fn set_input(&mut self, input: InputKind) {
        self.channel.input = input;
    }

    /// First sample of the steady-state window: the final sixth of the run.
    pub fn steady_start(&self) -> usize {
        self.n_samples - self.n_samples / 6
    }

    pub fn round_seed(&self, round: usize) -> u64 {
        self.base_seed.wrapping_add(round as u64)
    }
}
