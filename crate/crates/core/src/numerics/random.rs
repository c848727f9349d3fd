//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, stream)`, so Monte Carlo
//! round `r` can use seed `base_seed + r` and draw its channel, input and noise
//! from independent sub-streams regardless of which worker thread runs it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{MrlsError, Result};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of 32-bit words consumed so far.
    pub fn word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn next_bpsk(&mut self) -> Complex64 {
        if self.rng.random::<bool>() {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    }

    /// Circularly symmetric complex Gaussian with `E|v|² = variance`.
    ///
    /// Callers must pass `variance ≥ 0`; see [`cgauss_stream`] for the checked form.
    pub fn next_cgauss(&mut self, variance: f64) -> Complex64 {
        let s = (0.5 * variance).sqrt();
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    }
}

/// `n` i.i.d. equiprobable ±1 samples.
pub fn bpsk_stream(rng: &mut RngStream, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(MrlsError::argument("bpsk_stream needs n >= 1"));
    }
    Ok((0..n).map(|_| rng.next_bpsk()).collect())
}

/// `n` circularly symmetric complex Gaussian samples of the given variance.
pub fn cgauss_stream(rng: &mut RngStream, n: usize, variance: f64) -> Result<Vec<Complex64>> {
    if !variance.is_finite() || variance < 0.0 {
        return Err(MrlsError::argument(format!(
            "variance must be finite and nonnegative, got {variance}"
        )));
    }
    Ok((0..n).map(|_| rng.next_cgauss(variance)).collect())
}
