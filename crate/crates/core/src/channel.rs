//! Time-varying unknown system: per-tap AR(1) impulse response, input and
//! noise streams, and the desired signal `d[n] = hᴴ[n]x[n] + w[n]`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MrlsError, Result};
use crate::numerics::{herm_dot, herm_dot_unchecked, CVec, RngStream};

/// Sub-stream ids inside one Monte Carlo round.
const STREAM_TAPS: u64 = 0;
const STREAM_INPUT: u64 = 1;
const STREAM_NOISE: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    #[default]
    Bpsk,
    Gauss,
}

/// Impulsive change: at sample `time` every tap is multiplied by `gain`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Impulse {
    pub time: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub taps: usize,
    /// Coherence length in samples. `f64::INFINITY` freezes the channel.
    pub coherence: f64,
    pub pdp: Vec<f64>,
    #[serde(default)]
    pub input: InputKind,
    #[serde(default)]
    pub impulse: Option<Impulse>,
    pub noise_variance: f64,
}

impl ChannelSpec {
    /// Spec with the default exponential PDP.
    pub fn new(taps: usize, coherence: f64, pdp_decay: f64, noise_variance: f64) -> Result<Self> {
        let spec = ChannelSpec {
            taps,
            coherence,
            pdp: default_pdp(taps, pdp_decay)?,
            input: InputKind::Bpsk,
            impulse: None,
            noise_variance,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.taps == 0 {
            return Err(MrlsError::argument("channel needs at least one tap"));
        }
        if self.pdp.len() != self.taps {
            return Err(MrlsError::Dimension {
                expected: self.taps,
                found: self.pdp.len(),
            });
        }
        if self.pdp.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(MrlsError::argument(
                "PDP weights must be finite and nonnegative",
            ));
        }
        let sum: f64 = self.pdp.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(MrlsError::argument(format!("PDP must sum to 1, got {sum}")));
        }
        if self.coherence.is_nan() || self.coherence < 1.0 {
            return Err(MrlsError::argument(format!(
                "coherence length must be >= 1, got {}",
                self.coherence
            )));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(MrlsError::argument(
                "noise variance must be finite and >= 0",
            ));
        }
        Ok(())
    }

    /// AR(1) pole `a = 2^(−1/N)`, giving `φ[m] = 2^(−m/N)`.
    pub fn ar_coeff(&self) -> f64 {
        ar_coeff(self.coherence)
    }
}

pub fn ar_coeff(coherence: f64) -> f64 {
    (-1.0 / coherence).exp2()
}

/// `pᵢ ∝ exp(−decay·i)` normalized to unit sum.
pub fn default_pdp(taps: usize, decay: f64) -> Result<Vec<f64>> {
    if taps == 0 {
        return Err(MrlsError::argument("PDP needs at least one tap"));
    }
    if !(decay >= 0.0 && decay.is_finite()) {
        return Err(MrlsError::argument(format!(
            "PDP decay must be >= 0, got {decay}"
        )));
    }
    let raw: Vec<f64> = (0..taps).map(|i| (-decay * i as f64).exp()).collect();
    Ok(normalize(raw))
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let sum: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= sum;
    }
    w
}

/// Reads a PDP file: one nonnegative weight per line. Blank lines and lines
/// starting with `#` are skipped. The weights are renormalized to unit sum.
pub fn load_pdp(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| MrlsError::io(path, e))?;
    parse_pdp(&text).map_err(|e| match e {
        MrlsError::Config(msg) => MrlsError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_pdp(text: &str) -> Result<Vec<f64>> {
    let mut weights = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            MrlsError::Config(format!("line {}: not a number: {line:?}", lineno + 1))
        })?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(MrlsError::Config(format!(
                "line {}: weight must be finite and nonnegative",
                lineno + 1
            )));
        }
        weights.push(v);
    }
    if weights.is_empty() {
        return Err(MrlsError::Config("PDP file has no weights".into()));
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return Err(MrlsError::Config("PDP weights sum to zero".into()));
    }
    if (sum - 1.0).abs() > 1e-6 {
        log::warn!("PDP weights sum to {sum}; renormalizing");
    }
    Ok(normalize(weights))
}

/// True impulse response and its per-tap AR(1) innovation sources.
#[derive(Debug, Clone)]
pub struct ChannelState {
    taps: CVec,
    ar_coeff: f64,
    innovation_std: Vec<f64>,
    impulse: Option<Impulse>,
    rng: RngStream,
}

impl ChannelState {
    /// Draws `h[−1]` from the stationary distribution `hᵢ ~ CN(0, pᵢ)`.
    pub fn new(spec: &ChannelSpec, mut rng: RngStream) -> Result<Self> {
        spec.validate()?;
        let a = spec.ar_coeff();
        let taps = spec.pdp.iter().map(|&p| rng.next_cgauss(p)).collect();
        let innovation_std = spec
            .pdp
            .iter()
            .map(|&p| (p * (1.0 - a * a)).sqrt())
            .collect();
        Ok(ChannelState {
            taps,
            ar_coeff: a,
            innovation_std,
            impulse: spec.impulse,
            rng,
        })
    }

    pub fn ar_coeff(&self) -> f64 {
        self.ar_coeff
    }

    pub fn taps(&self) -> &CVec {
        &self.taps
    }

    /// Advances to `h[n]`.
    pub fn step(&mut self, n: usize) -> &CVec {
        let a = self.ar_coeff;
        for (h, &s) in self
            .taps
            .as_mut_slice()
            .iter_mut()
            .zip(&self.innovation_std)
        {
            let g = self.rng.next_cgauss(1.0);
            *h = *h * a + g * s;
        }
        if let Some(imp) = self.impulse {
            if imp.time == n {
                self.taps.scale(Complex64::new(imp.gain, 0.0));
            }
        }
        &self.taps
    }
}

/// `d = hᴴx + w`.
pub fn desired_signal(h: &CVec, x: &CVec, w: Complex64) -> Result<Complex64> {
    Ok(herm_dot(h, x)? + w)
}

/// One sample of the identification problem.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub n: usize,
    pub h: &'a CVec,
    pub x: &'a CVec,
    pub w: Complex64,
    pub d: Complex64,
}

/// Channel plus input tapped-delay line plus additive noise, all drawn from
/// sub-streams of one seed.
#[derive(Debug, Clone)]
pub struct SystemSimulator {
    channel: ChannelState,
    input_kind: InputKind,
    input_rng: RngStream,
    noise_rng: RngStream,
    noise_variance: f64,
    x: CVec,
    n: usize,
}

impl SystemSimulator {
    pub fn new(spec: &ChannelSpec, seed: u64) -> Result<Self> {
        let channel = ChannelState::new(spec, RngStream::with_stream(seed, STREAM_TAPS))?;
        let mut input_rng = RngStream::with_stream(seed, STREAM_INPUT);
        let mut x = CVec::zeros(spec.taps);
        // Pre-fill x[−1] … x[−M+1] so the first regressor is fully excited.
        for i in 1..spec.taps {
            x[i] = draw_input(spec.input, &mut input_rng);
        }
        Ok(SystemSimulator {
            channel,
            input_kind: spec.input,
            input_rng,
            noise_rng: RngStream::with_stream(seed, STREAM_NOISE),
            noise_variance: spec.noise_variance,
            x,
            n: 0,
        })
    }

    pub fn next_observation(&mut self) -> Observation<'_> {
        let n = self.n;
        self.n += 1;
        let xs = self.x.as_mut_slice();
        let m = xs.len();
        xs.copy_within(0..m - 1, 1);
        xs[0] = draw_input(self.input_kind, &mut self.input_rng);
        let w = self.noise_rng.next_cgauss(self.noise_variance);
        let h = self.channel.step(n);
        let d = herm_dot_unchecked(h.as_slice(), self.x.as_slice()) + w;
        Observation {
            n,
            h,
            x: &self.x,
            w,
            d,
        }
    }
}

fn draw_input(kind: InputKind, rng: &mut RngStream) -> Complex64 {
    match kind {
        InputKind::Bpsk => rng.next_bpsk(),
        InputKind::Gauss => rng.next_cgauss(1.0),
    }
}
