use num_complex::Complex64;

use super::{FilterParams, SharedGain};
use crate::error::{MrlsError, Result};
use crate::numerics::{herm_dot_unchecked, CVec};

/// One layer of the stack.
#[derive(Debug, Clone)]
pub struct LayerState {
    /// `ĥ_(l)[n]`, estimate of the layer's effective impulse response.
    pub h_hat: CVec,
    /// `π_(l+1)[n]`, smoothed power of the layer's a posteriori error.
    pub pi: f64,
    /// `d_(l)[n]`, the layer's desired signal at the last step.
    pub desired: Complex64,
    /// `e_(l)[n]`, a priori error at the last step.
    pub prior_error: Complex64,
    /// `d_(l+1)[n] = e_(l)[n]·T[n]`, passed on to the next layer.
    pub residual: Complex64,
}

impl LayerState {
    fn new(taps: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        LayerState {
            h_hat: CVec::zeros(taps),
            pi: 0.0,
            desired: zero,
            prior_error: zero,
            residual: zero,
        }
    }
}

/// Multi-layered RLS: a chain of RLS identifiers sharing one gain, each fed
/// the a posteriori error of the one before, with the output built from the
/// first `L_opt` layers.
#[derive(Debug, Clone)]
pub struct MRlsEstimator {
    params: FilterParams,
    gain: SharedGain,
    layers: Vec<LayerState>,
    offsets: Vec<f64>,
    combined: CVec,
    l_opt: usize,
}

impl MRlsEstimator {
    pub fn new(params: &FilterParams) -> Result<Self> {
        params.validate()?;
        Ok(MRlsEstimator {
            params: params.clone(),
            gain: SharedGain::new(params.taps, params.delta),
            layers: (0..params.layers_max)
                .map(|_| LayerState::new(params.taps))
                .collect(),
            offsets: params.selection_offsets(),
            combined: CVec::zeros(params.taps),
            l_opt: 1,
        })
    }

    pub fn params(&self) -> &FilterParams {
        &self.params
    }

    /// Replaces the noise power used by the layer selector.
    pub fn set_noise_variance(&mut self, noise_variance: f64) -> Result<()> {
        if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
            return Err(MrlsError::argument(
                "noise variance must be finite and >= 0",
            ));
        }
        self.params.noise_variance = noise_variance;
        self.offsets = self.params.selection_offsets();
        Ok(())
    }

    /// Processes one sample and returns the selected layer count `L_opt`.
    pub fn step(&mut self, x: &CVec, d: Complex64) -> Result<usize> {
        let taps = self.params.taps;
        if x.len() != taps {
            return Err(MrlsError::Dimension {
                expected: taps,
                found: x.len(),
            });
        }
        self.gain.update(x, self.params.lambda)?;
        let k = self.gain.k();
        let t = self.gain.t();
        let z = self.params.z;

        let mut j_min = 1.0 / self.params.delta;
        let mut l_opt = 1;
        let mut desired = d;
        for (idx, (layer, &r)) in self.layers.iter_mut().zip(&self.offsets).enumerate() {
            let e = desired - herm_dot_unchecked(layer.h_hat.as_slice(), x.as_slice());
            layer.h_hat.axpy(e.conj(), k);
            let next = e * t;
            layer.pi = pi_update(layer.pi, next, z);
            layer.desired = desired;
            layer.prior_error = e;
            layer.residual = next;

            let j = layer.pi - r;
            if j < j_min {
                j_min = j;
                l_opt = idx + 1;
            }
            desired = next;
        }
        self.l_opt = l_opt;

        self.combined.copy_from(&self.layers[0].h_hat);
        for layer in &self.layers[1..l_opt] {
            self.combined.add_assign(&layer.h_hat);
        }
        Ok(l_opt)
    }

    /// `h̃[n] = Σ_{l ≤ L_opt} ĥ_(l)[n]`.
    pub fn estimate(&self) -> &CVec {
        &self.combined
    }

    pub fn l_opt(&self) -> usize {
        self.l_opt
    }

    pub fn layers(&self) -> &[LayerState] {
        &self.layers
    }

    /// `d_(l+1)[n]` for `l = 1..=layers_max`.
    pub fn residuals(&self) -> impl ExactSizeIterator<Item = Complex64> + '_ {
        self.layers.iter().map(|l| l.residual)
    }

    pub fn pis(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.pi).collect()
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn gain(&self) -> &SharedGain {
        &self.gain
    }
}

/// `π ← (1 − z)π + z|d|²`.
pub fn pi_update(pi_prev: f64, d_next: Complex64, z: f64) -> f64 {
    (1.0 - z) * pi_prev + z * d_next.norm_sqr()
}

/// First `l` (1-based) minimizing `π_(l+1) − r(l)`, scanning with a strict
/// `<` against a running minimum that starts at `j_init`. Returns 1 if no
/// candidate beats `j_init`.
pub fn layer_select(pi: &[f64], r: &[f64], j_init: f64) -> Result<usize> {
    if pi.is_empty() || r.is_empty() {
        return Err(MrlsError::argument("layer_select needs at least one layer"));
    }
    if pi.len() != r.len() {
        return Err(MrlsError::Dimension {
            expected: pi.len(),
            found: r.len(),
        });
    }
    let mut j_min = j_init;
    let mut best = 1;
    for (idx, (p, o)) in pi.iter().zip(r).enumerate() {
        let j = p - o;
        if j < j_min {
            j_min = j;
            best = idx + 1;
        }
    }
    Ok(best)
}
