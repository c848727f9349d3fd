use std::f64::consts::LN_2;

use serde::Serialize;

use super::DerivedConstants;
use crate::error::{MrlsError, Result};

/// Normalized autocorrelation `φ_(l)[m]`, `m = 0..len`, of the layer-`l`
/// effective impulse response.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfCurve {
    pub layer: usize,
    pub values: Vec<f64>,
}

impl AcfCurve {
    pub fn new(layer: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(MrlsError::argument("ACF needs at least one lag"));
        }
        Ok(AcfCurve { layer, values })
    }

    /// `φ[m] = exp(−m·log2/N)`, the ACF of the AR(1) channel.
    pub fn exponential(layer: usize, coherence: f64, max_lag: usize) -> Self {
        let alpha = LN_2 / coherence;
        AcfCurve {
            layer,
            values: (0..=max_lag).map(|m| (-alpha * m as f64).exp()).collect(),
        }
    }

    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    /// `φ[|lag|]`, extended past the stored range by an exponential fitted to
    /// the last tenth of the curve.
    pub fn value_at(&self, lag: isize) -> f64 {
        let m = lag.unsigned_abs();
        if let Some(v) = self.values.get(m) {
            return *v;
        }
        match self.tail_fit() {
            Some((last, rate)) => {
                let end = self.max_lag();
                last * (-rate * (m - end) as f64).exp()
            }
            None => 0.0,
        }
    }

    /// `(φ[end], decay rate)` from a least-squares line through `ln φ` over
    /// the last tenth of the lags. `None` when the tail is not positive.
    fn tail_fit(&self) -> Option<(f64, f64)> {
        let end = self.max_lag();
        let span = (self.values.len() / 10).max(2).min(self.values.len());
        let start = self.values.len() - span;
        let pts: Vec<(f64, f64)> = (start..=end)
            .filter(|&m| self.values[m] > 0.0)
            .map(|m| (m as f64, self.values[m].ln()))
            .collect();
        let last = self.values[end];
        if pts.len() < 2 || last <= 0.0 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let rate = (-sxy / sxx).max(0.0);
        Some((last, rate))
    }
}

/// ACF of the next layer's effective IR:
/// `φ_(l+1)[m] ∝ (2φ_(l)[m] − φ_(l)[|m−N_l|] − φ_(l)[m+N_l])·q_(l)[m]` with
/// `q_(l)[m] = (λ²/ρ)^min(m, N_l)`, renormalized to `φ_(l+1)[0] = 1`.
pub fn acf_propagate(
    phi: &AcfCurve,
    coherence: usize,
    consts: &DerivedConstants,
) -> Result<AcfCurve> {
    if coherence < 1 {
        return Err(MrlsError::argument("coherence length must be >= 1"));
    }
    let ratio = consts.lambda * consts.lambda / consts.rho;
    let shift = coherence as isize;
    let mut values: Vec<f64> = (0..=phi.max_lag())
        .map(|m| {
            let mi = m as isize;
            let shape =
                2.0 * phi.value_at(mi) - phi.value_at(mi - shift) - phi.value_at(mi + shift);
            shape * ratio.powi(m.min(coherence) as i32)
        })
        .collect();
    let head = values[0];
    if !(head > 0.0 && head.is_finite()) {
        return Err(MrlsError::Domain(format!(
            "propagated ACF has non-positive power {head} at lag 0"
        )));
    }
    for v in values.iter_mut() {
        *v /= head;
    }
    Ok(AcfCurve {
        layer: phi.layer + 1,
        values,
    })
}

/// Smallest lag `m` with `φ[m] ≤ 0.5`.
pub fn coherence_from_acf(phi: &AcfCurve) -> Result<usize> {
    phi.values.iter().position(|&v| v <= 0.5).ok_or_else(|| {
        MrlsError::NotFound(format!(
            "ACF of layer {} stays above 0.5 up to lag {}",
            phi.layer,
            phi.max_lag()
        ))
    })
}

/// Closed-form approximation `⌈N·log2 / (N·g + 3·log2)⌉`.
pub fn coherence_recursion(coherence: usize, consts: &DerivedConstants) -> usize {
    let n = coherence as f64;
    (n * LN_2 / (n * consts.g + 3.0 * LN_2)).ceil() as usize
}

/// Coherence lengths of the effective IRs of layers `2..=layers+1`, obtained by
/// propagating the exponential ACF of a channel with coherence `coherence`.
pub fn coherence_chain(
    coherence: usize,
    consts: &DerivedConstants,
    layers: usize,
    max_lag: usize,
) -> Result<Vec<usize>> {
    let mut phi = AcfCurve::exponential(1, coherence as f64, max_lag);
    let mut n = coherence_from_acf(&phi)?;
    let mut out = Vec::with_capacity(layers);
    for _ in 0..layers {
        phi = acf_propagate(&phi, n, consts)?;
        n = coherence_from_acf(&phi)?;
        out.push(n);
    }
    Ok(out)
}
