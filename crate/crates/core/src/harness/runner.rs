//! One Monte Carlo round and the ordered reduction over rounds.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use super::RunConfig;
use crate::channel::SystemSimulator;
use crate::error::{MrlsError, Result};
use crate::estimators::{MRlsEstimator, RlsEstimator};
use crate::numerics::{CVec, RngStream};
use crate::theory::AcfCurve;

const STREAM_UNCERTAINTY: u64 = 3;

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Per-round recordings.
#[derive(Debug, Clone)]
pub struct RoundTrace {
    pub mse_rls: Vec<f64>,
    pub mse_mrls: Vec<f64>,
    pub lopt: Vec<u8>,
    /// Mean `|d_(l+1)|²` over the steady window, `l = 1..=L_max`.
    pub posteriori_power: Vec<f64>,
    /// Mean `‖h_(l+1)‖²` over the steady window, `l = 1..=L_max`.
    pub effective_power: Vec<f64>,
    /// Unnormalized sample ACFs of `h_(l)`, `l = 1..=L_max+1`.
    pub acf: Option<Vec<Vec<f64>>>,
    /// Noise power the selector was given in this round.
    pub assumed_noise: f64,
}

/// Settings for recording effective-IR autocorrelations.
#[derive(Debug, Clone, Copy)]
pub struct AcfRecording {
    pub start: usize,
    pub max_lag: usize,
}

/// Noise power handed to the estimator: `max(0, 1 + u·randn)·σ_w²`.
pub fn perturbed_noise(cfg: &RunConfig, round: usize) -> f64 {
    let sigma2 = cfg.filter.noise_variance;
    if cfg.noise_uncertainty == 0.0 {
        return sigma2;
    }
    let mut rng = RngStream::with_stream(cfg.round_seed(round), STREAM_UNCERTAINTY);
    let factor = 1.0 + cfg.noise_uncertainty * rng.standard_normal();
    factor.max(0.0) * sigma2
}

pub fn run_round(cfg: &RunConfig, round: usize, acf: Option<AcfRecording>) -> Result<RoundTrace> {
    let n_samples = cfg.n_samples;
    let layers = cfg.filter.layers_max;
    let taps = cfg.filter.taps;
    let mut sim = SystemSimulator::new(&cfg.channel, cfg.round_seed(round))?;
    let mut rls = RlsEstimator::new(&cfg.filter)?;
    let mut mrls = MRlsEstimator::new(&cfg.filter)?;
    let assumed_noise = perturbed_noise(cfg, round);
    mrls.set_noise_variance(assumed_noise)?;

    let steady = cfg.steady_start();
    let mut trace = RoundTrace {
        mse_rls: Vec::with_capacity(n_samples),
        mse_mrls: Vec::with_capacity(n_samples),
        lopt: Vec::with_capacity(n_samples),
        posteriori_power: vec![0.0; layers],
        effective_power: vec![0.0; layers],
        acf: None,
        assumed_noise,
    };

    let window = acf.map(|a| n_samples.saturating_sub(a.start));
    // irs[l][tap * window + (n − start)] holds h_(l+1)[n]
    let mut irs: Vec<Vec<Complex64>> = match window {
        Some(w) => vec![vec![Complex64::new(0.0, 0.0); w * taps]; layers + 1],
        None => Vec::new(),
    };
    let mut effective = CVec::zeros(taps);

    for n in 0..n_samples {
        let obs = sim.next_observation();
        rls.step(obs.x, obs.d)?;
        let l_opt = mrls.step(obs.x, obs.d)?;
        trace.mse_rls.push(obs.h.dist_sqr(rls.estimate()));
        trace.mse_mrls.push(obs.h.dist_sqr(mrls.estimate()));
        trace.lopt.push(l_opt as u8);

        let in_steady = n >= steady;
        let in_acf = acf.is_some_and(|a| n >= a.start);
        if !(in_steady || in_acf) {
            continue;
        }
        effective.copy_from(obs.h);
        if in_acf {
            store(
                &mut irs[0],
                &effective,
                n - acf.unwrap().start,
                window.unwrap(),
            );
        }
        for (l, layer) in mrls.layers().iter().enumerate() {
            effective.sub_assign(&layer.h_hat);
            if in_steady {
                trace.posteriori_power[l] += layer.residual.norm_sqr();
                trace.effective_power[l] += effective.norm_sqr();
            }
            if in_acf {
                store(
                    &mut irs[l + 1],
                    &effective,
                    n - acf.unwrap().start,
                    window.unwrap(),
                );
            }
        }
    }
    let count = (n_samples - steady).max(1) as f64;
    for v in trace
        .posteriori_power
        .iter_mut()
        .chain(trace.effective_power.iter_mut())
    {
        *v /= count;
    }

    if let (Some(a), Some(w)) = (acf, window) {
        trace.acf = Some(
            irs.iter()
                .map(|buf| summed_tap_acf(buf, taps, w, a.max_lag))
                .collect(),
        );
    }
    Ok(trace)
}

fn store(buf: &mut [Complex64], h: &CVec, offset: usize, window: usize) {
    for (tap, v) in h.iter().enumerate() {
        buf[tap * window + offset] = *v;
    }
}

/// `Σ_taps (1/(W−m)) Σ_n Re{conj(h[n]) h[n−m]}` for `m = 0..=max_lag`.
fn summed_tap_acf(buf: &[Complex64], taps: usize, window: usize, max_lag: usize) -> Vec<f64> {
    let size = (window + max_lag + 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(size);
    let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(size);
    let mut out = vec![0.0; max_lag + 1];
    let mut scratch = vec![Complex64::new(0.0, 0.0); size];
    for tap in 0..taps {
        scratch.fill(Complex64::new(0.0, 0.0));
        scratch[..window].copy_from_slice(&buf[tap * window..(tap + 1) * window]);
        fwd.process(&mut scratch);
        for v in scratch.iter_mut() {
            *v = Complex64::new(v.norm_sqr(), 0.0);
        }
        inv.process(&mut scratch);
        for (m, o) in out.iter_mut().enumerate() {
            let terms = window.saturating_sub(m);
            if terms > 0 {
                *o += scratch[m].re / size as f64 / terms as f64;
            }
        }
    }
    out
}

/// Round-averaged results of one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsSeries {
    pub n_samples: usize,
    pub rounds_requested: usize,
    pub rounds_used: usize,
    pub excluded_rounds: usize,
    /// Linear MSE per sample.
    pub mse_rls: Vec<f64>,
    pub mse_mrls: Vec<f64>,
    pub lopt_bar: Vec<f64>,
    pub steady: SteadyState,
    /// Steady-state `E|d_(l+1)|²`, `l = 1..=L_max`.
    pub layer_posteriori_power: Vec<f64>,
    /// Steady-state `E‖h_(l+1)‖²`, `l = 1..=L_max`.
    pub layer_effective_power: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acf: Option<Vec<AcfCurve>>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SteadyState {
    pub start: usize,
    pub mse_rls: f64,
    pub mse_mrls: f64,
    pub mse_rls_db: f64,
    pub mse_mrls_db: f64,
    pub lopt_bar: f64,
}

impl MetricsSeries {
    pub fn mse_rls_db(&self) -> Vec<f64> {
        self.mse_rls.iter().map(|&v| to_db(v)).collect()
    }

    pub fn mse_mrls_db(&self) -> Vec<f64> {
        self.mse_mrls.iter().map(|&v| to_db(v)).collect()
    }

    /// Mean of `lopt_bar` over `[from, to)`.
    pub fn lopt_mean(&self, from: usize, to: usize) -> f64 {
        let s = &self.lopt_bar[from.min(self.n_samples)..to.min(self.n_samples)];
        s.iter().sum::<f64>() / s.len().max(1) as f64
    }
}

/// Runs every round (in parallel) and reduces them in round order.
pub fn run_rounds(cfg: &RunConfig, acf: Option<AcfRecording>) -> Result<MetricsSeries> {
    cfg.validate()?;
    let traces: Vec<Result<RoundTrace>> = (0..cfg.rounds)
        .into_par_iter()
        .map(|r| run_round(cfg, r, acf))
        .collect();

    let n = cfg.n_samples;
    let layers = cfg.filter.layers_max;
    let mut mse_rls = vec![0.0; n];
    let mut mse_mrls = vec![0.0; n];
    let mut lopt = vec![0.0; n];
    let mut post = vec![0.0; layers];
    let mut eff = vec![0.0; layers];
    let mut acf_sum: Option<Vec<Vec<f64>>> = None;
    let mut used = 0usize;
    let mut excluded = 0usize;
    for (round, trace) in traces.into_iter().enumerate() {
        let trace = match trace {
            Ok(t) => t,
            Err(MrlsError::NumericalBreakdown { denominator }) => {
                log::warn!("round {round} excluded: gain denominator {denominator}");
                excluded += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        used += 1;
        add_into(&mut mse_rls, &trace.mse_rls);
        add_into(&mut mse_mrls, &trace.mse_mrls);
        for (a, &b) in lopt.iter_mut().zip(&trace.lopt) {
            *a += b as f64;
        }
        add_into(&mut post, &trace.posteriori_power);
        add_into(&mut eff, &trace.effective_power);
        if let Some(curves) = trace.acf {
            match acf_sum.as_mut() {
                None => acf_sum = Some(curves),
                Some(sum) => {
                    for (s, c) in sum.iter_mut().zip(&curves) {
                        add_into(s, c);
                    }
                }
            }
        }
    }
    if used == 0 {
        return Err(MrlsError::NumericalBreakdown {
            denominator: f64::NAN,
        });
    }
    let scale = 1.0 / used as f64;
    for v in mse_rls
        .iter_mut()
        .chain(mse_mrls.iter_mut())
        .chain(lopt.iter_mut())
        .chain(post.iter_mut())
        .chain(eff.iter_mut())
    {
        *v *= scale;
    }

    let start = cfg.steady_start();
    let mean = |v: &[f64]| v[start..].iter().sum::<f64>() / (n - start).max(1) as f64;
    let steady = SteadyState {
        start,
        mse_rls: mean(&mse_rls),
        mse_mrls: mean(&mse_mrls),
        mse_rls_db: to_db(mean(&mse_rls)),
        mse_mrls_db: to_db(mean(&mse_mrls)),
        lopt_bar: mean(&lopt),
    };

    let acf = acf_sum.map(|sums| {
        sums.into_iter()
            .enumerate()
            .map(|(l, s)| {
                let head = s[0];
                AcfCurve {
                    layer: l + 1,
                    values: s.iter().map(|v| v / head).collect(),
                }
            })
            .collect()
    });

    Ok(MetricsSeries {
        n_samples: n,
        rounds_requested: cfg.rounds,
        rounds_used: used,
        excluded_rounds: excluded,
        mse_rls,
        mse_mrls,
        lopt_bar: lopt,
        steady,
        layer_posteriori_power: post,
        layer_effective_power: eff,
        acf,
    })
}

fn add_into(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        let mut c = RunConfig::standard();
        c.set_taps(8).unwrap();
        c.n_samples = 600;
        c.rounds = 4;
        c
    }

    #[test]
    fn fft_acf_matches_direct_sum() {
        let mut rng = RngStream::new(12);
        let (taps, window, max_lag) = (3, 64, 10);
        let buf: Vec<Complex64> = (0..taps * window).map(|_| rng.next_cgauss(1.0)).collect();
        let fast = summed_tap_acf(&buf, taps, window, max_lag);
        for m in 0..=max_lag {
            let mut direct = 0.0;
            for t in 0..taps {
                let h = &buf[t * window..(t + 1) * window];
                let s: f64 = (m..window).map(|n| (h[n].conj() * h[n - m]).re).sum();
                direct += s / (window - m) as f64;
            }
            assert!((fast[m] - direct).abs() < 1e-10, "lag {m}");
        }
    }

    #[test]
    fn zero_uncertainty_leaves_noise_untouched() {
        let c = small();
        assert_eq!(perturbed_noise(&c, 3), c.filter.noise_variance);
    }

    #[test]
    fn perturbation_is_clamped() {
        let mut c = small();
        c.noise_uncertainty = 50.0;
        for r in 0..50 {
            assert!(perturbed_noise(&c, r) >= 0.0);
        }
    }

    #[test]
    fn round_is_reproducible() {
        let c = small();
        let a = run_round(&c, 2, None).unwrap();
        let b = run_round(&c, 2, None).unwrap();
        assert_eq!(a.mse_mrls, b.mse_mrls);
        assert_eq!(a.lopt, b.lopt);
    }

    #[test]
    fn reduction_counts_rounds() {
        let s = run_rounds(&small(), None).unwrap();
        assert_eq!(s.rounds_used, 4);
        assert_eq!(s.excluded_rounds, 0);
        assert!(s.lopt_bar.iter().all(|&l| (1.0..=5.0).contains(&l)));
        assert!(s.mse_rls.iter().all(|&v| v >= 0.0));
    }
}
