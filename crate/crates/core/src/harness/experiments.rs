use serde::Serialize;

use super::runner::{run_rounds, to_db, AcfRecording, MetricsSeries};
use super::RunConfig;
use crate::error::{MrlsError, Result};
use crate::theory::{coherence_from_acf, AcfCurve};

/// Samples either side of the impulse searched for the peak `L̄_opt`.
pub const IMPULSE_PEAK_WINDOW: usize = 100;
/// Samples before the impulse averaged for the reference MSE.
pub const PRE_IMPULSE_WINDOW: usize = 300;
/// Reconvergence means the MSE is back within this many dB of the reference.
pub const RECONVERGENCE_DB: f64 = 1.0;

pub fn run_tracking(cfg: &RunConfig) -> Result<MetricsSeries> {
    run_rounds(cfg, None)
}

/// Steady-state results at one SNR.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub mse_rls: f64,
    pub mse_mrls: f64,
    pub mse_rls_db: f64,
    pub mse_mrls_db: f64,
    pub lopt_bar: f64,
    pub rounds_used: usize,
}

impl SweepPoint {
    fn new(snr_db: f64, s: &MetricsSeries) -> Self {
        SweepPoint {
            snr_db,
            mse_rls: s.steady.mse_rls,
            mse_mrls: s.steady.mse_mrls,
            mse_rls_db: s.steady.mse_rls_db,
            mse_mrls_db: s.steady.mse_mrls_db,
            lopt_bar: s.steady.lopt_bar,
            rounds_used: s.rounds_used,
        }
    }
}

pub fn sweep_snr(cfg: &RunConfig, snrs_db: &[f64]) -> Result<Vec<SweepPoint>> {
    if snrs_db.is_empty() {
        return Err(MrlsError::argument("SNR sweep needs at least one value"));
    }
    snrs_db
        .iter()
        .map(|&snr| {
            let s = run_rounds(&cfg.clone().with_snr_db(snr), None)?;
            Ok(SweepPoint::new(snr, &s))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ImpulseReport {
    pub impulse_time: usize,
    /// Largest `L̄_opt` within the peak window around the impulse.
    pub peak_lopt: f64,
    /// Mean `L̄_opt` from the steady-state start to the end of the run.
    pub settled_lopt: f64,
    pub pre_mse_rls_db: f64,
    pub pre_mse_mrls_db: f64,
    /// Samples after the impulse until the MSE is back within
    /// [`RECONVERGENCE_DB`] of its pre-impulse level; `None` if it never is.
    pub reconvergence_rls: Option<usize>,
    pub reconvergence_mrls: Option<usize>,
    pub series: MetricsSeries,
}

pub fn run_impulse(cfg: &RunConfig) -> Result<ImpulseReport> {
    let impulse = cfg
        .channel
        .impulse
        .ok_or_else(|| MrlsError::Config("impulse experiment needs an impulse".into()))?;
    let t = impulse.time;
    if t == 0 || t >= cfg.n_samples {
        return Err(MrlsError::Config(format!(
            "impulse time {t} must fall inside the run of {} samples",
            cfg.n_samples
        )));
    }
    let series = run_rounds(cfg, None)?;
    let window =
        t.saturating_sub(IMPULSE_PEAK_WINDOW)..(t + IMPULSE_PEAK_WINDOW + 1).min(cfg.n_samples);
    let peak_lopt = series.lopt_bar[window]
        .iter()
        .cloned()
        .fold(f64::MIN, f64::max);
    let settled_lopt = series.lopt_mean(cfg.steady_start(), cfg.n_samples);

    let pre = t.saturating_sub(PRE_IMPULSE_WINDOW)..t;
    let pre_db = |v: &[f64]| to_db(v[pre.clone()].iter().sum::<f64>() / pre.len() as f64);
    let pre_rls = pre_db(&series.mse_rls);
    let pre_mrls = pre_db(&series.mse_mrls);
    let reconverge = |v: &[f64], reference: f64| {
        v[t..]
            .iter()
            .position(|&m| to_db(m) <= reference + RECONVERGENCE_DB)
    };
    Ok(ImpulseReport {
        impulse_time: t,
        peak_lopt,
        settled_lopt,
        pre_mse_rls_db: pre_rls,
        pre_mse_mrls_db: pre_mrls,
        reconvergence_rls: reconverge(&series.mse_rls, pre_rls),
        reconvergence_mrls: reconverge(&series.mse_mrls, pre_mrls),
        series,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct UncertaintyPoint {
    pub u: f64,
    pub snr_db: f64,
    pub mse_mrls_db: f64,
    pub lopt_bar: f64,
}

/// m-RLS steady state for every `(u, SNR)` pair, SNRs taken from the config.
pub fn run_uncertainty(cfg: &RunConfig, levels: &[f64]) -> Result<Vec<UncertaintyPoint>> {
    if levels.is_empty() || cfg.snr_db_list.is_empty() {
        return Err(MrlsError::argument(
            "uncertainty sweep needs uncertainty levels and SNR values",
        ));
    }
    let mut out = Vec::with_capacity(levels.len() * cfg.snr_db_list.len());
    for &u in levels {
        for &snr in &cfg.snr_db_list {
            let mut c = cfg.clone().with_snr_db(snr);
            c.noise_uncertainty = u;
            let s = run_rounds(&c, None)?;
            out.push(UncertaintyPoint {
                u,
                snr_db: snr,
                mse_mrls_db: s.steady.mse_mrls_db,
                lopt_bar: s.steady.lopt_bar,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct LayerAcfReport {
    /// Curves for `h_(1) … h_(L_max+1)`.
    pub curves: Vec<AcfCurve>,
    /// 0.5 crossing of each curve; `None` if it stays above 0.5.
    pub crossings: Vec<Option<usize>>,
}

/// Averaged normalized ACFs of the effective IRs, measured over the last two
/// thirds of each run.
pub fn measure_layer_acf(cfg: &RunConfig, max_lag: usize) -> Result<LayerAcfReport> {
    if !cfg.record_effective_irs {
        return Err(MrlsError::Config(
            "layer ACF measurement needs record_effective_irs".into(),
        ));
    }
    if max_lag == 0 || cfg.n_samples < 10 * max_lag {
        return Err(MrlsError::argument(format!(
            "ACF up to lag {max_lag} needs at least {} samples",
            10 * max_lag
        )));
    }
    let start = cfg.n_samples / 3;
    let series = run_rounds(cfg, Some(AcfRecording { start, max_lag }))?;
    let curves = series.acf.expect("recording requested");
    let crossings = curves.iter().map(|c| coherence_from_acf(c).ok()).collect();
    Ok(LayerAcfReport { curves, crossings })
}
