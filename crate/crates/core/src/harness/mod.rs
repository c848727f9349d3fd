//! Monte Carlo experiments: paired RLS and m-RLS runs over many seeded rounds,
//! with CSV, JSON and SVG outputs.

mod config;
mod experiments;
mod output;
mod runner;

pub use config::{noise_variance_for_snr, RunConfig, DEFAULT_PDP_DECAY};
pub use experiments::{
    measure_layer_acf, run_impulse, run_tracking, run_uncertainty, sweep_snr, ImpulseReport,
    LayerAcfReport, SweepPoint, UncertaintyPoint, IMPULSE_PEAK_WINDOW, PRE_IMPULSE_WINDOW,
    RECONVERGENCE_DB,
};
pub use output::{emit_acf, emit_impulse, emit_sweep, emit_tracking, emit_uncertainty, Emitted};
pub use runner::{
    perturbed_noise, run_round, run_rounds, to_db, AcfRecording, MetricsSeries, RoundTrace,
    SteadyState,
};
