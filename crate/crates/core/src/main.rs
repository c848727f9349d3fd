use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mrls::channel::{load_pdp, Impulse, InputKind};
use mrls::harness::{self, RunConfig};
use mrls::theory::{
    coherence_chain, coherence_recursion, complexity_counts, mrls_mse_predict, noise_term_power,
    posteriori_power_offset, rls_mse, DerivedConstants, Implementation,
};
use mrls::{MrlsError, Result};

#[derive(Parser)]
#[command(
    name = "mrls",
    version,
    about = "Multi-layered RLS tracking experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// MSE and average L_opt against time at one SNR.
    Track(Common),
    /// Steady-state MSE and L_opt against SNR.
    SweepSnr(Common),
    /// Tracking through a sign flip (or other gain) of the whole IR.
    Impulse(Common),
    /// Steady-state m-RLS MSE when the selector is given a perturbed noise power.
    Uncertainty(Common),
    /// Autocorrelation of the effective IR at every layer.
    Acf {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        max_lag: usize,
    },
    /// Closed-form predictions for the configured filter and channel.
    Theory(Common),
    /// Per-sample operation counts.
    Complexity {
        #[arg(long, default_value_t = 50)]
        taps: u64,
        #[arg(long, default_value_t = 5)]
        layers_max: u64,
        #[arg(long, default_value_t = 1)]
        l_opt: u64,
        #[arg(long, value_enum, default_value_t = ImplArg::Classic)]
        implementation: ImplArg,
        #[arg(long, default_value_t = 4)]
        dcd_iterations: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ImplArg {
    Classic,
    Dcd,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputArg {
    Bpsk,
    Gauss,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    taps: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Coherence length N in samples; `inf` freezes the channel.
    #[arg(long)]
    coherence: Option<f64>,
    /// SNR in dB; repeat for sweeps.
    #[arg(long = "snr-db", allow_negative_numbers = true)]
    snr_db: Vec<f64>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    layers_max: Option<usize>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    input: Option<InputArg>,
    #[arg(long)]
    pdp_file: Option<PathBuf>,
    #[arg(long)]
    impulse_at: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    impulse_gain: Option<f64>,
    /// Noise-power uncertainty `u`; repeat for the uncertainty sweep.
    #[arg(long)]
    uncertainty: Vec<f64>,
    /// Directory for CSV, JSON and SVG outputs.
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_SWEEP_SNRS: [f64; 11] = [
    0.0, 4.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 24.0, 30.0,
];
const DEFAULT_UNCERTAINTIES: [f64; 4] = [0.0, 0.1, 0.2, 0.5];

impl Common {
    fn build(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::standard(),
        };
        if let Some(m) = self.taps {
            cfg.set_taps(m)?;
        }
        if let Some(l) = self.lambda {
            cfg.filter.lambda = l;
        }
        if let Some(n) = self.coherence {
            cfg.channel.coherence = n;
        }
        if !self.snr_db.is_empty() {
            cfg.snr_db_list = self.snr_db.clone();
            cfg.set_snr_db(self.snr_db[0]);
        }
        if let Some(r) = self.rounds {
            cfg.rounds = r;
        }
        if let Some(n) = self.samples {
            cfg.n_samples = n;
        }
        if let Some(l) = self.layers_max {
            cfg.filter.layers_max = l;
        }
        if let Some(z) = self.z {
            cfg.filter.z = z;
        }
        if let Some(d) = self.delta {
            cfg.filter.delta = d;
        }
        if let Some(s) = self.seed {
            cfg.base_seed = s;
        }
        if let Some(input) = self.input {
            cfg.set_input(match input {
                InputArg::Bpsk => InputKind::Bpsk,
                InputArg::Gauss => InputKind::Gauss,
            });
        }
        if let Some(path) = &self.pdp_file {
            let pdp = load_pdp(path)?;
            if pdp.len() != cfg.channel.taps {
                return Err(MrlsError::Config(format!(
                    "{} holds {} weights but the channel has {} taps",
                    path.display(),
                    pdp.len(),
                    cfg.channel.taps
                )));
            }
            cfg.channel.pdp = pdp;
        }
        if self.impulse_at.is_some() || self.impulse_gain.is_some() {
            let base = cfg.channel.impulse.unwrap_or(Impulse {
                time: 1000,
                gain: -1.0,
            });
            cfg.channel.impulse = Some(Impulse {
                time: self.impulse_at.unwrap_or(base.time),
                gain: self.impulse_gain.unwrap_or(base.gain),
            });
        }
        if let [u] = self.uncertainty.as_slice() {
            cfg.noise_uncertainty = *u;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn report_files(files: &harness::Emitted) {
    for f in &files.files {
        eprintln!("wrote {}", f.display());
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Track(common) => {
            let cfg = common.build()?;
            let s = harness::run_tracking(&cfg)?;
            print_json(&json!({
                "snr_db": cfg.snr_db(),
                "rounds_used": s.rounds_used,
                "excluded_rounds": s.excluded_rounds,
                "steady": s.steady,
            }));
            if let Some(dir) = &cfg.output_dir {
                report_files(&harness::emit_tracking(dir, &cfg, &s)?);
            }
        }
        Command::SweepSnr(common) => {
            let mut cfg = common.build()?;
            if cfg.snr_db_list.is_empty() {
                cfg.snr_db_list = DEFAULT_SWEEP_SNRS.to_vec();
            }
            let pts = harness::sweep_snr(&cfg, &cfg.snr_db_list)?;
            print_json(&json!(pts));
            if let Some(dir) = &cfg.output_dir {
                report_files(&harness::emit_sweep(dir, &cfg, &pts)?);
            }
        }
        Command::Impulse(common) => {
            let mut cfg = common.build()?;
            cfg.channel.impulse.get_or_insert(Impulse {
                time: 1000,
                gain: -1.0,
            });
            let r = harness::run_impulse(&cfg)?;
            print_json(&json!({
                "impulse_time": r.impulse_time,
                "peak_lopt": r.peak_lopt,
                "settled_lopt": r.settled_lopt,
                "pre_mse_rls_db": r.pre_mse_rls_db,
                "pre_mse_mrls_db": r.pre_mse_mrls_db,
                "reconvergence_rls": r.reconvergence_rls,
                "reconvergence_mrls": r.reconvergence_mrls,
            }));
            if let Some(dir) = &cfg.output_dir {
                report_files(&harness::emit_impulse(dir, &cfg, &r)?);
            }
        }
        Command::Uncertainty(common) => {
            let mut cfg = common.build()?;
            if cfg.snr_db_list.is_empty() {
                cfg.snr_db_list = DEFAULT_SWEEP_SNRS.to_vec();
            }
            let levels = if common.uncertainty.is_empty() {
                DEFAULT_UNCERTAINTIES.to_vec()
            } else {
                common.uncertainty.clone()
            };
            let pts = harness::run_uncertainty(&cfg, &levels)?;
            print_json(&json!(pts));
            if let Some(dir) = &cfg.output_dir {
                report_files(&harness::emit_uncertainty(dir, &cfg, &pts)?);
            }
        }
        Command::Acf { common, max_lag } => {
            let mut cfg = common.build()?;
            cfg.record_effective_irs = true;
            let r = harness::measure_layer_acf(&cfg, max_lag)?;
            let layers: Vec<_> = r.curves.iter().map(|c| c.layer).collect();
            print_json(&json!({ "layers": layers, "crossings": r.crossings }));
            if let Some(dir) = &cfg.output_dir {
                report_files(&harness::emit_acf(dir, &cfg, &r)?);
            }
        }
        Command::Theory(common) => {
            let cfg = common.build()?;
            let p = &cfg.filter;
            let n = cfg.channel.coherence;
            let c = DerivedConstants::from_params(p);
            let layers = p.layers_max;
            let chain = if n.is_finite() {
                let n = n.round() as usize;
                let mut lens = vec![n];
                lens.extend(coherence_chain(n, &c, layers, 8 * n)?);
                Some(lens)
            } else {
                None
            };
            let recursion = chain.as_ref().map(|lens| {
                let mut r = vec![lens[0]];
                for _ in 0..layers {
                    r.push(coherence_recursion(*r.last().unwrap(), &c));
                }
                r
            });
            let predictions = match &chain {
                Some(lens) => (1..=layers)
                    .map(|l| {
                        let ns: Vec<f64> = lens[..l].iter().map(|&v| v as f64).collect();
                        mrls_mse_predict(p, &ns)
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            let offsets: Vec<f64> = (1..=layers)
                .map(|l| posteriori_power_offset(l, p))
                .collect();
            print_json(&json!({
                "constants": c,
                "rls_mse": rls_mse(p, n)?,
                "noise_term_power": noise_term_power(p, n),
                "coherence_chain": chain,
                "coherence_recursion": recursion,
                "mrls_mse_by_layers": predictions,
                "posteriori_power_offsets": offsets,
            }));
        }
        Command::Complexity {
            taps,
            layers_max,
            l_opt,
            implementation,
            dcd_iterations,
        } => {
            if l_opt < 1 || l_opt > layers_max || taps < 1 {
                return Err(MrlsError::Argument(
                    "need taps >= 1 and 1 <= l_opt <= layers_max".into(),
                ));
            }
            let imp = match implementation {
                ImplArg::Classic => Implementation::Classic,
                ImplArg::Dcd => Implementation::Dcd,
            };
            let counts = complexity_counts(taps, layers_max, l_opt, imp, dcd_iterations);
            print_json(&json!(counts));
        }
    }
    Ok(())
}

fn exit_code(e: &MrlsError) -> u8 {
    match e {
        MrlsError::NumericalBreakdown { .. } => 2,
        MrlsError::Io { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
