//! CSV tables, JSON summaries and SVG plots.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use serde::Serialize;

use super::experiments::{ImpulseReport, LayerAcfReport, SweepPoint, UncertaintyPoint};
use super::runner::MetricsSeries;
use super::RunConfig;
use crate::error::{MrlsError, Result};

/// Files written by one `emit_*` call.
#[derive(Debug, Clone, Default)]
pub struct Emitted {
    pub files: Vec<PathBuf>,
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| MrlsError::io(dir, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> MrlsError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => MrlsError::io(path, io),
        other => MrlsError::Config(format!("{}: {other:?}", path.display())),
    }
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| MrlsError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| MrlsError::Config(format!("{}: {e}", path.display())))?;
    fs::write(path, text + "\n").map_err(|e| MrlsError::io(path, e))
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    config: &'a RunConfig,
    results: T,
}

#[derive(Serialize)]
struct TrackingSummary<'a> {
    rounds_used: usize,
    excluded_rounds: usize,
    steady: &'a super::SteadyState,
    layer_posteriori_power: &'a [f64],
    layer_effective_power: &'a [f64],
}

impl<'a> From<&'a MetricsSeries> for TrackingSummary<'a> {
    fn from(s: &'a MetricsSeries) -> Self {
        TrackingSummary {
            rounds_used: s.rounds_used,
            excluded_rounds: s.excluded_rounds,
            steady: &s.steady,
            layer_posteriori_power: &s.layer_posteriori_power,
            layer_effective_power: &s.layer_effective_power,
        }
    }
}

fn series_csv(path: &Path, s: &MetricsSeries) -> Result<()> {
    let (rls, mrls) = (s.mse_rls_db(), s.mse_mrls_db());
    write_rows(
        path,
        &["n", "mse_rls_db", "mse_mrls_db", "lopt_bar"],
        (0..s.n_samples).map(|n| {
            [
                n.to_string(),
                rls[n].to_string(),
                mrls[n].to_string(),
                s.lopt_bar[n].to_string(),
            ]
        }),
    )
}

fn series_plots(dir: &Path, stem: &str, s: &MetricsSeries, out: &mut Emitted) -> Result<()> {
    let n: Vec<f64> = (0..s.n_samples).map(|v| v as f64).collect();
    let mse = dir.join(format!("{stem}_mse.svg"));
    line_plot(
        &mse,
        "MSE",
        "sample",
        "MSE (dB)",
        &[
            ("RLS", &n, &s.mse_rls_db()),
            ("m-RLS", &n, &s.mse_mrls_db()),
        ],
    )?;
    let lopt = dir.join(format!("{stem}_lopt.svg"));
    line_plot(
        &lopt,
        "average L_opt",
        "sample",
        "L_opt",
        &[("m-RLS", &n, &s.lopt_bar)],
    )?;
    out.files.extend([mse, lopt]);
    Ok(())
}

pub fn emit_tracking(dir: &Path, cfg: &RunConfig, s: &MetricsSeries) -> Result<Emitted> {
    ensure_dir(dir)?;
    let mut out = Emitted::default();
    let csv = dir.join("tracking.csv");
    series_csv(&csv, s)?;
    let json = dir.join("tracking.json");
    write_json(
        &json,
        &Summary {
            config: cfg,
            results: TrackingSummary::from(s),
        },
    )?;
    out.files.extend([csv, json]);
    series_plots(dir, "tracking", s, &mut out)?;
    Ok(out)
}

pub fn emit_sweep(dir: &Path, cfg: &RunConfig, pts: &[SweepPoint]) -> Result<Emitted> {
    ensure_dir(dir)?;
    let mut out = Emitted::default();
    let csv = dir.join("sweep_snr.csv");
    write_rows(
        &csv,
        &["snr_db", "mse_rls_db", "mse_mrls_db", "lopt_bar"],
        pts.iter().map(|p| {
            [
                p.snr_db.to_string(),
                p.mse_rls_db.to_string(),
                p.mse_mrls_db.to_string(),
                p.lopt_bar.to_string(),
            ]
        }),
    )?;
    let json = dir.join("sweep_snr.json");
    write_json(
        &json,
        &Summary {
            config: cfg,
            results: pts,
        },
    )?;
    let snr: Vec<f64> = pts.iter().map(|p| p.snr_db).collect();
    let rls: Vec<f64> = pts.iter().map(|p| p.mse_rls_db).collect();
    let mrls: Vec<f64> = pts.iter().map(|p| p.mse_mrls_db).collect();
    let lopt: Vec<f64> = pts.iter().map(|p| p.lopt_bar).collect();
    let mse_svg = dir.join("sweep_snr_mse.svg");
    line_plot(
        &mse_svg,
        "steady-state MSE",
        "SNR (dB)",
        "MSE (dB)",
        &[("RLS", &snr, &rls), ("m-RLS", &snr, &mrls)],
    )?;
    let lopt_svg = dir.join("sweep_snr_lopt.svg");
    line_plot(
        &lopt_svg,
        "average L_opt",
        "SNR (dB)",
        "L_opt",
        &[("m-RLS", &snr, &lopt)],
    )?;
    out.files.extend([csv, json, mse_svg, lopt_svg]);
    Ok(out)
}

pub fn emit_impulse(dir: &Path, cfg: &RunConfig, r: &ImpulseReport) -> Result<Emitted> {
    #[derive(Serialize)]
    struct ImpulseSummary<'a> {
        impulse_time: usize,
        peak_lopt: f64,
        settled_lopt: f64,
        pre_mse_rls_db: f64,
        pre_mse_mrls_db: f64,
        reconvergence_rls: Option<usize>,
        reconvergence_mrls: Option<usize>,
        tracking: TrackingSummary<'a>,
    }
    ensure_dir(dir)?;
    let mut out = Emitted::default();
    let csv = dir.join("impulse.csv");
    series_csv(&csv, &r.series)?;
    let json = dir.join("impulse.json");
    let summary = ImpulseSummary {
        impulse_time: r.impulse_time,
        peak_lopt: r.peak_lopt,
        settled_lopt: r.settled_lopt,
        pre_mse_rls_db: r.pre_mse_rls_db,
        pre_mse_mrls_db: r.pre_mse_mrls_db,
        reconvergence_rls: r.reconvergence_rls,
        reconvergence_mrls: r.reconvergence_mrls,
        tracking: TrackingSummary::from(&r.series),
    };
    write_json(
        &json,
        &Summary {
            config: cfg,
            results: summary,
        },
    )?;
    out.files.extend([csv, json]);
    series_plots(dir, "impulse", &r.series, &mut out)?;
    Ok(out)
}

pub fn emit_uncertainty(dir: &Path, cfg: &RunConfig, pts: &[UncertaintyPoint]) -> Result<Emitted> {
    ensure_dir(dir)?;
    let mut out = Emitted::default();
    let csv = dir.join("uncertainty.csv");
    write_rows(
        &csv,
        &["u", "snr_db", "mse_mrls_db", "lopt_bar"],
        pts.iter().map(|p| {
            [
                p.u.to_string(),
                p.snr_db.to_string(),
                p.mse_mrls_db.to_string(),
                p.lopt_bar.to_string(),
            ]
        }),
    )?;
    let json = dir.join("uncertainty.json");
    write_json(
        &json,
        &Summary {
            config: cfg,
            results: pts,
        },
    )?;

    let mut levels: Vec<f64> = pts.iter().map(|p| p.u).collect();
    levels.dedup();
    let curves: Vec<(String, Vec<f64>, Vec<f64>)> = levels
        .iter()
        .map(|&u| {
            let sel: Vec<&UncertaintyPoint> = pts.iter().filter(|p| p.u == u).collect();
            (
                format!("u = {u}"),
                sel.iter().map(|p| p.snr_db).collect(),
                sel.iter().map(|p| p.mse_mrls_db).collect(),
            )
        })
        .collect();
    let refs: Vec<(&str, &[f64], &[f64])> = curves
        .iter()
        .map(|(l, x, y)| (l.as_str(), x.as_slice(), y.as_slice()))
        .collect();
    let svg = dir.join("uncertainty_mse.svg");
    line_plot(
        &svg,
        "m-RLS MSE under noise-power uncertainty",
        "SNR (dB)",
        "MSE (dB)",
        &refs,
    )?;
    out.files.extend([csv, json, svg]);
    Ok(out)
}

pub fn emit_acf(dir: &Path, cfg: &RunConfig, r: &LayerAcfReport) -> Result<Emitted> {
    ensure_dir(dir)?;
    let mut out = Emitted::default();
    let csv = dir.join("layer_acf.csv");
    let mut header = vec!["lag".to_string()];
    header.extend(r.curves.iter().map(|c| format!("layer{}", c.layer)));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let lags = r.curves[0].values.len();
    write_rows(
        &csv,
        &header_refs,
        (0..lags).map(|m| {
            std::iter::once(m.to_string())
                .chain(r.curves.iter().map(move |c| c.values[m].to_string()))
                .collect::<Vec<_>>()
        }),
    )?;
    let json = dir.join("layer_acf.json");
    write_json(
        &json,
        &Summary {
            config: cfg,
            results: &r.crossings,
        },
    )?;
    let lag_axis: Vec<f64> = (0..lags).map(|m| m as f64).collect();
    let labels: Vec<String> = r.curves.iter().map(|c| format!("h({})", c.layer)).collect();
    let refs: Vec<(&str, &[f64], &[f64])> = r
        .curves
        .iter()
        .zip(&labels)
        .map(|(c, l)| (l.as_str(), lag_axis.as_slice(), c.values.as_slice()))
        .collect();
    let svg = dir.join("layer_acf.svg");
    line_plot(&svg, "effective IR autocorrelation", "lag", "ACF", &refs)?;
    out.files.extend([csv, json, svg]);
    Ok(out)
}

fn line_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(&str, &[f64], &[f64])],
) -> Result<()> {
    let finite = |v: &&f64| v.is_finite();
    let xs = series.iter().flat_map(|s| s.1.iter()).filter(finite);
    let ys = series.iter().flat_map(|s| s.2.iter()).filter(finite);
    let (x0, x1) = bounds(xs);
    let (y0, y1) = bounds(ys);
    let draw = || -> std::result::Result<(), Box<dyn std::error::Error>> {
        let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
        root.fill(&WHITE)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 22))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(55)
            .build_cartesian_2d(x0..x1, y0..y1)?;
        chart
            .configure_mesh()
            .x_desc(x_label)
            .y_desc(y_label)
            .draw()?;
        for (i, (label, x, y)) in series.iter().enumerate() {
            let color = Palette99::pick(i).to_rgba();
            chart
                .draw_series(LineSeries::new(
                    x.iter()
                        .zip(y.iter())
                        .filter(|p| p.1.is_finite())
                        .map(|(a, b)| (*a, *b)),
                    color.stroke_width(2),
                ))?
                .label(*label)
                .legend(move |(px, py)| {
                    PathElement::new([(px, py), (px + 18, py)], color.stroke_width(2))
                });
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()?;
        root.present()?;
        Ok(())
    };
    draw().map_err(|e| MrlsError::io(path, std::io::Error::other(e.to_string())))
}

fn bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-9);
    (lo - pad, hi + pad)
}
