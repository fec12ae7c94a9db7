//! SVG curves and the CSV behind them, one file pair per plot spec.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Mode, Model};
use crate::error::{Error, Result};
use crate::harness::{aggregate, Aggregate, RunOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    QVsPower,
    BerVsOsnr,
    QVsTaps,
}

impl PlotKind {
    fn axes(self) -> (&'static str, &'static str) {
        match self {
            PlotKind::QVsPower => ("launch power (dBm)", "Q (dB)"),
            PlotKind::BerVsOsnr => ("OSNR (dB)", "log10 BER"),
            PlotKind::QVsTaps => ("equalizer taps", "Q (dB)"),
        }
    }

    fn x(self, a: &Aggregate) -> Option<f64> {
        match self {
            PlotKind::QVsPower => Some(a.power_dbm),
            PlotKind::BerVsOsnr => a.osnr_db,
            PlotKind::QVsTaps => a.n_taps.map(|n| n as f64),
        }
    }

    fn y(self, a: &Aggregate) -> Option<f64> {
        match self {
            PlotKind::BerVsOsnr => (a.ber > 0.0).then(|| a.ber.log10()),
            _ => a.q_db,
        }
    }
}

/// Which aggregates to draw. Empty lists match everything.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Selection {
    pub experiment_id: Vec<String>,
    pub mode: Vec<Mode>,
    pub model: Vec<Model>,
    pub n_polarizations: Vec<usize>,
}

impl Selection {
    fn matches(&self, a: &Aggregate) -> bool {
        (self.experiment_id.is_empty() || self.experiment_id.contains(&a.experiment_id))
            && (self.mode.is_empty() || self.mode.contains(&a.mode))
            && (self.model.is_empty() || self.model.contains(&a.model))
            && (self.n_polarizations.is_empty()
                || self.n_polarizations.contains(&a.n_polarizations))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotSpec {
    pub kind: PlotKind,
    /// Output path without extension; `.svg` and `.csv` are appended.
    pub output: PathBuf,
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub select: Selection,
}

impl PlotSpec {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(format!("plot spec: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

/// One curve: label and points sorted by x.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<Aggregate>,
}

fn label(kind: PlotKind, a: &Aggregate) -> String {
    let mut s = a.experiment_id.clone();
    if kind != PlotKind::QVsPower {
        let _ = write!(s, " {} dBm", a.power_dbm);
    }
    if let (Some(o), false) = (a.osnr_db, kind == PlotKind::BerVsOsnr) {
        let _ = write!(s, " OSNR {o} dB");
    }
    if let (Some(t), false) = (a.n_taps, kind == PlotKind::QVsTaps) {
        let _ = write!(s, " {t} taps");
    }
    s
}

/// Aggregates from a records file, recomputed from realizations when the
/// file holds none.
pub fn aggregates_of(run: &RunOutput) -> Vec<Aggregate> {
    if run.aggregates.is_empty() {
        aggregate(&run.records)
    } else {
        run.aggregates.clone()
    }
}

pub fn select_series(run: &RunOutput, spec: &PlotSpec) -> Result<Vec<Series>> {
    let mut series: Vec<Series> = Vec::new();
    for a in aggregates_of(run) {
        if !spec.select.matches(&a) || spec.kind.x(&a).is_none() {
            continue;
        }
        let l = label(spec.kind, &a);
        match series.iter_mut().find(|s| s.label == l) {
            Some(s) => s.points.push(a),
            None => series.push(Series {
                label: l,
                points: vec![a],
            }),
        }
    }
    if series.is_empty() {
        return Err(Error::Config("plot: empty selection".into()));
    }
    for s in &mut series {
        s.points
            .sort_by(|a, b| spec.kind.x(a).partial_cmp(&spec.kind.x(b)).unwrap());
    }
    Ok(series)
}

pub fn to_csv(kind: PlotKind, series: &[Series]) -> String {
    let (xn, yn) = match kind {
        PlotKind::QVsPower => ("power_dbm", "q_db"),
        PlotKind::BerVsOsnr => ("osnr_db", "log10_ber"),
        PlotKind::QVsTaps => ("n_taps", "q_db"),
    };
    let mut s = format!(
        "series,{xn},{yn},ber,ci_low,ci_high,bit_errors,bits_compared,evm_db,n_ok,n_failed\n"
    );
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for c in series {
        for a in &c.points {
            let _ = writeln!(
                s,
                "\"{}\",{},{},{},{},{},{},{},{},{},{}",
                c.label.replace('"', "\"\""),
                opt(kind.x(a)),
                opt(kind.y(a)),
                a.ber,
                a.ci_low,
                a.ci_high,
                a.bit_errors,
                a.bits_compared,
                opt(a.evm_db),
                a.n_ok,
                a.n_failed
            );
        }
    }
    s
}

fn padded(lo: f64, hi: f64) -> std::ops::Range<f64> {
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
    lo - pad..hi + pad
}

fn draw(path: &Path, spec: &PlotSpec, series: &[Series]) -> std::result::Result<(), String> {
    let kind = spec.kind;
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter_map(|a| Some((kind.x(a)?, kind.y(a)?)))
                .collect()
        })
        .collect();
    let all = || pts.iter().flatten();
    let xs = all()
        .map(|p| p.0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
            (l.min(v), h.max(v))
        });
    let ys = all()
        .map(|p| p.1)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
            (l.min(v), h.max(v))
        });
    let (xs, ys) = if xs.0.is_finite() {
        (xs, ys)
    } else {
        ((0.0, 1.0), (0.0, 1.0))
    };
    let root = SVGBackend::new(path, (800, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| e.to_string())?;
    let title = spec.title.clone().unwrap_or_else(|| format!("{kind:?}"));
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(56)
        .build_cartesian_2d(padded(xs.0, xs.1), padded(ys.0, ys.1))
        .map_err(|e| e.to_string())?;
    let (xd, yd) = kind.axes();
    chart
        .configure_mesh()
        .x_desc(xd)
        .y_desc(yd)
        .draw()
        .map_err(|e| e.to_string())?;
    for (i, (s, p)) in series.iter().zip(&pts).enumerate() {
        let color = Palette99::pick(i).to_rgba();
        if p.len() > 1 {
            chart
                .draw_series(LineSeries::new(p.clone(), color.stroke_width(2)))
                .map_err(|e| e.to_string())?;
        }
        chart
            .draw_series(p.iter().map(|&q| Circle::new(q, 4, color.filled())))
            .map_err(|e| e.to_string())?
            .label(s.label.clone())
            .legend(move |(x, y)| Circle::new((x + 8, y), 4, color.filled()));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE)
        .border_style(BLACK)
        .draw()
        .map_err(|e| e.to_string())?;
    root.present().map_err(|e| e.to_string())
}

/// Writes `<output>.svg` and `<output>.csv` and returns their paths.
pub fn emit_plot(run: &RunOutput, spec: &PlotSpec) -> Result<(PathBuf, PathBuf)> {
    let series = select_series(run, spec)?;
    let svg = spec.output.with_extension("svg");
    let csv = spec.output.with_extension("csv");
    if let Some(dir) = svg.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    draw(&svg, spec, &series).map_err(|e| Error::io(&svg, std::io::Error::other(e)))?;
    fs::write(&csv, to_csv(spec.kind, &series)).map_err(|e| Error::io(&csv, e))?;
    Ok((svg, csv))
}
