//! Spectral-efficiency curves: C/W against SNR and C/W against Eb/N0, with
//! CSV, JSON and SVG emitters.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::comparison::{awgn_ebn0, awgn_spectral_efficiency, gallager_spectral_efficiency, GaussianFilterSpec};
use crate::error::{invalid, Error, Result};
use crate::heat::{ebn0_from_snr, spectral_efficiency};
use crate::quadrature::QuadratureSpec;
use crate::w0::ToleranceConfig;

/// Significant digits written to CSV and JSON.
pub const SIGNIFICANT_DIGITS: usize = 13;

pub const CSV_COLUMNS: [&str; 7] = [
    "snr_db",
    "snr",
    "se_heat",
    "se_awgn",
    "se_gallager",
    "ebn0_heat_db",
    "ebn0_awgn_db",
];

/// Sample spacing of a sweep. Only linear-in-dB is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    LinearDb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    snr_min_db: f64,
    snr_max_db: f64,
    points: usize,
    spacing: Spacing,
}

impl SweepSpec {
    pub const DEFAULT_MIN_DB: f64 = -30.0;
    pub const DEFAULT_MAX_DB: f64 = 30.0;
    pub const DEFAULT_POINTS: usize = 121;

    pub fn new(snr_min_db: f64, snr_max_db: f64, points: usize) -> Result<Self> {
        if !(snr_min_db.is_finite() && snr_max_db.is_finite()) {
            return Err(invalid("sweep", "dB limits must be finite"));
        }
        if !(snr_min_db < snr_max_db) {
            return Err(invalid(
                "sweep",
                format!("snr_min_db ({snr_min_db}) must be below snr_max_db ({snr_max_db})"),
            ));
        }
        if points < 2 {
            return Err(invalid("sweep", format!("need at least 2 points, got {points}")));
        }
        Ok(Self {
            snr_min_db,
            snr_max_db,
            points,
            spacing: Spacing::LinearDb,
        })
    }

    pub fn snr_min_db(&self) -> f64 {
        self.snr_min_db
    }

    pub fn snr_max_db(&self) -> f64 {
        self.snr_max_db
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Sample positions in dB, increasing, endpoints exact.
    pub fn snr_db_grid(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        let span = self.snr_max_db - self.snr_min_db;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.snr_max_db
                } else {
                    self.snr_min_db + span * (i as f64 / last)
                }
            })
            .collect()
    }
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            snr_min_db: Self::DEFAULT_MIN_DB,
            snr_max_db: Self::DEFAULT_MAX_DB,
            points: Self::DEFAULT_POINTS,
            spacing: Spacing::LinearDb,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub snr: f64,
    pub se_heat: f64,
    pub se_awgn: f64,
    pub se_gallager: Option<f64>,
    pub ebn0_heat_db: f64,
    pub ebn0_awgn_db: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Which figure a point set is rendered as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Figure {
    /// C/W against SNR (dB).
    SeVsSnr,
    /// C/W against Eb/N0 (dB), traced parametrically in SNR.
    SeVsEbn0,
}

impl Figure {
    pub fn number(&self) -> u8 {
        match self {
            Figure::SeVsSnr => 2,
            Figure::SeVsEbn0 => 3,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            2 => Ok(Figure::SeVsSnr),
            3 => Ok(Figure::SeVsEbn0),
            _ => Err(invalid("figure", format!("expected 2 or 3, got {n}"))),
        }
    }

    pub fn default_axes(&self) -> AxesSpec {
        match self {
            Figure::SeVsSnr => AxesSpec {
                title: "C/W against SNR".into(),
                x_label: "SNR (dB)".into(),
                y_label: "C/W (bit/s/Hz)".into(),
                y_log: false,
            },
            Figure::SeVsEbn0 => AxesSpec {
                title: "C/W against Eb/N0".into(),
                x_label: "Eb/N0 (dB)".into(),
                y_label: "C/W (bit/s/Hz)".into(),
                y_log: false,
            },
        }
    }
}

fn curve_point(snr_db: f64, gallager: Option<&GaussianFilterSpec>) -> Result<CurvePoint> {
    let snr = db_to_linear(snr_db);
    Ok(CurvePoint {
        snr_db,
        snr,
        se_heat: spectral_efficiency(snr)?,
        se_awgn: awgn_spectral_efficiency(snr)?,
        se_gallager: gallager.map(|g| gallager_spectral_efficiency(g, snr)).transpose()?,
        ebn0_heat_db: linear_to_db(ebn0_from_snr(snr)?),
        ebn0_awgn_db: linear_to_db(awgn_ebn0(snr)?),
    })
}

fn sweep(spec: &SweepSpec, gallager: Option<&GaussianFilterSpec>) -> Result<Vec<CurvePoint>> {
    spec.snr_db_grid()
        .into_par_iter()
        .map(|db| curve_point(db, gallager))
        .collect()
}

/// Points for C/W against SNR, in increasing SNR.
pub fn generate_fig2(spec: &SweepSpec, gallager: Option<&GaussianFilterSpec>) -> Result<Vec<CurvePoint>> {
    sweep(spec, gallager)
}

/// Points for C/W against Eb/N0. Both coordinates of each point come from
/// the same SNR parameter; points are ordered by increasing SNR.
pub fn generate_fig3(spec: &SweepSpec, gallager: Option<&GaussianFilterSpec>) -> Result<Vec<CurvePoint>> {
    sweep(spec, gallager)
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest decimal text of [`round_sig`]`(x)`.
pub fn format_number(x: f64) -> String {
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn to_csv(points: &[CurvePoint]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for p in points {
        let gallager = p.se_gallager.map(format_number).unwrap_or_default();
        let cells = [
            format_number(p.snr_db),
            format_number(p.snr),
            format_number(p.se_heat),
            format_number(p.se_awgn),
            gallager,
            format_number(p.ebn0_heat_db),
            format_number(p.ebn0_awgn_db),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Generation parameters echoed into JSON output.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMetadata {
    pub figure: Figure,
    pub sweep: SweepSpec,
    pub gallager: Option<GaussianFilterSpec>,
    pub tolerance: ToleranceConfig,
    pub quadrature: QuadratureSpec,
    /// Effective configuration (flags merged over config file).
    pub config: BTreeMap<String, String>,
    /// Seconds since the Unix epoch; `None` for deterministic output.
    pub generated_unix_s: Option<u64>,
}

impl CurveMetadata {
    pub fn new(figure: Figure, sweep: SweepSpec, gallager: Option<GaussianFilterSpec>) -> Self {
        Self {
            figure,
            sweep,
            gallager,
            tolerance: ToleranceConfig::default(),
            quadrature: QuadratureSpec::default(),
            config: BTreeMap::new(),
            generated_unix_s: None,
        }
    }

    fn to_json(&self) -> Value {
        let axes = self.figure.default_axes();
        let gallager = self.gallager.map(|g| {
            json!({
                "label": "illustrative",
                "beta_g": g.beta_g(),
                "n0": g.n0(),
                "exponent": round_sig(g.exponent()),
                "power_response": "exp(-exponent * f^2 / beta_g^2)",
                "snr_convention": "P / ((beta_g / 2) * n0)",
            })
        });
        let mut meta = json!({
            "tool": "heatcap",
            "version": env!("CARGO_PKG_VERSION"),
            "figure": self.figure.number(),
            "sweep": {
                "snr_min_db": self.sweep.snr_min_db,
                "snr_max_db": self.sweep.snr_max_db,
                "points": self.sweep.points,
                "spacing": self.sweep.spacing,
            },
            "axes": {
                "x": axes.x_label,
                "x_scale": "linear (dB)",
                "y": axes.y_label,
                "y_scale": if axes.y_log { "log" } else { "linear" },
            },
            "snr_units": "linear power ratio; snr_db = 10 log10(snr)",
            "heat_channel": {
                "spectral_efficiency": "w0(4 pi snr)^2 log2(e) / (2 pi)",
                "bandwidth": "beta / 2",
                "duration": "2 pi alpha",
            },
            "gallager": gallager,
            "tolerances": {
                "w0_rel_tol": self.tolerance.rel_tol(),
                "w0_max_iter": self.tolerance.max_iter(),
                "quad_abs_tol": self.quadrature.abs_tol(),
                "quad_max_refinements": self.quadrature.max_refinements(),
            },
            "significant_digits": SIGNIFICANT_DIGITS,
            "config": self.config,
        });
        if let Some(t) = self.generated_unix_s {
            meta["generated_unix_s"] = json!(t);
        }
        meta
    }
}

fn point_json(p: &CurvePoint) -> Value {
    json!({
        "snr_db": round_sig(p.snr_db),
        "snr": round_sig(p.snr),
        "se_heat": round_sig(p.se_heat),
        "se_awgn": round_sig(p.se_awgn),
        "se_gallager": p.se_gallager.map(round_sig),
        "ebn0_heat_db": round_sig(p.ebn0_heat_db),
        "ebn0_awgn_db": round_sig(p.ebn0_awgn_db),
    })
}

pub fn to_json(points: &[CurvePoint], meta: &CurveMetadata) -> String {
    let doc = json!({
        "metadata": meta.to_json(),
        "points": points.iter().map(point_json).collect::<Vec<_>>(),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxesSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub y_log: bool,
}

const SVG_WIDTH: f64 = 800.0;
const SVG_HEIGHT: f64 = 600.0;
const PLOT_LEFT: f64 = 80.0;
const PLOT_RIGHT: f64 = 770.0;
const PLOT_TOP: f64 = 50.0;
const PLOT_BOTTOM: f64 = 530.0;

struct Series {
    name: &'static str,
    color: &'static str,
    dash: Option<&'static str>,
    xy: Vec<(f64, f64)>,
}

fn series_for(points: &[CurvePoint], figure: Figure) -> Vec<Series> {
    let x_heat = |p: &CurvePoint| match figure {
        Figure::SeVsSnr => p.snr_db,
        Figure::SeVsEbn0 => p.ebn0_heat_db,
    };
    let x_awgn = |p: &CurvePoint| match figure {
        Figure::SeVsSnr => p.snr_db,
        Figure::SeVsEbn0 => p.ebn0_awgn_db,
    };
    let mut series = vec![
        Series {
            name: "heat channel",
            color: "#c0392b",
            dash: None,
            xy: points.iter().map(|p| (x_heat(p), p.se_heat)).collect(),
        },
        Series {
            name: "AWGN",
            color: "#1f4e9c",
            dash: Some("6,4"),
            xy: points.iter().map(|p| (x_awgn(p), p.se_awgn)).collect(),
        },
    ];
    if points.iter().all(|p| p.se_gallager.is_some()) && !points.is_empty() {
        // Eb/N0 for the Gaussian filter follows from its own C/W
        let xy = points
            .iter()
            .filter_map(|p| {
                let se = p.se_gallager?;
                let x = match figure {
                    Figure::SeVsSnr => p.snr_db,
                    Figure::SeVsEbn0 if se > 0.0 => linear_to_db(p.snr / se),
                    Figure::SeVsEbn0 => return None,
                };
                Some((x, se))
            })
            .collect();
        series.push(Series {
            name: "Gaussian filter (illustrative)",
            color: "#2e8b57",
            dash: Some("2,3"),
            xy,
        });
    }
    series
}

/// Round numbers spanning `[lo, hi]`, about six of them.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 7.0)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Self-contained SVG 1.1 rendering, one polyline per series.
pub fn to_svg(points: &[CurvePoint], figure: Figure, axes: &AxesSpec) -> Result<String> {
    if points.is_empty() {
        return Err(invalid("curve", "no points to render"));
    }
    let series = series_for(points, figure);
    let y_map = |y: f64| if axes.y_log { y.log10() } else { y };
    let usable = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (!axes.y_log || y > 0.0);

    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in series.iter().flat_map(|s| s.xy.iter()).filter(|p| usable(p)) {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y_map(y));
        y_hi = y_hi.max(y_map(y));
    }
    if !axes.y_log {
        y_lo = y_lo.min(0.0);
    }
    if !(x_hi > x_lo) {
        x_hi = x_lo + 1.0;
    }
    if !(y_hi > y_lo) {
        y_hi = y_lo + 1.0;
    }
    let pad = 0.05 * (y_hi - y_lo);
    y_hi += pad;
    if axes.y_log {
        y_lo -= pad;
    }

    let px = |x: f64| PLOT_LEFT + (x - x_lo) / (x_hi - x_lo) * (PLOT_RIGHT - PLOT_LEFT);
    let py = |y: f64| PLOT_BOTTOM - (y - y_lo) / (y_hi - y_lo) * (PLOT_BOTTOM - PLOT_TOP);

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    )
    .unwrap();
    writeln!(
        w,
        r#"<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="{:.1}" y="30" text-anchor="middle" font-family="sans-serif" font-size="18">{}</text>"#,
        0.5 * (PLOT_LEFT + PLOT_RIGHT),
        escape(&axes.title)
    )
    .unwrap();

    // grid and ticks
    writeln!(w, r##"<g stroke="#dddddd" stroke-width="1">"##).unwrap();
    let x_ticks = nice_ticks(x_lo, x_hi);
    let y_ticks = nice_ticks(y_lo, y_hi);
    for &t in &x_ticks {
        writeln!(
            w,
            r#"<line x1="{0:.2}" y1="{PLOT_TOP}" x2="{0:.2}" y2="{PLOT_BOTTOM}"/>"#,
            px(t)
        )
        .unwrap();
    }
    for &t in &y_ticks {
        writeln!(
            w,
            r#"<line x1="{PLOT_LEFT}" y1="{0:.2}" x2="{PLOT_RIGHT}" y2="{0:.2}"/>"#,
            py(t)
        )
        .unwrap();
    }
    writeln!(w, "</g>").unwrap();
    writeln!(
        w,
        r#"<rect x="{PLOT_LEFT}" y="{PLOT_TOP}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        PLOT_RIGHT - PLOT_LEFT,
        PLOT_BOTTOM - PLOT_TOP
    )
    .unwrap();
    writeln!(w, r#"<g font-family="sans-serif" font-size="12">"#).unwrap();
    for &t in &x_ticks {
        writeln!(
            w,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            px(t),
            PLOT_BOTTOM + 18.0,
            tick_label(t)
        )
        .unwrap();
    }
    for &t in &y_ticks {
        let label = if axes.y_log {
            format!("1e{}", tick_label(t))
        } else {
            tick_label(t)
        };
        writeln!(
            w,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            PLOT_LEFT - 8.0,
            py(t) + 4.0,
            label
        )
        .unwrap();
    }
    writeln!(w, "</g>").unwrap();
    writeln!(
        w,
        r#"<text x="{:.1}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        0.5 * (PLOT_LEFT + PLOT_RIGHT),
        SVG_HEIGHT - 25.0,
        escape(&axes.x_label)
    )
    .unwrap();
    let y_mid = 0.5 * (PLOT_TOP + PLOT_BOTTOM);
    writeln!(
        w,
        r#"<text x="25" y="{y_mid:.1}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 25 {y_mid:.1})">{}</text>"#,
        escape(&axes.y_label)
    )
    .unwrap();

    if figure == Figure::SeVsEbn0 {
        let limit = linear_to_db(std::f64::consts::LN_2);
        if (x_lo..=x_hi).contains(&limit) {
            writeln!(
                w,
                r##"<line x1="{0:.2}" y1="{PLOT_TOP}" x2="{0:.2}" y2="{PLOT_BOTTOM}" stroke="#888888" stroke-width="1" stroke-dasharray="4,4"/>"##,
                px(limit)
            )
            .unwrap();
        }
    }

    for s in &series {
        let pts: Vec<String> =
            s.xy.iter()
                .filter(|p| usable(p))
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y_map(y))))
                .collect();
        let dash = s
            .dash
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        writeln!(
            w,
            r#"<polyline fill="none" stroke="{}" stroke-width="2"{dash} points="{}"/>"#,
            s.color,
            pts.join(" ")
        )
        .unwrap();
    }

    // legend
    for (i, s) in series.iter().enumerate() {
        let y = PLOT_TOP + 20.0 + 20.0 * i as f64;
        let dash = s
            .dash
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        writeln!(
            w,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"{dash}/>"#,
            PLOT_LEFT + 15.0,
            PLOT_LEFT + 45.0,
            s.color
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            PLOT_LEFT + 52.0,
            y + 4.0,
            escape(s.name)
        )
        .unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(svg)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn require_points(points: &[CurvePoint]) -> Result<()> {
    if points.is_empty() {
        return Err(invalid("curve", "no points to emit"));
    }
    Ok(())
}

pub fn emit_csv(points: &[CurvePoint], path: &Path) -> Result<()> {
    require_points(points)?;
    write_file(path, &to_csv(points))
}

pub fn emit_json(points: &[CurvePoint], meta: &CurveMetadata, path: &Path) -> Result<()> {
    require_points(points)?;
    write_file(path, &to_json(points, meta))
}

pub fn emit_svg(points: &[CurvePoint], figure: Figure, axes: &AxesSpec, path: &Path) -> Result<()> {
    write_file(path, &to_svg(points, figure, axes)?)
}
