//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line; exits nonzero if any fails.
//!
//! Set `HEATCAP_UPDATE_GOLDENS=1` to rewrite the golden fixtures.

use std::f64::consts::{LN_2, LOG2_E};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::time::Instant;

use heatcap::comparison::{awgn_ebn0, frequency_waterfill, FilterProfile};
use heatcap::curve::{generate_fig2, generate_fig3, to_svg, Figure, SweepSpec, CSV_COLUMNS};
use heatcap::heat::{
    capacity_closed_form, capacity_exact_discrete, capacity_quadrature, ebn0_from_snr, rate_bits_per_second,
    relative_spread, snr_to_energy, spectral_efficiency,
};
use heatcap::validate::{example_snr, EXAMPLE_ALPHA, EXAMPLE_BETA};
use heatcap::w0::{forward_map, w0_default};
use heatcap::waterfill::QuadraturePath;
use heatcap::{HeatChannelGeometry, QuadratureSpec};

type Criterion = fn() -> Outcome;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

/// Fold sub-checks into one outcome so a single failure does not hide the rest.
fn combine(parts: Vec<(bool, String)>) -> Outcome {
    let passed = parts.iter().all(|(ok, _)| *ok);
    let detail = parts
        .into_iter()
        .map(|(ok, d)| if ok { d } else { format!("{d} <-- FAIL") })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome::new(passed, detail)
}

fn example_geometry() -> HeatChannelGeometry {
    HeatChannelGeometry::new(EXAMPLE_ALPHA, EXAMPLE_BETA, 1.0).unwrap()
}

fn example_reproduction() -> Outcome {
    let start = Instant::now();
    let geom = example_geometry();
    let s = snr_to_energy(&geom, example_snr()).unwrap();
    let r = capacity_exact_discrete(&geom, s).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let bits = r.capacity_bits();
    let rel = (bits / 64.59 - 1.0).abs();
    combine(vec![
        (r.active_count == 30, format!("K = {}", r.active_count)),
        (rel <= 0.005, format!("C = {bits:.4} bits, rel err {rel:.3e} (<= 5e-3)")),
        (elapsed < 1.0, format!("{elapsed:.3e} s (< 1 s)")),
    ])
}

fn closed_form_cross_check() -> Outcome {
    let geom = example_geometry();
    let s = snr_to_energy(&geom, example_snr()).unwrap();
    let closed_bits = capacity_closed_form(&geom, s).unwrap() * LOG2_E;
    let direct_bits = 0.5 * geom.tbp() * w0_default(2000.0).unwrap().powi(2) * LOG2_E;
    let discrete_bits = capacity_exact_discrete(&geom, s).unwrap().capacity_bits();
    let gap = relative_spread(closed_bits, discrete_bits);

    let gaps: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&tbp| {
            let g = HeatChannelGeometry::from_tbp(tbp, 1.0).unwrap();
            let s = 2000.0 * 0.5 * tbp;
            let closed = capacity_closed_form(&g, s).unwrap();
            let discrete = capacity_exact_discrete(&g, s).unwrap().capacity_nats;
            relative_spread(closed, discrete)
        })
        .collect();
    combine(vec![
        (
            (64.5..=65.0).contains(&direct_bits) && (direct_bits - closed_bits).abs() < 1e-9,
            format!("closed form {direct_bits:.4} bits in [64.5, 65.0]"),
        ),
        (gap <= 0.01, format!("closed/discrete gap {gap:.3e} (<= 1e-2)")),
        (
            gaps[0] > gaps[1] && gaps[1] > gaps[2],
            format!(
                "gaps at tbp 10/100/1000: {:.2e} {:.2e} {:.2e}",
                gaps[0], gaps[1], gaps[2]
            ),
        ),
        (gaps[2] <= 5e-4, format!("gap at 1000 {:.2e} (<= 5e-4)", gaps[2])),
    ])
}

fn quadrature_fidelity() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut worst = 0.0_f64;
    for (tbp, normalized) in [(2.0, 1.0), (10.0, 2000.0), (100.0, 10.0)] {
        let geom = HeatChannelGeometry::from_tbp(tbp, 1.0).unwrap();
        let s = normalized * 0.5 * tbp;
        let closed = capacity_closed_form(&geom, s).unwrap();
        for path in [QuadraturePath::Collapsed, QuadraturePath::TensorGrid] {
            let q = capacity_quadrature(&geom, s, &spec, path).unwrap().capacity_nats;
            worst = worst.max(relative_spread(closed, q));
        }
    }
    Outcome::new(
        worst <= 1e-8,
        format!("worst rel err {worst:.3e} over 3 points x 2 paths (<= 1e-8)"),
    )
}

fn w0_inverse_property() -> Outcome {
    let ys: Vec<f64> = (0..1000).map(|i| 10f64.powf(-9.0 + 18.0 * i as f64 / 999.0)).collect();
    let start = Instant::now();
    let xs: Vec<f64> = ys.iter().map(|&y| w0_default(y).unwrap()).collect();
    let elapsed = start.elapsed().as_secs_f64();
    let worst = ys
        .iter()
        .zip(&xs)
        .map(|(&y, &x)| (forward_map(x).unwrap() - y).abs() / y.max(1.0))
        .fold(0.0_f64, f64::max);
    combine(vec![
        (worst <= 1e-12, format!("worst scaled residual {worst:.3e} (<= 1e-12)")),
        (elapsed < 0.1, format!("{elapsed:.3e} s for 1000 inversions (< 0.1 s)")),
    ])
}

fn low_snr_limit() -> Outcome {
    let heat = ebn0_from_snr(1e-6).unwrap();
    let awgn = awgn_ebn0(1e-6).unwrap();
    let floor_db = -1.5927;
    let sweep = SweepSpec::default();
    let points = generate_fig3(&sweep, None).unwrap();
    let min_heat = points.iter().map(|p| p.ebn0_heat_db).fold(f64::INFINITY, f64::min);
    let min_awgn = points.iter().map(|p| p.ebn0_awgn_db).fold(f64::INFINITY, f64::min);
    combine(vec![
        (
            (heat - LN_2).abs() <= 1e-4,
            format!(
                "heat |Eb/N0 - ln 2| = {:.3e} at snr 1e-6 (<= 1e-4)",
                (heat - LN_2).abs()
            ),
        ),
        (
            (awgn - LN_2).abs() <= 1e-4,
            format!("AWGN |Eb/N0 - ln 2| = {:.3e} (<= 1e-4)", (awgn - LN_2).abs()),
        ),
        (
            min_heat >= floor_db,
            format!("heat min {min_heat:.4} dB (>= {floor_db})"),
        ),
        (
            min_awgn >= floor_db,
            format!("AWGN min {min_awgn:.4} dB (>= {floor_db})"),
        ),
    ])
}

fn parametric_consistency() -> Outcome {
    let sweep = SweepSpec::default();
    let geoms = [example_geometry(), HeatChannelGeometry::new(3e-6, 7e4, 0.25).unwrap()];
    let mut worst = 0.0_f64;
    for geom in &geoms {
        for db in sweep.snr_db_grid() {
            let snr = 10f64.powf(db / 10.0);
            let rate = rate_bits_per_second(geom, snr).unwrap();
            let se = spectral_efficiency(snr).unwrap();
            worst = worst.max(relative_spread(rate / geom.bandwidth(), se));
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!(
            "worst rel diff {worst:.3e} over {} points x 2 geometries (<= 1e-12)",
            sweep.points()
        ),
    )
}

fn dominance() -> Outcome {
    let points = generate_fig2(&SweepSpec::default(), None).unwrap();
    let violations = points.iter().filter(|p| p.se_heat > p.se_awgn).count();
    let min_margin = points
        .iter()
        .map(|p| p.se_awgn - p.se_heat)
        .fold(f64::INFINITY, f64::min);
    Outcome::new(
        violations == 0,
        format!(
            "{violations} violations over {} points, min margin {min_margin:.3e}",
            points.len()
        ),
    )
}

fn flat_filter_reduction() -> Outcome {
    let quad = QuadratureSpec::default();
    let mut worst = 0.0_f64;
    for (band, n0, power) in [(1.0, 1.0, 1.0), (2e9, 4e-21, 5e-10), (3.0, 0.5, 0.01)] {
        let r = frequency_waterfill(&FilterProfile::Flat { half_band: band }, n0, power, &quad).unwrap();
        let shannon = band * (1.0 + power / (n0 * band)).log2();
        worst = worst.max(relative_spread(r.capacity_bits_per_s, shannon));
    }
    Outcome::new(
        worst <= 1e-10,
        format!("worst rel err {worst:.3e} over 3 triples (<= 1e-10)"),
    )
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

fn run_curve(out_dir: &Path) -> std::io::Result<bool> {
    let status = Command::new(env!("CARGO_BIN_EXE_heatcap"))
        .args([
            "curve",
            "--fig",
            "2",
            "--fig",
            "3",
            "--gallager",
            "--deterministic",
            "--out-dir",
        ])
        .arg(out_dir)
        .env_remove("HEATCAP_CONFIG")
        .stdout(Stdio::null())
        .status()?;
    Ok(status.success())
}

fn golden_svgs() -> Vec<(String, String)> {
    let sweep = SweepSpec::new(-20.0, 25.0, 16).unwrap();
    [Figure::SeVsSnr, Figure::SeVsEbn0]
        .into_iter()
        .map(|fig| {
            let points = match fig {
                Figure::SeVsSnr => generate_fig2(&sweep, None),
                Figure::SeVsEbn0 => generate_fig3(&sweep, None),
            }
            .unwrap();
            let svg = to_svg(&points, fig, &fig.default_axes()).unwrap();
            (format!("fig{}_16pt.svg", fig.number()), svg)
        })
        .collect()
}

fn determinism_and_goldens() -> Outcome {
    let mut parts = Vec::new();

    // same output directory both times, since the metadata echoes it
    const OUTPUTS: [&str; 6] = ["fig2.csv", "fig2.json", "fig2.svg", "fig3.csv", "fig3.json", "fig3.svg"];
    let snapshot = |dir: &Path| -> Vec<Option<Vec<u8>>> {
        OUTPUTS.iter().map(|name| std::fs::read(dir.join(name)).ok()).collect()
    };
    let a = tempfile::tempdir().unwrap();
    let first = run_curve(a.path()).unwrap_or(false).then(|| snapshot(a.path()));
    let second = run_curve(a.path()).unwrap_or(false).then(|| snapshot(a.path()));
    let files = match (&first, &second) {
        (Some(x), Some(y)) => x.iter().zip(y).filter(|(p, q)| p.is_some() && p == q).count(),
        _ => 0,
    };
    let identical = files == OUTPUTS.len();
    parts.push((identical, format!("{files}/6 outputs byte-identical across runs")));

    let update = std::env::var_os("HEATCAP_UPDATE_GOLDENS").is_some();
    let dir = fixtures_dir();

    let header_path = dir.join("curve_header.csv");
    let expected_header = CSV_COLUMNS.join(",");
    if update {
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(&header_path, format!("{expected_header}\n")).unwrap();
    }
    let stored_header = std::fs::read_to_string(&header_path).unwrap_or_default();
    let produced_header = std::fs::read_to_string(a.path().join("fig2.csv"))
        .ok()
        .and_then(|s| s.lines().next().map(str::to_string))
        .unwrap_or_default();
    parts.push((
        stored_header.trim_end() == produced_header && produced_header == expected_header,
        "CSV header matches stored schema".to_string(),
    ));

    let mut matched = 0;
    let goldens = golden_svgs();
    for (name, svg) in &goldens {
        let path = dir.join(name);
        if update {
            std::fs::write(&path, svg).unwrap();
        }
        if std::fs::read_to_string(&path).map(|s| &s == svg).unwrap_or(false) {
            matched += 1;
        }
    }
    parts.push((
        matched == goldens.len(),
        format!("{matched}/{} SVG goldens match", goldens.len()),
    ));
    combine(parts)
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("example reproduction", example_reproduction),
        ("closed-form cross-check", closed_form_cross_check),
        ("quadrature fidelity", quadrature_fidelity),
        ("w0 inverse property", w0_inverse_property),
        ("low-SNR limit", low_snr_limit),
        ("parametric consistency", parametric_consistency),
        ("dominance", dominance),
        ("flat-filter reduction", flat_filter_reduction),
        ("determinism and goldens", determinism_and_goldens),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {name}: {}", i + 1, outcome.detail);
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
