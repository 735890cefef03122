//! `heatcap` command line.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or domain error,
//! 3 I/O error. Options may also come from a `key = value` config file
//! (`--config` or `HEATCAP_CONFIG`); flags win over the file.

use std::collections::BTreeMap;
use std::f64::consts::LOG2_E;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::comparison::GaussianFilterSpec;
use crate::curve::{
    db_to_linear, emit_csv, emit_json, emit_svg, generate_fig2, generate_fig3, to_csv, CurveMetadata, Figure, SweepSpec,
};
use crate::error::Error;
use crate::heat::{capacity_exact_discrete, snr_to_energy, CapacityReport, HeatChannelGeometry, MethodSet};
use crate::quadrature::QuadratureSpec;
use crate::validate::{self, ValidateOptions};
use crate::w0::{w0, ToleranceConfig};
use crate::waterfill::QuadraturePath;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const CONFIG_ENV: &str = "HEATCAP_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "heatcap", version, about = "Heat-channel capacity toolkit")]
pub struct Cli {
    /// Config file of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate w0, the inverse of y = (2x - 1) e^{2x} + 1 (Eq. 1).
    W0 {
        #[arg(allow_negative_numbers = true)]
        y: f64,
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// Capacity per transmission: closed form (Eq. 1), eigenmode water-filling, quadrature.
    Capacity(CapacityArgs),
    /// Reproduce the worked example: alpha = 50 ps, beta = 200 GHz, SNR = 1000/(2 pi) (Fig. 7 caption).
    Example {
        #[arg(long)]
        json: bool,
    },
    /// C/W against SNR (Fig. 2, Eq. 2) or against Eb/N0 (Fig. 3, Eqs. 3a/3b).
    Curve(CurveArgs),
    /// Run the cross-method invariant suite.
    Validate {
        #[arg(long)]
        json: bool,
        /// Relative error injected into closed-form capacities (testing the suite).
        #[arg(long, hide = true)]
        perturb: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Discrete,
    Quadrature,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathArg {
    Collapsed,
    Grid,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    /// Time scale alpha in seconds.
    #[arg(long)]
    alpha: Option<f64>,
    /// Frequency scale beta in hertz.
    #[arg(long)]
    beta: Option<f64>,
    /// Noise parameter theta^2 (default 1).
    #[arg(long)]
    theta2: Option<f64>,
    /// Linear SNR = P / (W N0).
    #[arg(long, conflicts_with_all = ["snr_db", "energy"])]
    snr: Option<f64>,
    #[arg(long, conflicts_with = "energy", allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Input energy S per transmission.
    #[arg(long)]
    energy: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long, value_enum)]
    quad_path: Option<PathArg>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    consistency_bound: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Figure: 2 (C/W vs SNR) or 3 (C/W vs Eb/N0). Repeatable with --out-dir.
    #[arg(long = "fig")]
    figs: Vec<u8>,
    #[arg(long, allow_negative_numbers = true)]
    snr_min_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    snr_max_db: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Add the illustrative Gaussian-filter baseline.
    #[arg(long)]
    gallager: bool,
    /// Gaussian filter frequency scale in hertz.
    #[arg(long)]
    beta_g: Option<f64>,
    /// Gaussian filter one-sided noise density.
    #[arg(long)]
    n0_g: Option<f64>,
    /// Output file; format from extension (.csv, .json, .svg). Repeatable.
    #[arg(long)]
    out: Vec<PathBuf>,
    /// Write figN.csv, figN.json and figN.svg for every requested figure.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Omit timestamps so repeated runs are byte-identical.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Io { .. }) => EXIT_IO,
            _ => EXIT_USAGE,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parsed `key = value` config. Keys use the long flag names; `-` and `_`
/// are interchangeable.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
            let key = k.trim().replace('_', "-");
            if key.is_empty() {
                return Err(format!("config line {}: empty key", i + 1));
            }
            entries.insert(key, v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|msg| Error::Invalid {
            what: "config file",
            msg,
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// Flag value if given, else config value, else `None`; records the
/// effective value.
struct Resolver<'a> {
    config: &'a ConfigFile,
    effective: BTreeMap<String, String>,
}

impl<'a> Resolver<'a> {
    fn new(config: &'a ConfigFile) -> Self {
        Self {
            config,
            effective: BTreeMap::new(),
        }
    }

    fn pick<T>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.config.get(key) {
                Some(text) => Some(
                    text.parse::<T>()
                        .map_err(|e| usage(format!("config key `{key}`: {e}")))?,
                ),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.effective.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    fn flag(&mut self, key: &str, flag: bool) -> CliResult<bool> {
        let on = if flag { Some(true) } else { None };
        Ok(self.pick(key, on)?.unwrap_or(false))
    }

    fn text(&mut self, key: &str, flag: Option<String>) -> CliResult<Option<String>> {
        self.pick(key, flag)
    }
}

fn format_sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let r: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    format!("{r}")
}

/// Parse `args` (including the program name) and run. Output and
/// diagnostics go to the supplied writers; the return value is the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(explicit: Option<&Path>) -> CliResult<ConfigFile> {
    let path = match explicit {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(CONFIG_ENV).map(PathBuf::from),
    };
    match path {
        Some(p) => ConfigFile::load(&p).map_err(|e| match e {
            // a missing config file is a usage problem, not an output failure
            Error::Io { path, source } => usage(format!("cannot read config {}: {source}", path.display())),
            other => CliError::Core(other),
        }),
        None => Ok(ConfigFile::default()),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::W0 { y, rel_tol } => cmd_w0(y, rel_tol, &config, out),
        Command::Capacity(args) => cmd_capacity(args, &config, out),
        Command::Example { json } => cmd_example(json, out),
        Command::Curve(args) => cmd_curve(args, &config, out),
        Command::Validate { json, perturb } => cmd_validate(json, perturb.unwrap_or(0.0), out),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Core(Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    })
}

fn tolerance(rel_tol: Option<f64>) -> CliResult<ToleranceConfig> {
    Ok(match rel_tol {
        Some(t) => ToleranceConfig::new(t, ToleranceConfig::DEFAULT_MAX_ITER)?,
        None => ToleranceConfig::default(),
    })
}

fn cmd_w0(y: f64, rel_tol: Option<f64>, config: &ConfigFile, out: &mut dyn Write) -> CliResult<i32> {
    let mut r = Resolver::new(config);
    let tol = tolerance(r.pick("rel-tol", rel_tol)?)?;
    let x = w0(y, &tol)?;
    writeln!(out, "{}", format_sig15(x)).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn cmd_capacity(args: CapacityArgs, config: &ConfigFile, out: &mut dyn Write) -> CliResult<i32> {
    let mut r = Resolver::new(config);
    let alpha = r
        .pick("alpha", args.alpha)?
        .ok_or_else(|| usage("--alpha is required"))?;
    let beta = r.pick("beta", args.beta)?.ok_or_else(|| usage("--beta is required"))?;
    let theta2 = r.pick("theta2", args.theta2)?.unwrap_or(1.0);
    let geom = HeatChannelGeometry::new(alpha, beta, theta2)?;

    let snr = r.pick("snr", args.snr)?;
    let snr_db = r.pick("snr-db", args.snr_db)?;
    let energy = r.pick("energy", args.energy)?;
    let given = [snr.is_some(), snr_db.is_some(), energy.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if given != 1 {
        return Err(usage("exactly one of --snr, --snr-db, --energy is required"));
    }
    let (snr, s_energy) = match (snr, snr_db, energy) {
        (Some(s), _, _) => (Some(s), snr_to_energy(&geom, s)?),
        (_, Some(db), _) => {
            let s = db_to_linear(db);
            (Some(s), snr_to_energy(&geom, s)?)
        }
        (_, _, Some(e)) => (None, e),
        _ => unreachable!(),
    };

    let method_text = r.text("method", args.method.map(|m| format!("{m:?}").to_lowercase()))?;
    let method = match method_text.as_deref() {
        None | Some("all") => Method::All,
        Some("closed") => Method::Closed,
        Some("discrete") => Method::Discrete,
        Some("quadrature") => Method::Quadrature,
        Some(other) => return Err(usage(format!("unknown method `{other}`"))),
    };
    let methods = match method {
        Method::All => MethodSet::ALL,
        Method::Closed => MethodSet {
            closed: true,
            discrete: false,
            quadrature: false,
        },
        Method::Discrete => MethodSet {
            closed: false,
            discrete: true,
            quadrature: false,
        },
        Method::Quadrature => MethodSet {
            closed: false,
            discrete: false,
            quadrature: true,
        },
    };
    let path_text = r.text("quad-path", args.quad_path.map(|p| format!("{p:?}").to_lowercase()))?;
    let path = match path_text.as_deref() {
        None | Some("collapsed") => QuadraturePath::Collapsed,
        Some("grid") => QuadraturePath::TensorGrid,
        Some(other) => return Err(usage(format!("unknown quadrature path `{other}`"))),
    };
    let quad = match r.pick("abs-tol", args.abs_tol)? {
        Some(t) => QuadratureSpec::new(t, QuadratureSpec::DEFAULT_MAX_REFINEMENTS)?,
        None => QuadratureSpec::default(),
    };
    let bound = r
        .pick("consistency-bound", args.consistency_bound)?
        .unwrap_or(CapacityReport::DEFAULT_CONSISTENCY_BOUND);
    let json_out = r.flag("json", args.json)?;

    let mut report = CapacityReport::compute(
        &geom,
        s_energy,
        MethodSet {
            quadrature: false,
            ..methods
        },
        &quad,
        bound,
    )?;
    if methods.quadrature {
        // rerun with the quadrature leg on the requested path
        let q = crate::heat::capacity_quadrature(&geom, s_energy, &quad, path)?;
        report.quadrature_nats = Some(q.capacity_nats);
        report = recompute_spreads(report);
    }

    if json_out {
        let doc = json!({
            "geometry": {
                "alpha": geom.alpha(),
                "beta": geom.beta(),
                "theta2": geom.theta2(),
                "tbp": geom.tbp(),
                "duration": geom.duration(),
                "bandwidth": geom.bandwidth(),
                "n0": geom.n0(),
            },
            "snr": snr,
            "report": report,
            "config": r.effective,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable")).map_err(io_err)?;
        return Ok(EXIT_OK);
    }

    let mut lines = Vec::new();
    lines.push(format!(
        "alpha = {:e} s, beta = {:e} Hz, theta2 = {}, alpha*beta = {}",
        geom.alpha(),
        geom.beta(),
        geom.theta2(),
        format_sig15(geom.tbp())
    ));
    if let Some(s) = snr {
        lines.push(format!("SNR = {} ({:.4} dB)", format_sig15(s), 10.0 * s.log10()));
    }
    lines.push(format!("S = {}", format_sig15(s_energy)));
    lines.push(String::new());
    lines.push(format!(
        "{:<12} {:>16} {:>16} {:>16} {:>6}",
        "method", "C (nats)", "C (bits)", "water level", "K"
    ));
    if let Some(c) = report.closed_form_nats {
        lines.push(format!(
            "{:<12} {:>16.10} {:>16.10} {:>16} {:>6}",
            "closed",
            c,
            c * LOG2_E,
            "-",
            "-"
        ));
    }
    if let Some(d) = &report.discrete {
        lines.push(format!(
            "{:<12} {:>16.10} {:>16.10} {:>16.10} {:>6}",
            "discrete",
            d.capacity_nats,
            d.capacity_nats * LOG2_E,
            d.water_level,
            d.active_count
        ));
    }
    if let Some(q) = report.quadrature_nats {
        lines.push(format!(
            "{:<12} {:>16.10} {:>16.10} {:>16} {:>6}",
            "quadrature",
            q,
            q * LOG2_E,
            "-",
            "-"
        ));
    }
    if !report.spreads.is_empty() {
        lines.push(String::new());
        for s in &report.spreads {
            lines.push(format!("spread {} vs {}: {:.3e}", s.a, s.b, s.relative));
        }
        if !report.is_consistent() {
            lines.push(format!(
                "note: spread exceeds {:.3e}; the closed form is asymptotic in alpha*beta",
                report.consistency_bound
            ));
        }
    }
    for l in lines {
        writeln!(out, "{l}").map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

fn recompute_spreads(report: CapacityReport) -> CapacityReport {
    let named = [
        ("closed", report.closed_form_nats),
        ("discrete", report.discrete.as_ref().map(|d| d.capacity_nats)),
        ("quadrature", report.quadrature_nats),
    ];
    let present: Vec<(&'static str, f64)> = named.iter().filter_map(|(n, v)| v.map(|v| (*n, v))).collect();
    let mut spreads = Vec::new();
    for i in 0..present.len() {
        for j in i + 1..present.len() {
            spreads.push(crate::heat::Spread {
                a: present[i].0,
                b: present[j].0,
                relative: crate::heat::relative_spread(present[i].1, present[j].1),
            });
        }
    }
    CapacityReport { spreads, ..report }
}

fn cmd_example(json_out: bool, out: &mut dyn Write) -> CliResult<i32> {
    let geom = HeatChannelGeometry::new(validate::EXAMPLE_ALPHA, validate::EXAMPLE_BETA, 1.0)?;
    let snr = validate::example_snr();
    let s = snr_to_energy(&geom, snr)?;
    let d = capacity_exact_discrete(&geom, s)?;
    let closed_bits = crate::heat::capacity_closed_form(&geom, s)? * LOG2_E;
    let bits = d.capacity_bits();
    let rel = (bits - validate::EXAMPLE_CAPACITY_BITS).abs() / validate::EXAMPLE_CAPACITY_BITS;
    let pass = d.active_count == validate::EXAMPLE_ACTIVE_MODES && rel <= validate::EXAMPLE_REL_BOUND;
    if json_out {
        let doc = json!({
            "alpha": geom.alpha(),
            "beta": geom.beta(),
            "snr": snr,
            "energy": s,
            "active_modes": d.active_count,
            "expected_active_modes": validate::EXAMPLE_ACTIVE_MODES,
            "capacity_bits": bits,
            "expected_capacity_bits": validate::EXAMPLE_CAPACITY_BITS,
            "relative_error": rel,
            "bound": validate::EXAMPLE_REL_BOUND,
            "closed_form_bits": closed_bits,
            "pass": pass,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable")).map_err(io_err)?;
    } else {
        let lines = [
            format!("alpha = 50 ps, beta = 200 GHz, SNR = 1000/(2 pi) = {snr:.4}"),
            format!(
                "K            computed {:>10}   expected {:>10}",
                d.active_count,
                validate::EXAMPLE_ACTIVE_MODES
            ),
            format!(
                "C (bits)     computed {bits:>10.4}   expected {:>10.2}   rel. error {rel:.3e} (bound {:.1e})",
                validate::EXAMPLE_CAPACITY_BITS,
                validate::EXAMPLE_REL_BOUND
            ),
            format!("closed form  {closed_bits:.4} bits"),
            if pass { "PASS".to_string() } else { "FAIL".to_string() },
        ];
        for l in lines {
            writeln!(out, "{l}").map_err(io_err)?;
        }
    }
    Ok(if pass { EXIT_OK } else { EXIT_VALIDATION })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
    Svg,
}

fn format_of(path: &Path) -> CliResult<Format> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some("svg") => Ok(Format::Svg),
        _ => Err(usage(format!(
            "cannot infer output format of {} (use .csv, .json or .svg)",
            path.display()
        ))),
    }
}

fn cmd_curve(args: CurveArgs, config: &ConfigFile, out: &mut dyn Write) -> CliResult<i32> {
    let mut r = Resolver::new(config);
    let figs: Vec<u8> = if args.figs.is_empty() {
        match r.text("fig", None)? {
            Some(list) => list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u8>()
                        .map_err(|e| usage(format!("config key `fig`: {e}")))
                })
                .collect::<CliResult<_>>()?,
            None if args.out_dir.is_some() => vec![2, 3],
            None => vec![2],
        }
    } else {
        let text: Vec<String> = args.figs.iter().map(u8::to_string).collect();
        r.effective.insert("fig".into(), text.join(","));
        args.figs.clone()
    };
    let figures: Vec<Figure> = figs.iter().map(|&n| Figure::from_number(n)).collect::<Result<_, _>>()?;

    let sweep = SweepSpec::new(
        r.pick("snr-min-db", args.snr_min_db)?
            .unwrap_or(SweepSpec::DEFAULT_MIN_DB),
        r.pick("snr-max-db", args.snr_max_db)?
            .unwrap_or(SweepSpec::DEFAULT_MAX_DB),
        r.pick("points", args.points)?.unwrap_or(SweepSpec::DEFAULT_POINTS),
    )?;
    let beta_g = r.pick("beta-g", args.beta_g)?;
    let n0_g = r.pick("n0-g", args.n0_g)?;
    let gallager_on = r.flag("gallager", args.gallager)? || beta_g.is_some();
    let gallager = if gallager_on {
        Some(GaussianFilterSpec::new(beta_g.unwrap_or(1.0), n0_g.unwrap_or(1.0))?)
    } else {
        None
    };
    let deterministic = r.flag("deterministic", args.deterministic)?;
    let out_dir = r.pick("out-dir", args.out_dir.as_ref().map(|p| p.display().to_string()))?;

    let mut outputs: Vec<(Figure, PathBuf, Format)> = Vec::new();
    if !args.out.is_empty() {
        if figures.len() != 1 {
            return Err(usage("--out needs exactly one --fig; use --out-dir for several"));
        }
        for p in &args.out {
            outputs.push((figures[0], p.clone(), format_of(p)?));
        }
    }
    if let Some(dir) = &out_dir {
        let dir = PathBuf::from(dir);
        std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        for &f in &figures {
            for (ext, fmt) in [("csv", Format::Csv), ("json", Format::Json), ("svg", Format::Svg)] {
                outputs.push((f, dir.join(format!("fig{}.{ext}", f.number())), fmt));
            }
        }
    }

    let timestamp = if deterministic {
        None
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    };

    let mut cache: BTreeMap<u8, Vec<crate::curve::CurvePoint>> = BTreeMap::new();
    for &f in &figures {
        let pts = match f {
            Figure::SeVsSnr => generate_fig2(&sweep, gallager.as_ref())?,
            Figure::SeVsEbn0 => generate_fig3(&sweep, gallager.as_ref())?,
        };
        cache.insert(f.number(), pts);
    }

    if outputs.is_empty() {
        let pts = &cache[&figures[0].number()];
        write!(out, "{}", to_csv(pts)).map_err(io_err)?;
        return Ok(EXIT_OK);
    }
    for (f, path, fmt) in outputs {
        let pts = &cache[&f.number()];
        match fmt {
            Format::Csv => emit_csv(pts, &path)?,
            Format::Json => {
                let mut meta = CurveMetadata::new(f, sweep, gallager);
                meta.config = r.effective.clone();
                meta.generated_unix_s = timestamp;
                emit_json(pts, &meta, &path)?
            }
            Format::Svg => emit_svg(pts, f, &f.default_axes(), &path)?,
        }
        writeln!(out, "wrote {}", path.display()).map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

fn cmd_validate(json_out: bool, perturbation: f64, out: &mut dyn Write) -> CliResult<i32> {
    let report = validate::run(ValidateOptions { perturbation })?;
    if json_out {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")).map_err(io_err)?;
    } else {
        for c in &report.checks {
            writeln!(
                out,
                "[{}] {:<52} observed {:>10.3e}  bound {:>9.2e}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.observed,
                c.bound,
                c.note
            )
            .map_err(io_err)?;
        }
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        writeln!(
            out,
            "{} checks, {} failed, {:.2} s",
            report.checks.len(),
            failed,
            report.elapsed_s
        )
        .map_err(io_err)?;
    }
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_VALIDATION })
}
