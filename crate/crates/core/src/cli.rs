//! Command-line front end: figure data, generic scans, single points and a
//! three-engine cross-check, written as CSV or JSON.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::Error;
use crate::model::SystemParams;
use crate::spectra::{self, Axis, DropReason, Engine, ScanResult, ScanSpec, SusceptibilityPoint};
use crate::timedomain::IntegrationConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_ENGINE: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Maximum allowed deviation between the two exact engines in `verify`.
pub const VERIFY_EXACT_TOLERANCE: f64 = 1e-9;
/// Maximum allowed deviation of the timedomain engine from either exact engine.
pub const VERIFY_TIMEDOMAIN_TOLERANCE: f64 = 1e-3;

pub const COLUMNS: [&str; 14] = [
    "delta_over_gamma",
    "Delta_over_gamma",
    "G_over_gamma",
    "re_chi_minus",
    "im_chi_minus",
    "re_chi_plus",
    "im_chi_plus",
    "re_term_coh_pp",
    "im_term_coh_pp",
    "re_term_coh_mm",
    "im_term_coh_mm",
    "re_term_pop",
    "im_term_pop",
    "engine",
];

#[derive(Debug, Parser)]
#[command(name = "crosstalk", version, about = "Probe susceptibility of a four-level atom with cross-talking Lambda subsystems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: CommonOptions,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Absorption and dispersion versus delta, four-level and Lambda reference.
    Fig2,
    /// Re chi- on the delta = Delta line.
    Fig3a,
    /// Re chi- versus G at delta = Delta = B' - B.
    Fig3b,
    /// Term decomposition versus delta.
    Fig4,
    /// Im chi- on the delta = Delta line.
    Fig5,
    /// Generic sweep along one axis.
    Scan(ScanArgs),
    /// Single parameter point.
    Point,
    /// Compare the analytic, bloch and timedomain engines on a 21-point grid.
    Verify,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value = "delta")]
    pub axis: AxisArg,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 601)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    #[value(name = "delta")]
    Probe,
    #[value(name = "Delta")]
    Control,
    #[value(name = "G")]
    Rabi,
    #[value(name = "locked")]
    Locked,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Probe => Axis::Probe,
            AxisArg::Control => Axis::Control,
            AxisArg::Rabi => Axis::Rabi,
            AxisArg::Locked => Axis::Locked,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Analytic,
    Bloch,
    Timedomain,
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonOptions {
    #[arg(long = "B", global = true, allow_negative_numbers = true)]
    pub b_excited: Option<f64>,
    #[arg(long = "B-prime", global = true, allow_negative_numbers = true)]
    pub b_ground: Option<f64>,
    #[arg(long = "Delta", global = true, allow_negative_numbers = true)]
    pub control_detuning: Option<f64>,
    #[arg(long = "delta", global = true, allow_negative_numbers = true)]
    pub probe_detuning: Option<f64>,
    #[arg(long = "G", global = true, allow_negative_numbers = true)]
    pub control_rabi: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma2: Option<f64>,
    /// Four-level engine; figure commands default to analytic.
    #[arg(long, global = true, value_enum)]
    pub engine: Option<EngineArg>,
    /// Probe amplitude for the timedomain engine.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub probe_amplitude: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Hyperfine constant A in MHz; adds a `delta_mhz` column equal to delta * A / 12.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub scale_mhz: Option<f64>,
    /// JSON file with parameter overrides, applied before command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Parameter overrides as read from a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(rename = "B")]
    pub b_excited: Option<f64>,
    #[serde(rename = "B_prime")]
    pub b_ground: Option<f64>,
    #[serde(rename = "Delta")]
    pub control_detuning: Option<f64>,
    #[serde(rename = "delta")]
    pub probe_detuning: Option<f64>,
    #[serde(rename = "G", default, deserialize_with = "complex_opt")]
    pub control_rabi: Option<Complex64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
}

fn complex_opt<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Real(f64),
        Pair([f64; 2]),
    }
    Ok(Option::<Repr>::deserialize(d)?.map(|r| match r {
        Repr::Real(x) => Complex64::new(x, 0.0),
        Repr::Pair([re, im]) => Complex64::new(re, im),
    }))
}

impl Overrides {
    fn apply(&self, p: &mut SystemParams) {
        if let Some(v) = self.b_excited {
            p.b_excited = v;
        }
        if let Some(v) = self.b_ground {
            p.b_ground = v;
        }
        if let Some(v) = self.control_detuning {
            p.control_detuning = v;
        }
        if let Some(v) = self.probe_detuning {
            p.probe_detuning = v;
        }
        if let Some(v) = self.control_rabi {
            p.control_rabi = v;
        }
        if let Some(v) = self.gamma1 {
            p.gamma1 = v;
        }
        if let Some(v) = self.gamma2 {
            p.gamma2 = v;
        }
    }
}

/// A failed run, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Engine(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Engine(_) => EXIT_ENGINE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid parameters: {m}"),
            CliError::Engine(m) => write!(f, "engine error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Engine(e.to_string())
        }
    }
}

/// Fully resolved inputs of one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: SystemParams,
    pub engine: Engine,
    pub integration: IntegrationConfig,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub scale_mhz: Option<f64>,
}

fn read_overrides(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let o = &cli.options;
        let mut params = SystemParams::potassium_reference();
        if let Some(path) = &o.config {
            read_overrides(path)?.apply(&mut params);
        }
        Overrides {
            b_excited: o.b_excited,
            b_ground: o.b_ground,
            control_detuning: o.control_detuning,
            probe_detuning: o.probe_detuning,
            control_rabi: o.control_rabi.map(|g| Complex64::new(g, 0.0)),
            gamma1: o.gamma1,
            gamma2: o.gamma2,
        }
        .apply(&mut params);
        params.validate()?;

        let defaults = IntegrationConfig::default();
        let integration = IntegrationConfig {
            probe_amplitude: o.probe_amplitude.unwrap_or(defaults.probe_amplitude),
            t_end: o.t_end.unwrap_or(defaults.t_end),
            dt: o.dt.unwrap_or(defaults.dt),
            ..defaults
        };
        let engine = match o.engine.unwrap_or(EngineArg::Analytic) {
            EngineArg::Analytic => Engine::Analytic,
            EngineArg::Bloch => Engine::Bloch,
            EngineArg::Timedomain => Engine::TimeDomain(integration),
            EngineArg::Lambda => Engine::Lambda,
        };
        if let Some(a) = o.scale_mhz {
            if !(a.is_finite() && a > 0.0) {
                return Err(CliError::Validation(format!("scale-mhz must be positive, got {a}")));
            }
        }
        Ok(Self {
            command: cli.command.clone(),
            params,
            engine,
            integration,
            output: o.output.clone(),
            format: o.format,
            scale_mhz: o.scale_mhz,
        })
    }
}

/// Fixed-width scientific notation, 9 significant digits, no negative zero.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == 0.0 {
        format!("{:.8e}", 0.0)
    } else {
        format!("{x:.8e}")
    }
}

/// Rendered output: metadata, dropped points, column names and rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub dropped: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}={v}");
        }
        for d in &self.dropped {
            let _ = writeln!(s, "# dropped {d}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut params = Map::new();
        for (k, v) in &self.meta {
            params.insert(k.clone(), Value::String(v.clone()));
        }
        params.insert("dropped".into(), Value::Array(self.dropped.iter().cloned().map(Value::String).collect()));
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(r.iter().cloned().map(Value::String)).collect();
                Value::Object(obj)
            })
            .collect();
        let mut root = Map::new();
        root.insert("params".into(), Value::Object(params));
        root.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("string map serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn param_meta(cfg: &RunConfig, command: &str) -> Vec<(String, String)> {
    let p = &cfg.params;
    let mut m = vec![
        ("program".to_string(), format!("crosstalk {}", env!("CARGO_PKG_VERSION"))),
        ("command".to_string(), command.to_string()),
        ("units".to_string(), "gamma; chi in N|d|^2/(hbar gamma)".to_string()),
        ("B".to_string(), fmt_num(p.b_excited)),
        ("B_prime".to_string(), fmt_num(p.b_ground)),
        ("Delta".to_string(), fmt_num(p.control_detuning)),
        ("delta".to_string(), fmt_num(p.probe_detuning)),
        ("G_re".to_string(), fmt_num(p.control_rabi.re)),
        ("G_im".to_string(), fmt_num(p.control_rabi.im)),
        ("gamma1".to_string(), fmt_num(p.gamma1)),
        ("gamma2".to_string(), fmt_num(p.gamma2)),
        ("engine".to_string(), cfg.engine.name().to_string()),
    ];
    if let Engine::TimeDomain(ic) = cfg.engine {
        m.push(("probe_amplitude".into(), fmt_num(ic.probe_amplitude)));
        m.push(("t_end".into(), fmt_num(ic.t_end)));
        m.push(("dt".into(), fmt_num(ic.dt)));
        m.push(("demod_window".into(), fmt_num(ic.demod_window)));
        m.push(("sample_stride".into(), ic.sample_stride.to_string()));
    }
    if let Some(a) = cfg.scale_mhz {
        m.push(("scale_mhz".into(), fmt_num(a)));
    }
    m
}

fn scan_meta(spec: &ScanSpec) -> Vec<(String, String)> {
    vec![
        ("axis".into(), spec.axis.name().into()),
        ("lo".into(), fmt_num(spec.lo)),
        ("hi".into(), fmt_num(spec.hi)),
        ("points".into(), spec.points.to_string()),
    ]
}

fn columns(cfg: &RunConfig) -> Vec<String> {
    let mut c: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
    if cfg.scale_mhz.is_some() {
        c.push("delta_mhz".into());
    }
    c
}

pub fn row(point: &SusceptibilityPoint, engine: &str, scale_mhz: Option<f64>) -> Vec<String> {
    let p = &point.params;
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let chi_plus = point.chi_plus.unwrap_or(nan);
    let (pp, mm, pop) = point.terms.map_or((nan, nan, nan), |t| (t.coh_pp, t.coh_mm, t.pop));
    let mut r: Vec<String> = [
        p.probe_detuning,
        p.control_detuning,
        p.control_rabi.norm(),
        point.chi_minus.re,
        point.chi_minus.im,
        chi_plus.re,
        chi_plus.im,
        pp.re,
        pp.im,
        mm.re,
        mm.im,
        pop.re,
        pop.im,
    ]
    .into_iter()
    .map(fmt_num)
    .collect();
    r.push(engine.to_string());
    if let Some(a) = scale_mhz {
        r.push(fmt_num(p.probe_detuning * a / 12.0));
    }
    r
}

fn describe_drop(result: &ScanResult, engine: &str) -> Vec<String> {
    result
        .dropped
        .iter()
        .map(|d| {
            let why = match &d.reason {
                DropReason::ResonantBeat => "omega12 = 0".to_string(),
                DropReason::Engine(e) => e.to_string(),
            };
            format!("{}={} engine={engine} reason={why}", result.spec.axis.name(), fmt_num(d.coordinate))
        })
        .collect()
}

fn append_scan(table: &mut Table, result: &ScanResult, scale: Option<f64>) {
    let name = result.spec.engine.name();
    table.dropped.extend(describe_drop(result, name));
    table.rows.extend(result.points.iter().map(|p| row(p, name, scale)));
}

fn scan_table(cfg: &RunConfig, command: &str, spec: ScanSpec, with_lambda: bool) -> Result<Table, CliError> {
    let mut table = Table { meta: param_meta(cfg, command), columns: columns(cfg), ..Default::default() };
    table.meta.extend(scan_meta(&spec));
    let result = spectra::scan(&spec)?;
    append_scan(&mut table, &result, cfg.scale_mhz);
    if with_lambda && spec.engine != Engine::Lambda {
        let lambda = spectra::lambda_reference_scan(&spec)?;
        append_scan(&mut table, &lambda, cfg.scale_mhz);
    }
    Ok(table)
}

fn point_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = &cfg.params;
    if !matches!(cfg.engine, Engine::Lambda) && p.omega12().abs() < crate::bloch::RESONANT_OMEGA12 {
        return Err(Error::ResonantDegeneracy { omega12: p.omega12() }.into());
    }
    let point = spectra::evaluate(&cfg.engine, p, p.probe_detuning)?;
    Ok(Table {
        meta: param_meta(cfg, "point"),
        columns: columns(cfg),
        rows: vec![row(&point, cfg.engine.name(), cfg.scale_mhz)],
        ..Default::default()
    })
}

/// Largest pairwise deviation between two scans over their common points.
fn max_deviation(a: &ScanResult, b: &ScanResult) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut n = 0;
    for p in &a.points {
        let Some(q) = b.points.iter().find(|q| q.coordinate == p.coordinate) else { continue };
        n += 1;
        worst = worst.max((p.chi_minus - q.chi_minus).norm());
        if let (Some(x), Some(y)) = (p.chi_plus, q.chi_plus) {
            worst = worst.max((x - y).norm());
        }
    }
    (worst, n)
}

/// Outcome of the three-engine comparison.
#[derive(Debug, Clone)]
pub struct Verification {
    pub table: Table,
    pub passed: bool,
}

pub fn verify(cfg: &RunConfig) -> Result<Verification, CliError> {
    let grid = |engine| ScanSpec::new(Axis::Probe, -10.0, 20.0, 21, cfg.params, engine);
    let analytic = spectra::scan(&grid(Engine::Analytic))?;
    let bloch = spectra::scan(&grid(Engine::Bloch))?;
    let timedomain = spectra::scan(&grid(Engine::TimeDomain(cfg.integration)))?;

    let td_tol = VERIFY_TIMEDOMAIN_TOLERANCE;
    let pairs = [
        ("analytic_vs_bloch", max_deviation(&analytic, &bloch), VERIFY_EXACT_TOLERANCE),
        ("analytic_vs_timedomain", max_deviation(&analytic, &timedomain), td_tol),
        ("bloch_vs_timedomain", max_deviation(&bloch, &timedomain), td_tol),
    ];
    let mut meta = param_meta(cfg, "verify");
    meta.retain(|(k, _)| k != "engine");
    meta.extend(scan_meta(&grid(Engine::Analytic)));
    let mut table = Table {
        meta,
        columns: ["pair", "max_abs_deviation", "tolerance", "compared_points", "status"]
            .map(String::from)
            .to_vec(),
        ..Default::default()
    };
    for r in [&analytic, &bloch, &timedomain] {
        table.dropped.extend(describe_drop(r, r.spec.engine.name()));
    }
    let mut passed = true;
    for (name, (dev, n), tol) in pairs {
        let ok = n > 0 && dev < tol;
        passed &= ok;
        table.rows.push(vec![
            name.into(),
            fmt_num(dev),
            fmt_num(tol),
            n.to_string(),
            if ok { "pass" } else { "fail" }.into(),
        ]);
    }
    Ok(Verification { table, passed })
}

/// Produce the output table for `cfg` and report whether `verify` passed.
pub fn build(cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    let p = cfg.params;
    let e = cfg.engine;
    let table = match &cfg.command {
        Command::Fig2 => scan_table(cfg, "fig2", ScanSpec::probe_profile(p, e), true)?,
        Command::Fig3a => scan_table(cfg, "fig3a", ScanSpec::locked_profile(p, e), false)?,
        Command::Fig3b => scan_table(cfg, "fig3b", ScanSpec::rabi_profile(p, e), false)?,
        Command::Fig4 => scan_table(cfg, "fig4", ScanSpec::probe_profile(p, e), false)?,
        Command::Fig5 => scan_table(cfg, "fig5", ScanSpec::locked_profile(p, e), false)?,
        Command::Scan(a) => scan_table(cfg, "scan", ScanSpec::new(a.axis.into(), a.lo, a.hi, a.points, p, e), false)?,
        Command::Point => point_table(cfg)?,
        Command::Verify => {
            let v = verify(cfg)?;
            return Ok((v.table, v.passed));
        }
    };
    Ok((table, true))
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(io)?;
            out.flush().map_err(io)
        }
    }
}

/// Run a parsed command line and return the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let result = RunConfig::resolve(cli).and_then(|cfg| {
        let (table, passed) = build(&cfg)?;
        emit(&cfg, &table.render(cfg.format))?;
        Ok(passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("crosstalk: verification failed");
            EXIT_VERIFY_FAILED
        }
        Err(e) => {
            eprintln!("crosstalk: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("crosstalk").chain(args.iter().copied())).unwrap()
    }

    fn resolve(args: &[&str]) -> RunConfig {
        RunConfig::resolve(&parse(args)).unwrap()
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(-4.0 / 51.0), "-7.84313725e-2");
        assert_eq!(fmt_num(-0.0), "0.00000000e0");
        assert_eq!(fmt_num(10.25), "1.02500000e1");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn defaults_are_reference_set() {
        let cfg = resolve(&["point"]);
        assert_eq!(cfg.params, SystemParams::potassium_reference());
        assert_eq!(cfg.engine, Engine::Analytic);
    }

    #[test]
    fn flags_override_and_accept_negatives() {
        let cfg = resolve(&["point", "--delta", "-3.5", "--Delta", "1", "--B-prime", "7", "--G", "0.25"]);
        assert_eq!(cfg.params.probe_detuning, -3.5);
        assert_eq!(cfg.params.control_detuning, 1.0);
        assert_eq!(cfg.params.b_ground, 7.0);
        assert_eq!(cfg.params.control_rabi, Complex64::new(0.25, 0.0));
    }

    #[test]
    fn config_file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        std::fs::write(&path, r#"{"B": 1.5, "G": [0.3, 0.4], "gamma2": 3}"#).unwrap();
        let cfg = resolve(&["point", "--config", path.to_str().unwrap(), "--gamma2", "5"]);
        assert_eq!(cfg.params.b_excited, 1.5);
        assert_eq!(cfg.params.control_rabi, Complex64::new(0.3, 0.4));
        assert_eq!(cfg.params.gamma2, 5.0);

        std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
        let err = RunConfig::resolve(&parse(&["point", "--config", path.to_str().unwrap()])).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_VALIDATION);
    }

    #[test]
    fn invalid_parameters_map_to_validation() {
        let err = RunConfig::resolve(&parse(&["point", "--gamma1", "-1"])).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_VALIDATION);
    }

    #[test]
    fn point_at_two_photon_resonance() {
        let (t, _) = build(&resolve(&["point", "--delta", "4", "--Delta", "4"])).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0][3], "-7.84313725e-2");
        assert_eq!(t.rows[0][4], "0.00000000e0");
    }

    #[test]
    fn resonant_point_is_an_engine_error() {
        let err = build(&resolve(&["point", "--delta", "-8"])).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_ENGINE);
    }

    #[test]
    fn fig2_has_both_systems() {
        let (t, _) = build(&resolve(&["fig2"])).unwrap();
        assert_eq!(t.rows.iter().filter(|r| r[13] == "analytic").count(), 600);
        let lambda: Vec<_> = t.rows.iter().filter(|r| r[13] == "lambda").collect();
        assert_eq!(lambda.len(), 601);
        assert!(lambda.iter().all(|r| r[5] == "nan" && r[7] == "0.00000000e0" && r[11] == r[3]));
        assert_eq!(t.dropped.len(), 1);
        assert!(t.to_csv().contains("# dropped delta=-8.00000000e0"));
    }

    #[test]
    fn scale_column() {
        let (t, _) = build(&resolve(&["point", "--scale-mhz", "6.079"])).unwrap();
        assert_eq!(t.columns.last().unwrap(), "delta_mhz");
        assert_eq!(t.rows[0][14], fmt_num(4.0 * 6.079 / 12.0));
        assert!(RunConfig::resolve(&parse(&["point", "--scale-mhz", "0"])).is_err());
    }

    #[test]
    fn json_mirrors_csv() {
        let (t, _) = build(&resolve(&["point"])).unwrap();
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["params"]["B"], "2.00000000e0");
        assert_eq!(v["rows"][0]["re_chi_minus"], Value::String(t.rows[0][3].clone()));
        assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn scan_validation() {
        let err = build(&resolve(&["scan", "--lo", "2", "--hi", "1"])).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_VALIDATION);
        let (t, _) = build(&resolve(&["scan", "--axis", "G", "--lo", "0.1", "--hi", "1", "--points", "4"])).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.rows[3][2], "1.00000000e0");
    }

    #[test]
    fn io_errors_map_to_exit_4() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("missing").join("x.csv");
        let cli = parse(&["point", "--output", out.to_str().unwrap()]);
        assert_eq!(run(&cli), EXIT_IO);
    }
}
