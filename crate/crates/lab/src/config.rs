//! Run configuration: command-line flags, `key=value` files, and rendering
//! back to `key=value` text.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::params::{ComplexArg, ComplexList, ObservableArg, TimeFunction};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "LOEWNER_LAB_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "loewner-lab", version, about = "Löwner-Kufarev, Witt, SLE and KdV numerics")]
#[command(args_override_self = true)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    #[default]
    LineJson,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct OutputArgs {
    /// Output file; defaults to `$LOEWNER_LAB_OUT_DIR/<command>.<ext>`, else stdout.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::LineJson)]
    pub format: Format,
    /// Record wall time in the diagnostics (makes reports differ run to run).
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Witt algebra identities on random points.
    WittCheck(WittCheckArgs),
    /// Coefficient evolution and its t → ∞ limit.
    LkEvolve(LkEvolveArgs),
    /// Conserved co-vector spectrum along the Hamiltonian flow.
    LkConserved(LkConservedArgs),
    /// Geodesics on the coefficient body.
    Geodesic(GeodesicArgs),
    /// Chordal SLE driving paths and tracked points.
    SleSample(SleSampleArgs),
    /// Monte Carlo drift check of an SLE observable.
    SleMartingale(SleMartingaleArgs),
    /// Regularised Brownian flow on the circle.
    CircleFlow(CircleFlowArgs),
    /// Periodic KdV with conserved integrals.
    KdvRun(KdvRunArgs),
    /// Compare a line-JSON report against a golden file.
    GoldenCompare(GoldenCompareArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::WittCheck(_) => "witt-check",
            Self::LkEvolve(_) => "lk-evolve",
            Self::LkConserved(_) => "lk-conserved",
            Self::Geodesic(_) => "geodesic",
            Self::SleSample(_) => "sle-sample",
            Self::SleMartingale(_) => "sle-martingale",
            Self::CircleFlow(_) => "circle-flow",
            Self::KdvRun(_) => "kdv-run",
            Self::GoldenCompare(_) => "golden-compare",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Self::SleSample(_) | Self::SleMartingale(_) | Self::CircleFlow(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriverKind {
    /// `p = (e^{iu} + ζ)/(e^{iu} − ζ)` with `u` from `--u`.
    Kernel,
    /// `p ≡ 1`.
    Trivial,
    /// Constant coefficients from `--p`.
    Coefficients,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Subordination,
    Alternate,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct DriverArgs {
    #[arg(long, value_enum, default_value_t = DriverKind::Kernel)]
    pub driver: DriverKind,
    /// Kernel angle as a function of time.
    #[arg(long, default_value = "const:0")]
    pub u: TimeFunction,
    /// `p_1, p_2, …` for the coefficient driver.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<ComplexList>,
    #[arg(long, value_enum, default_value_t = ModeArg::Subordination)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct WittCheckArgs {
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    /// Rational arithmetic; residuals are then exactly zero or not.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub exact: bool,
    /// Seed for the random test points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub points: usize,
    /// Quadrature nodes for the contour variation (floating mode only).
    #[arg(long, default_value_t = 2048)]
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct LkEvolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub driver: DriverArgs,
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    #[arg(long, default_value_t = 12.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 20_000)]
    pub steps: usize,
    /// Bound on the tail-extrapolation drift.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Emit a row every this many steps.
    #[arg(long, default_value_t = 1000)]
    pub every: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct LkConservedArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub driver: DriverArgs,
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Initial momenta; drawn from `--seed` when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<ComplexList>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub every: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct GeodesicArgs {
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Seed for the random initial point and momenta.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `‖ψ̄(0)‖`.
    #[arg(long, default_value_t = 1.0)]
    pub psi_norm: f64,
    /// `‖c(0)‖`.
    #[arg(long, default_value_t = 0.3)]
    pub c_norm: f64,
    /// Constant controls `u_1 … u_N`: compare the closed form with integration
    /// instead of running the geodesic flow.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controls: Option<ComplexList>,
    #[arg(long, default_value_t = 1000)]
    pub every: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct SleSampleArgs {
    #[arg(long, default_value_t = 2.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 4)]
    pub paths: usize,
    /// Tracked point.
    #[arg(long, default_value = "0:1")]
    pub z: ComplexArg,
    #[arg(long, default_value_t = 100)]
    pub every: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct SleMartingaleArgs {
    #[arg(long, default_value_t = 8.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.05)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value = "0:1")]
    pub z0: ComplexArg,
    #[arg(long, default_value = "martingale")]
    pub observable: ObservableArg,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct CircleFlowArgs {
    #[arg(long, default_value_t = 0.7)]
    pub r: f64,
    #[arg(long, default_value_t = 16)]
    pub modes: usize,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    /// First seed of the sweep.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of consecutive seeds.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 1000)]
    pub every: usize,
    /// Replace the Brownian increments by zeros.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub zero_noise: bool,
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KdvInit {
    /// `amplitude · cos x`.
    Cosine,
    /// Lines `n re im` for `n ≥ 0` read from `--modes-file`.
    ModesFile,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct KdvRunArgs {
    /// Truncation `M`; modes `−M … M`.
    #[arg(long, default_value_t = 64)]
    pub modes: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, visible_alias = "T", default_value_t = 0.1)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = KdvInit::Cosine)]
    pub init: KdvInit,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 100)]
    pub every: usize,
    /// Also emit the non-negative modes at each row (line-JSON only).
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub snapshots: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct GoldenCompareArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub golden: PathBuf,
    /// Relative tolerance for floats.
    #[arg(long, default_value_t = 0.0)]
    pub rtol: f64,
    /// Absolute tolerance for floats.
    #[arg(long, default_value_t = 0.0)]
    pub atol: f64,
}

/// `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| LabError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn pairs_to_flags(pairs: &[(String, String)]) -> Vec<OsString> {
    pairs
        .iter()
        .filter(|(k, _)| k != "command")
        .flat_map(|(k, v)| [OsString::from(format!("--{}", k.replace('_', "-"))), OsString::from(v)])
        .collect()
}

/// Parses a command line. A `--config FILE` option is expanded in place of
/// the flags it names, ahead of all explicit flags, so explicit flags win.
/// The file may name the subcommand with `command=…`.
pub fn parse_args<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let mut file_pairs = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        let path = if a == "--config" {
            let p = args.get(i + 1).cloned().ok_or_else(|| LabError::Usage("--config needs a file".into()))?;
            args.drain(i..i + 2);
            p
        } else if let Some(p) = a.strip_prefix("--config=") {
            let p = OsString::from(p);
            args.remove(i);
            p
        } else {
            i += 1;
            continue;
        };
        if file_pairs.is_some() {
            return Err(LabError::Usage("--config given twice".into()));
        }
        let text = std::fs::read_to_string(&path).map_err(|e| LabError::io(PathBuf::from(&path), e))?;
        file_pairs = Some(parse_pairs(&text)?);
    }
    if let Some(pairs) = file_pairs {
        let named = pairs.iter().find(|(k, _)| k == "command").map(|(_, v)| v.clone());
        let has_sub = args.get(1).is_some_and(|a| !a.to_string_lossy().starts_with('-'));
        if !has_sub {
            let cmd = named.clone().ok_or_else(|| LabError::Usage("no subcommand given".into()))?;
            args.insert(1.min(args.len()), OsString::from(cmd));
        } else if let Some(cmd) = named {
            if args[1].to_string_lossy() != cmd {
                return Err(LabError::Usage(format!("config file is for {cmd}, not {}", args[1].to_string_lossy())));
            }
        }
        let flags = pairs_to_flags(&pairs);
        let at = 2.min(args.len());
        args.splice(at..at, flags);
    }
    RunConfig::try_parse_from(args).map_err(clap_error)
}

fn clap_error(e: clap::Error) -> LabError {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => LabError::Info(e.render().to_string()),
        _ => LabError::Usage(e.render().to_string()),
    }
}

/// Renders every parameter, defaults included, as `key=value` lines.
pub fn render(config: &RunConfig) -> String {
    let mut out = format!("command={}\n", config.command.name());
    for (k, v) in pairs(config) {
        out.push_str(&format!("{k}={v}\n"));
    }
    out
}

/// Parameters as `(key, value)` text pairs, command parameters first.
pub fn pairs(config: &RunConfig) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for value in [to_value(&config.command), to_value(&config.output)] {
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                let text = match v {
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                };
                out.push((k, text));
            }
        }
    }
    out
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("parameters serialize")
}

/// Parses text produced by [`render`].
pub fn parse_rendered(text: &str) -> Result<RunConfig> {
    let pairs = parse_pairs(text)?;
    let cmd = pairs
        .iter()
        .find(|(k, _)| k == "command")
        .map(|(_, v)| v.clone())
        .ok_or_else(|| LabError::Usage("missing command".into()))?;
    let mut args = vec![OsString::from("loewner-lab"), OsString::from(cmd)];
    args.extend(pairs_to_flags(&pairs));
    RunConfig::try_parse_from(args).map_err(clap_error)
}

/// Config echo for report headers.
pub fn echo(config: &RunConfig) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    map.insert("command".into(), config.command.name().into());
    for (k, v) in pairs(config) {
        if k != "out" && k != "timing" {
            map.insert(k, v.into());
        }
    }
    serde_json::Value::Object(map)
}
