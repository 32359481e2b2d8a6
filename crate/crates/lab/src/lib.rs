//! Command-line laboratory around `loewner-core`.
//!
//! [`run`] is the whole binary: parse, dispatch, write, map errors to exit
//! statuses (0 ok, 2 usage, 3 numeric failure or golden mismatch, 4 I/O).

pub mod commands;
pub mod config;
pub mod error;
pub mod golden;
pub mod parallel;
pub mod params;
pub mod report;
pub mod sampling;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use config::{Command, Format, RunConfig, OUT_DIR_ENV};
use error::{exit, LabError, Result};
use report::RunReport;

/// Runs a computational subcommand. `golden-compare` is not one.
pub fn dispatch(config: &RunConfig) -> Result<RunReport> {
    let mut report = RunReport::new(config.command.name(), config::echo(config));
    let start = Instant::now();
    match &config.command {
        Command::WittCheck(a) => commands::witt_check(a, &mut report)?,
        Command::LkEvolve(a) => commands::lk_evolve(a, &mut report)?,
        Command::LkConserved(a) => commands::lk_conserved(a, &mut report)?,
        Command::Geodesic(a) => commands::geodesic(a, &mut report)?,
        Command::SleSample(a) => commands::sle_sample(a, &mut report)?,
        Command::SleMartingale(a) => commands::sle_martingale(a, &mut report)?,
        Command::CircleFlow(a) => commands::circle_flow(a, &mut report)?,
        Command::KdvRun(a) => commands::kdv_run(a, &mut report)?,
        Command::GoldenCompare(_) => return Err(LabError::Usage("golden-compare produces no report".into())),
    }
    if config.output.timing {
        report.diagnostic_f("wall_time_s", start.elapsed().as_secs_f64());
    }
    Ok(report)
}

pub fn render(config: &RunConfig, report: &RunReport) -> Result<String> {
    match config.output.format {
        Format::LineJson => Ok(report.to_line_json()),
        Format::Csv => report.to_csv(),
    }
}

/// `--out`, else `$LOEWNER_LAB_OUT_DIR/<command>.<ext>`, else stdout.
pub fn output_path(config: &RunConfig) -> Option<PathBuf> {
    if let Some(p) = &config.output.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty())?;
    let ext = match config.output.format {
        Format::LineJson => "jsonl",
        Format::Csv => "csv",
    };
    Some(PathBuf::from(dir).join(format!("{}.{ext}", config.command.name())))
}

fn emit(config: &RunConfig, text: &str) -> Result<()> {
    match output_path(config) {
        Some(p) => report::write_atomic(&p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| LabError::io("<stdout>", e))
        }
    }
}

fn golden_compare(config: &RunConfig, a: &config::GoldenCompareArgs) -> Result<()> {
    if !(a.rtol >= 0.0 && a.atol >= 0.0) {
        return Err(LabError::Usage("tolerances must be non-negative".into()));
    }
    let got = report::ParsedReport::read(&a.report)?;
    let want = report::ParsedReport::read(&a.golden)?;
    let diffs = golden::compare(&got, &want, golden::Tolerance { rtol: a.rtol, atol: a.atol })?;
    let mut text = String::new();
    if diffs.is_empty() {
        text.push_str("PASS\n");
    } else {
        text.push_str(&format!("FAIL {} field(s)\n", diffs.len()));
        for d in &diffs {
            text.push_str(&format!("{d}\n"));
        }
    }
    emit(config, &text)?;
    match diffs.first() {
        None => Ok(()),
        Some(d) => Err(LabError::Mismatch(format!("{} field(s) differ, first {}", diffs.len(), d.field))),
    }
}

pub fn execute(config: &RunConfig) -> Result<()> {
    if let Command::GoldenCompare(a) = &config.command {
        return golden_compare(config, a);
    }
    let report = dispatch(config)?;
    emit(config, &render(config, &report)?)
}

/// Full binary behaviour; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let result = config::parse_args(args).and_then(|c| execute(&c));
    match result {
        Ok(()) => exit::OK,
        Err(LabError::Info(text)) => {
            print!("{text}");
            exit::OK
        }
        Err(e) => {
            match &e {
                LabError::Usage(msg) if msg.starts_with("error:") => eprint!("{msg}"),
                LabError::Usage(msg) => eprintln!("error: {msg}"),
                other => eprintln!("loewner-lab: {other}"),
            }
            e.exit_code()
        }
    }
}
