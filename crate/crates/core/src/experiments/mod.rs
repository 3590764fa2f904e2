//! Config-driven sweeps, presets, scaling fits and artifact files.

mod config;
mod curve;
mod fit;
mod presets;
mod runner;

pub use config::{
    BasisChoice, MethodKind, ModelConfig, ModelKind, Point, PropagationChoice, RunConfig, Sweep, SweepAxis, TimeRule,
};
pub use curve::{format_float, CurveRow, QfiCurve, RowValue, CSV_HEADER};
pub use fit::{fit_curve, fit_scaling, FitForm, FitReport, MIN_FIT_POINTS};
pub use presets::{preset_configs, PRESETS, RANGE_NOTE};
pub use runner::{run_config, PointMeta, RunOutcome};

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub const TOOL_NAME: &str = "centralspin";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Version of the CSV and meta.json layouts.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct CurveMeta<'a> {
    file: String,
    config: &'a RunConfig,
    seed: u64,
    threads: usize,
    elapsed_ms: f64,
    failures: Vec<String>,
    points: &'a [PointMeta],
}

#[derive(Serialize)]
struct RunMeta<'a> {
    tool: &'static str,
    version: &'static str,
    schema_version: u32,
    timestamp: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
    curves: Vec<CurveMeta<'a>>,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Writes `<name>.csv` per outcome and one `meta.json` into `out`.
pub fn write_outputs(out: &Path, preset: Option<&str>, outcomes: &[RunOutcome]) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let mut curves = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let file = format!("{}.csv", o.config.name);
        let path = out.join(&file);
        fs::write(&path, o.curve.to_csv()).map_err(|e| io_err(&path, e))?;
        curves.push(CurveMeta {
            file,
            config: &o.config,
            seed: o.config.seed,
            threads: o.config.threads,
            elapsed_ms: o.elapsed_ms,
            failures: o.failures.iter().map(ToString::to_string).collect(),
            points: &o.points,
        });
    }
    let meta = RunMeta {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        schema_version: SCHEMA_VERSION,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        preset,
        note: preset.map(|_| RANGE_NOTE),
        curves,
    };
    let path = out.join("meta.json");
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Internal(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))
}

/// Runs every curve of a preset with `threads` workers and writes the files.
pub fn run_preset(name: &str, out: &Path, threads: usize) -> Result<Vec<RunOutcome>> {
    let outcomes = preset_configs(name)?
        .into_iter()
        .map(|mut cfg| {
            cfg.threads = threads;
            run_config(&cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    write_outputs(out, Some(name), &outcomes)?;
    Ok(outcomes)
}
