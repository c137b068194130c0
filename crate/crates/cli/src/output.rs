//! Run manifests and atomic result files.

use crate::args::{Command, Global};
use fracmin_core::{FracError, Result};
use serde::Serialize;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub const TOOL_VERSION: &str = concat!("fracmin ", env!("CARGO_PKG_VERSION"));

/// Everything a subcommand produced. `stdout` is the primary document.
#[derive(Debug, Default)]
pub struct Report {
    pub stdout: String,
    pub files: Vec<(String, String)>,
    /// Set when the run finished but its verdict is a failure.
    pub failure: Option<FracError>,
}

impl Report {
    pub fn json<T: Serialize>(value: &T) -> Self {
        Self { stdout: to_json(value), ..Self::default() }
    }

    pub fn with_file(mut self, name: &str, body: String) -> Self {
        self.files.push((name.to_string(), body));
        self
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("result serializes");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct Timestamps {
    pub started_unix: f64,
    pub finished_unix: f64,
}

/// Timestamps are the only field that varies between identical runs; result
/// files never embed them.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub subcommand: &'static str,
    pub config: &'a Command,
    pub global: &'a Global,
    pub seed: u64,
    pub tool_version: &'static str,
    pub files: Vec<String>,
    pub timestamps: Timestamps,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

fn write_atomic(dir: &Path, name: &str, body: &str) -> Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    let io = |e: std::io::Error| FracError::Input(format!("{}: {e}", dir.join(name).display()));
    fs::write(&tmp, body).map_err(io)?;
    fs::rename(&tmp, dir.join(name)).map_err(io)
}

/// Writes every result file and then the manifest.
pub fn write_all(dir: &Path, report: &Report, manifest: &RunManifest) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| FracError::Input(format!("{}: {e}", dir.display())))?;
    for (name, body) in &report.files {
        write_atomic(dir, name, body)?;
    }
    write_atomic(dir, "manifest.json", &to_json(manifest))
}
