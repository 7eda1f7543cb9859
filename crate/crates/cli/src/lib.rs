// SPDX-License-Identifier: Apache-2.0

//! Command implementations behind the `fogscope` binary.
//!
//! Every command returns a list of [`Artifact`]s. The binary writes each one
//! into the output directory (`FOGSCOPE_OUT`, default `fogscope-out`) and
//! echoes the primary artifact to stdout.
//!
//! Column order per command:
//!
//! | command    | columns |
//! |------------|---------|
//! | `evaluate` | `r, B_bps, E_w, D_fog_s, D_cloud_s, D_avg_s, feasible` |
//! | `sweep`    | `group, <one column per axis>, r, B_bps, E_w, D_fog_s, D_cloud_s, D_avg_s, feasible` |
//! | `optimize` | `r, B_bps, E_w, D_avg_s, rank, crowding` |
//! | `simulate` | see [`commands::SIMULATE_COLUMNS`] |
//! | `fov`      | `h_m, v_mps, along_track_m, dwell_s, cloud_feasible_at_1.68s, margin_s` |
//! | `power`    | `mass_kg, power_w, delta_power_plus_250g_w` |

pub mod commands;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use fogscope_core::report::{render_artifact, ResultTable, RunManifest};
use thiserror::Error;

pub const OUT_DIR_ENV: &str = "FOGSCOPE_OUT";
pub const DEFAULT_OUT_DIR: &str = "fogscope-out";

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, unparsable or out-of-range input.
    #[error("{0}")]
    Input(String),
    /// TDP exceeded or motor overloaded.
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Optimizer(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Optimizer(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// Written to stdout as well as to disk.
    pub primary: bool,
    /// Absolute, or relative to the output directory.
    pub path: PathBuf,
    pub contents: String,
}

impl Artifact {
    pub fn table(name: impl Into<PathBuf>, manifest: &RunManifest, table: &ResultTable) -> Self {
        Self {
            primary: false,
            path: name.into(),
            contents: render_artifact(manifest, table),
        }
    }

    pub fn primary(mut self) -> Self {
        self.primary = true;
        self
    }
}

/// Honours `SOURCE_DATE_EPOCH` so that reruns can be byte-identical.
pub fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    now.to_rfc3339_opts(SecondsFormat::Secs, true)
}

pub fn manifest(command: &str, scenario_digest: Option<String>, seed: Option<u64>) -> RunManifest {
    RunManifest {
        command: command.to_owned(),
        scenario_digest,
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        timestamp: timestamp(),
    }
}

pub fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Writes every artifact under `dir` and the primary ones to `stdout`.
pub fn emit(artifacts: &[Artifact], dir: &Path, mut stdout: impl Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    fs::create_dir_all(dir).map_err(io)?;
    for a in artifacts {
        let path = dir.join(&a.path);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io)?;
        }
        fs::write(&path, &a.contents)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if a.primary {
            stdout.write_all(a.contents.as_bytes()).map_err(io)?;
        }
    }
    stdout.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_stable() {
        assert_eq!(CliError::Input(String::new()).exit_code(), 2);
        assert_eq!(CliError::Infeasible(String::new()).exit_code(), 3);
        assert_eq!(CliError::Optimizer(String::new()).exit_code(), 4);
    }

    #[test]
    fn emit_writes_files_and_echoes_primary() {
        let dir = tempfile::tempdir().unwrap();
        let arts = vec![
            Artifact {
                primary: true,
                path: "a.csv".into(),
                contents: "x\n1\n".into(),
            },
            Artifact {
                primary: false,
                path: "sub/b.csv".into(),
                contents: "y\n".into(),
            },
        ];
        let mut out = Vec::new();
        emit(&arts, dir.path(), &mut out).unwrap();
        assert_eq!(out, b"x\n1\n");
        assert_eq!(
            fs::read_to_string(dir.path().join("sub/b.csv")).unwrap(),
            "y\n"
        );
    }
}
