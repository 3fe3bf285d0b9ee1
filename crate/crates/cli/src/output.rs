use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use squeeze_core::table::ResultTable;

use crate::error::{CliError, CliResult};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamped on every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub command: String,
    pub config_digest: String,
    pub code_version: String,
    pub seed: u64,
    /// Seconds since the epoch, from `SOURCE_DATE_EPOCH` (0 when unset).
    pub timestamp: u64,
}

impl Meta {
    pub fn new(command: &str, config_digest: &str, seed: u64) -> Self {
        Self {
            command: command.into(),
            config_digest: config_digest.into(),
            code_version: CODE_VERSION.into(),
            seed,
            timestamp: source_date_epoch(),
        }
    }

    pub fn stamp(&self, table: &mut ResultTable) {
        table.set_meta("command", self.command.as_str());
        table.set_meta("config_digest", self.config_digest.as_str());
        table.set_meta("code_version", self.code_version.as_str());
        table.set_meta("seed", self.seed.to_string());
        table.set_meta("timestamp", self.timestamp.to_string());
    }
}

fn source_date_epoch() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(path)
            .map_err(|e| CliError::config(format!("cannot create output directory {}: {e}", path.display())))?;
        Ok(Self(path.to_path_buf()))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let p = self.path(name);
        std::fs::write(&p, contents).map_err(|e| CliError::config(format!("cannot write {}: {e}", p.display())))?;
        Ok(p)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("reports always serialize");
        text.push('\n');
        self.write(name, &text)
    }

    pub fn write_csv(&self, name: &str, table: &ResultTable) -> CliResult<PathBuf> {
        self.write(name, &table.to_csv())
    }
}

/// Config digest embedded in a previously written output, if any.
pub fn embedded_digest(path: &Path) -> CliResult<Option<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read overlay {}: {e}", path.display())))?;
    if let Some(first) = text.lines().next().filter(|l| l.starts_with('#')) {
        return Ok(first
            .split_whitespace()
            .find_map(|kv| kv.strip_prefix("config_digest="))
            .map(str::to_string));
    }
    let value: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(_) => return Ok(None),
    };
    Ok(value
        .pointer("/meta/config_digest")
        .and_then(|v| v.as_str())
        .map(str::to_string))
}

pub type CsvRows = Vec<Vec<Option<f64>>>;

/// Parses a CSV written by [`OutDir::write_csv`]: header and rows of
/// optional numbers (text cells become `None`).
pub fn read_csv(path: &Path) -> CliResult<(Vec<String>, CsvRows)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::config(format!("{} is empty", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().ok()).collect())
        .collect();
    Ok((header, rows))
}
