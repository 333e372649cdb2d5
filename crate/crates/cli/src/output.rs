//! Output directory: CSV tables, JSON summaries, SVG plots and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use clurep_core::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Command, ExperimentConfig};

pub struct OutputDir {
    dir: PathBuf,
    written: Vec<(String, String)>,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        self.written.push((name.to_string(), hex::encode(Sha256::digest(bytes))));
        log::info!("wrote {}", path.display());
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, table: &Table) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let to_err = |e: csv::Error| Error::Config(format!("writing {name}: {e}"));
        w.write_record(&table.header).map_err(to_err)?;
        for row in &table.rows {
            w.write_record(row).map_err(to_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("writing {name}: {e}")))?;
        self.write_bytes(name, &bytes)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::Config(format!("serialising {name}: {e}")))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_svg(&mut self, name: &str, svg: &str) -> Result<()> {
        self.write_bytes(name, svg.as_bytes())
    }

    /// Writes `manifest.json` listing every output with its SHA-256.
    pub fn finish(mut self, command: Command, config: &ExperimentConfig, threads: usize, elapsed: Duration) -> Result<()> {
        let outputs: Vec<ManifestEntry> = self
            .written
            .iter()
            .map(|(file, sha256)| ManifestEntry {
                file: file.clone(),
                sha256: sha256.clone(),
            })
            .collect();
        let manifest = Manifest {
            tool: "clurep",
            version: env!("CARGO_PKG_VERSION"),
            command: command.name(),
            config,
            threads,
            started_unix: SystemTime::now()
                .checked_sub(elapsed)
                .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
                .map(|d| d.as_secs())
                .unwrap_or(0),
            wall_clock_seconds: elapsed.as_secs_f64(),
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Config(format!("serialising manifest: {e}")))?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        self.written.clear();
        Ok(())
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a ExperimentConfig,
    threads: usize,
    started_unix: u64,
    wall_clock_seconds: f64,
    outputs: Vec<ManifestEntry>,
}

/// A CSV table with a fixed header.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Formats a float for CSV output; shortest representation that round-trips.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn point(coords: &[f64]) -> String {
    coords.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_checksums() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), num(0.5)]);
        out.write_csv("scores.csv", &t).unwrap();
        out.finish(Command::Pairwise, &ExperimentConfig::default(), 1, Duration::from_millis(5)).unwrap();
        let csv = fs::read(dir.path().join("scores.csv")).unwrap();
        assert_eq!(csv, b"a,b\n1,0.5\n");
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["outputs"][0]["sha256"], hex::encode(Sha256::digest(&csv)));
        assert_eq!(manifest["command"], "pairwise");
    }
}
