//! Report writers. Every file carries the tool version and the resolved config.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Default)]
pub struct Written {
    pub files: Vec<PathBuf>,
}

pub struct Emitter<'a> {
    pub dir: PathBuf,
    pub stem: String,
    pub config: &'a ExperimentConfig,
    pub written: Written,
}

impl<'a> Emitter<'a> {
    pub fn new(config: &'a ExperimentConfig) -> io::Result<Self> {
        let dir = config.out_dir();
        fs::create_dir_all(&dir)?;
        Ok(Emitter { dir, stem: config.stem(), config, written: Written::default() })
    }

    fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        let name = if suffix.is_empty() { format!("{}.{ext}", self.stem) } else { format!("{}_{suffix}.{ext}", self.stem) };
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&mut self, suffix: &str, report: &T) -> io::Result<PathBuf> {
        let path = self.path(suffix, "json");
        fs::write(&path, json_bytes(self.config, report)?)?;
        self.written.files.push(path.clone());
        Ok(path)
    }

    pub fn csv(&mut self, suffix: &str, header: &[&str], rows: &[Vec<String>]) -> io::Result<PathBuf> {
        let path = self.path(suffix, "csv");
        fs::write(&path, csv_bytes(self.config, header, rows)?)?;
        self.written.files.push(path.clone());
        Ok(path)
    }
}

/// `{"tool", "version", "config", "report"}` as pretty JSON.
pub fn json_bytes<T: Serialize>(config: &ExperimentConfig, report: &T) -> io::Result<Vec<u8>> {
    let doc = json!({ "tool": "sadic", "version": VERSION, "config": config, "report": report });
    let mut out = serde_json::to_vec_pretty(&doc)?;
    out.push(b'\n');
    Ok(out)
}

/// CSV preceded by `# sadic <version>` and `# config <json>` comment lines.
pub fn csv_bytes(config: &ExperimentConfig, header: &[&str], rows: &[Vec<String>]) -> io::Result<Vec<u8>> {
    let mut out = Vec::new();
    writeln!(out, "# sadic {VERSION}")?;
    writeln!(out, "# config {}", serde_json::to_string(config)?)?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    drop(w);
    Ok(out)
}

/// Decimal rendering used for floating-point columns.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        x.to_string()
    }
}

pub fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
