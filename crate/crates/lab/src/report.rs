//! Report files. Every JSON report is `{"header": .., "report": ..}`; the
//! wall-clock timestamp lives only in the header so that the rest of the
//! file is a pure function of (config, seed).

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::LabResult;

pub const TOOL: &str = "toral";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config_hash: String,
    pub seed: u64,
    pub generated_at_unix: u64,
}

/// SHA-256 over the canonical JSON of the effective configuration.
pub fn config_hash<T: Serialize>(subcommand: &str, config: &T, seed: u64) -> String {
    #[derive(Serialize)]
    struct Keyed<'a, T> {
        subcommand: &'a str,
        seed: u64,
        config: &'a T,
    }
    let bytes = serde_json::to_vec(&Keyed { subcommand, seed, config }).expect("config serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct ReportWriter {
    dir: PathBuf,
    header: Header,
    written: Vec<PathBuf>,
}

impl ReportWriter {
    pub fn new<T: Serialize>(dir: &Path, subcommand: &str, config: &T, seed: u64) -> LabResult<Self> {
        fs::create_dir_all(dir)?;
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Ok(ReportWriter {
            dir: dir.to_path_buf(),
            header: Header {
                tool: TOOL.into(),
                version: VERSION.into(),
                subcommand: subcommand.into(),
                config_hash: config_hash(subcommand, config, seed),
                seed,
                generated_at_unix: now,
            },
            written: Vec::new(),
        })
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> LabResult<PathBuf> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            header: &'a Header,
            report: &'a T,
        }
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, &Doc { header: &self.header, report })?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(path)
    }

    /// Plain JSON without a header (for exchange formats such as SFT specs).
    pub fn raw_json<T: Serialize>(&mut self, name: &str, value: &T) -> LabResult<PathBuf> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(path)
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> LabResult<PathBuf> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(path)
    }

    pub fn jsonl<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> LabResult<PathBuf> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        for r in rows {
            serde_json::to_writer(&mut w, &r)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(path)
    }
}
