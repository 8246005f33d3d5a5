//! Artifact emission. Every file goes through [`OutputSet`], which records a
//! SHA-256 digest; [`OutputSet::finish`] writes the manifest last.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::JobError;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_SCHEMA: &str = "fewbody-manifest/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub files: Vec<ManifestEntry>,
}

pub struct OutputSet {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
}

fn io_error(path: &Path, e: std::io::Error) -> JobError {
    JobError::runtime(format!("i/o error at {}: {e}", path.display()))
}

impl OutputSet {
    pub fn new(dir: &Path) -> Result<Self, JobError> {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
        })
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8], description: &str) -> Result<(), JobError> {
        if rel == MANIFEST_FILE || self.entries.iter().any(|e| e.path == rel) {
            return Err(JobError::runtime(format!("output {rel} written twice")));
        }
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
        self.entries.push(ManifestEntry {
            path: rel.to_string(),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(bytes)),
            description: description.to_string(),
        });
        Ok(())
    }

    pub fn write_json(&mut self, rel: &str, value: &impl Serialize, description: &str) -> Result<(), JobError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| JobError::runtime(format!("serializing {rel}: {e}")))?;
        text.push('\n');
        self.write(rel, text.as_bytes(), description)
    }

    pub fn write_csv(&mut self, rel: &str, csv: &Csv, description: &str) -> Result<(), JobError> {
        self.write(rel, csv.text.as_bytes(), description)
    }

    pub fn finish(mut self, command: &str, seed: Option<u64>, config: &impl Serialize) -> Result<Manifest, JobError> {
        self.entries.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            schema: MANIFEST_SCHEMA.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config: serde_json::to_value(config)
                .map_err(|e| JobError::runtime(format!("serializing config: {e}")))?,
            files: self.entries,
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| JobError::runtime(format!("serializing manifest: {e}")))?;
        text.push('\n');
        let path = self.dir.join(MANIFEST_FILE);
        fs::write(&path, text).map_err(|e| io_error(&path, e))?;
        Ok(manifest)
    }
}

/// CSV text with floats fixed at 17 significant digits.
pub struct Csv {
    text: String,
}

pub enum Cell<'a> {
    F(f64),
    U(usize),
    S(&'a str),
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match c {
                Cell::F(x) => write!(self.text, "{x:.16e}"),
                Cell::U(k) => write!(self.text, "{k}"),
                Cell::S(s) if s.contains([',', '"']) => write!(self.text, "\"{}\"", s.replace('"', "\"\"")),
                Cell::S(s) => write!(self.text, "{s}"),
            }
            .expect("writing to a String cannot fail");
        }
        self.text.push('\n');
    }
}
