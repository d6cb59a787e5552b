//! Checksummed JSON Lines record logs.
//!
//! Every line carries the SHA-256 of its body, so a line cut short by a crash
//! or edited by hand is detected on load and its test is run again.

use std::collections::BTreeSet;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sim_core::TerminalStatus;

use crate::error::{HarnessError, Result};
use crate::fsutil::write_atomic;

/// Outcome of one simulation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario_id: String,
    /// Set member driving the other vehicles; `a+b` when they differ.
    pub policy_id: String,
    pub seed: u64,
    pub terminal: TerminalStatus,
    pub steps: usize,
    /// Smallest ego TTC over the episode; `None` when no contact was ever projected.
    pub min_ttc: Option<f64>,
    /// Failure trajectory relative to the campaign directory.
    pub trajectory: Option<String>,
    pub duration_ms: u64,
}

impl RunRecord {
    pub fn id(&self) -> String {
        test_id(&self.scenario_id, &self.policy_id)
    }

    pub fn min_ttc_value(&self) -> f64 {
        self.min_ttc.unwrap_or(f64::INFINITY)
    }

    /// The record without its wall-clock duration, which differs between runs.
    pub fn outcome(&self) -> RunRecord {
        RunRecord {
            duration_ms: 0,
            ..self.clone()
        }
    }
}

pub fn test_id(scenario_id: &str, policy_id: &str) -> String {
    format!("{scenario_id}.{policy_id}")
}

#[derive(Serialize, Deserialize)]
struct Line<T> {
    #[serde(flatten)]
    body: T,
    sha256: String,
}

fn digest<T: Serialize>(body: &T) -> String {
    let bytes = serde_json::to_vec(body).expect("record serializes");
    hex::encode(Sha256::digest(bytes))
}

pub fn encode<T: Serialize>(body: &T) -> String {
    let sha256 = digest(body);
    serde_json::to_string(&Line { body, sha256 }).expect("record serializes")
}

fn decode<T: Serialize + DeserializeOwned>(line: &str) -> std::result::Result<T, String> {
    let parsed: Line<T> = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if digest(&parsed.body) != parsed.sha256 {
        return Err("checksum mismatch".into());
    }
    Ok(parsed.body)
}

/// Records that survived loading, plus the number of damaged lines dropped.
#[derive(Debug)]
pub struct Loaded<T> {
    pub records: Vec<T>,
    pub dropped: usize,
    /// False when the file must be rewritten before appending to it.
    pub clean: bool,
}

/// Append-only log of checksummed records with a single writer.
#[derive(Debug, Clone)]
pub struct RecordLog {
    path: PathBuf,
}

impl RecordLog {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Reads every intact record; a missing file is an empty log.
    pub fn load<T: Serialize + DeserializeOwned>(&self) -> Result<Loaded<T>> {
        let text = match fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(HarnessError::io(&self.path)(e)),
        };
        let mut records = Vec::new();
        let mut dropped = 0;
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match decode(line) {
                Ok(r) => records.push(r),
                Err(reason) => {
                    log::warn!("{}:{}: dropping damaged record ({reason})", self.path.display(), n + 1);
                    dropped += 1;
                }
            }
        }
        let clean = dropped == 0 && (text.is_empty() || text.ends_with('\n'));
        Ok(Loaded { records, dropped, clean })
    }

    /// Replaces the log with exactly `records`.
    pub fn rewrite<T: Serialize>(&self, records: &[T]) -> Result<()> {
        let text: String = records.iter().map(|r| encode(r) + "\n").collect();
        write_atomic(&self.path, text)
    }

    pub fn append<T: Serialize>(&self, records: &[T]) -> Result<()> {
        if records.is_empty() {
            return Ok(());
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(HarnessError::io(&self.path))?;
        let text: String = records.iter().map(|r| encode(r) + "\n").collect();
        file.write_all(text.as_bytes()).map_err(HarnessError::io(&self.path))?;
        file.sync_data().map_err(HarnessError::io(&self.path))
    }
}

/// Ids already present, for resuming.
pub fn ids<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> BTreeSet<String> {
    records.into_iter().map(RunRecord::id).collect()
}
