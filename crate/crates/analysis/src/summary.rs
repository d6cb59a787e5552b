//! Verdict records and the failure-type and collision-partner tables.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use counterfactual::{Label, VerdictSeeds};
use planner_idm::PlannerParams;
use serde::{Deserialize, Serialize};
use sim_core::TerminalStatus;

use crate::collision::CollisionRecord;
use crate::AnalysisError;

/// One line of a verdict file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub case_id: String,
    pub scene_id: String,
    pub policy_set: String,
    pub policy_id: String,
    pub label: Label,
    pub collision: TerminalStatus,
    pub collision_step: usize,
    pub rewind_step: usize,
    pub theta_prime: Option<PlannerParams>,
    pub trials: usize,
    /// Path of the evidence trajectory, relative to the campaign directory.
    pub evidence: String,
    pub seeds: VerdictSeeds,
}

/// Parses JSON Lines verdicts; blank lines are allowed, malformed lines are errors.
pub fn parse_verdicts<R: BufRead>(reader: R) -> Result<Vec<VerdictRecord>, AnalysisError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| AnalysisError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn read_verdicts(path: &Path) -> Result<Vec<VerdictRecord>, AnalysisError> {
    let file = std::fs::File::open(path)?;
    parse_verdicts(std::io::BufReader::new(file))
}

/// Counts of each failure type; `total` always equals the sum of the three.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub total: usize,
    pub planner_avoidable: usize,
    pub generic_avoidable: usize,
    pub unavoidable: usize,
}

impl FailureCounts {
    pub fn add(&mut self, label: Label) {
        self.total += 1;
        match label {
            Label::PlannerAvoidable => self.planner_avoidable += 1,
            Label::GenericAvoidable => self.generic_avoidable += 1,
            Label::Unavoidable => self.unavoidable += 1,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.total == self.planner_avoidable + self.generic_avoidable + self.unavoidable
    }
}

/// Key of a summary row.
pub type SetKey = (String, String);

/// Failure-type counts per (scene, policy set).
pub fn summarize_failures(verdicts: &[VerdictRecord]) -> BTreeMap<SetKey, FailureCounts> {
    let mut table: BTreeMap<SetKey, FailureCounts> = BTreeMap::new();
    for v in verdicts {
        table
            .entry((v.scene_id.clone(), v.policy_set.clone()))
            .or_default()
            .add(v.label);
    }
    table
}

/// Avoidable (A-P or A-G) collisions per partner name, walls included.
pub fn summarize_collision_partners<'a>(
    records: impl IntoIterator<Item = &'a CollisionRecord>,
) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for r in records {
        if r.label != Label::Unavoidable {
            *counts.entry(r.partner.label()).or_insert(0) += 1;
        }
    }
    counts
}

pub fn write_failure_table(path: &Path, table: &BTreeMap<SetKey, FailureCounts>) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["scene", "policy_set", "total", "A-P", "A-G", "U"])?;
    for ((scene, set), c) in table {
        w.write_record([
            scene.clone(),
            set.clone(),
            c.total.to_string(),
            c.planner_avoidable.to_string(),
            c.generic_avoidable.to_string(),
            c.unavoidable.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Partner counts per (scene, policy set), one column per partner name.
pub fn write_partner_table(path: &Path, table: &BTreeMap<SetKey, BTreeMap<String, usize>>) -> Result<(), AnalysisError> {
    let partners: std::collections::BTreeSet<&String> = table.values().flat_map(|m| m.keys()).collect();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["scene".to_string(), "policy_set".to_string()];
    header.extend(partners.iter().map(|p| p.to_string()));
    w.write_record(&header)?;
    for ((scene, set), counts) in table {
        let mut row = vec![scene.clone(), set.clone()];
        row.extend(partners.iter().map(|p| counts.get(*p).copied().unwrap_or(0).to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
