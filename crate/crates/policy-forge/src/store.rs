//! On-disk policies and policy-set manifests.
//!
//! A policy is `<id>.json` (metadata) next to `<id>.bin`, its parameters as
//! little-endian f64 with a SHA-256 checksum recorded in the metadata. A set
//! is `<name>.manifest.json` listing members and success rates, plus the
//! diversity matrix in `<name>.diversity.csv`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diversity::DiversityMatrix;
use crate::policy::{Policy, PolicyKind};
use crate::pool::PolicySet;
use crate::ForgeError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyFile {
    pub id: String,
    pub kind: PolicyKind,
    pub route: Option<String>,
    pub observation: String,
    pub param_count: usize,
    pub weights: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberEntry {
    pub id: String,
    pub success_rate: f64,
    /// Relative to the manifest's directory.
    pub policy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetManifest {
    pub name: String,
    pub scene: String,
    pub diversity_score: f64,
    pub members: Vec<MemberEntry>,
    pub diversity_csv: String,
    /// Member index pairs that share no success scenario.
    #[serde(default)]
    pub flagged_pairs: Vec<(usize, usize)>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ForgeError + '_ {
    move |source| ForgeError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn corrupt(path: &Path, reason: impl Into<String>) -> ForgeError {
    ForgeError::Corrupt {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), ForgeError> {
    fs::write(path, bytes).map_err(io_err(path))
}

fn safe_name(id: &str) -> Result<&str, ForgeError> {
    let ok = !id.is_empty()
        && id != "."
        && id != ".."
        && id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
    if ok {
        Ok(id)
    } else {
        Err(ForgeError::InvalidConfig(format!("`{id}` is not usable as a file name")))
    }
}

fn to_bytes(params: &[f64]) -> Vec<u8> {
    params.iter().flat_map(|x| x.to_le_bytes()).collect()
}

/// Writes `<dir>/<id>.json` and `<dir>/<id>.bin`; returns the JSON path.
pub fn save_policy(dir: &Path, policy: &Policy) -> Result<PathBuf, ForgeError> {
    policy.validate()?;
    let name = safe_name(&policy.id)?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let blob = to_bytes(&policy.params);
    let weights = format!("{name}.bin");
    let meta = PolicyFile {
        id: policy.id.clone(),
        kind: policy.kind,
        route: policy.route.clone(),
        observation: policy.observation.clone(),
        param_count: policy.params.len(),
        weights: weights.clone(),
        sha256: hex::encode(Sha256::digest(&blob)),
    };
    write(&dir.join(&weights), &blob)?;
    let path = dir.join(format!("{name}.json"));
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    write(&path, json + "\n")?;
    Ok(path)
}

pub fn load_policy(path: &Path) -> Result<Policy, ForgeError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let meta: PolicyFile = serde_json::from_str(&text).map_err(|e| corrupt(path, e.to_string()))?;
    let blob_path = path.parent().unwrap_or(Path::new(".")).join(safe_name(&meta.weights)?);
    let blob = fs::read(&blob_path).map_err(io_err(&blob_path))?;
    if hex::encode(Sha256::digest(&blob)) != meta.sha256 {
        return Err(corrupt(&blob_path, "checksum mismatch"));
    }
    if blob.len() != 8 * meta.param_count {
        return Err(corrupt(&blob_path, format!("expected {} parameters", meta.param_count)));
    }
    let params = blob
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let policy = Policy {
        id: meta.id,
        kind: meta.kind,
        params,
        route: meta.route,
        observation: meta.observation,
    };
    policy.validate()?;
    Ok(policy)
}

/// Writes the set's manifest, diversity CSV and member policies (under
/// `<dir>/policies`); returns the manifest path.
pub fn save_set(dir: &Path, set: &PolicySet) -> Result<PathBuf, ForgeError> {
    let name = safe_name(&set.name)?;
    let policy_dir = dir.join("policies");
    let mut members = Vec::with_capacity(set.policies.len());
    for (p, rate) in set.policies.iter().zip(&set.success) {
        save_policy(&policy_dir, p)?;
        members.push(MemberEntry {
            id: p.id.clone(),
            success_rate: *rate,
            policy: format!("policies/{}.json", p.id),
        });
    }
    let csv_name = format!("{name}.diversity.csv");
    write(&dir.join(&csv_name), set.diversity.to_csv())?;
    let manifest = SetManifest {
        name: set.name.clone(),
        scene: set.scene.clone(),
        diversity_score: set.score(),
        members,
        diversity_csv: csv_name,
        flagged_pairs: set.diversity.empty_pairs.clone(),
    };
    let path = dir.join(format!("{name}.manifest.json"));
    write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")?;
    Ok(path)
}

fn parse_csv(path: &Path, text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), ForgeError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| corrupt(path, "empty diversity table"))?;
    let ids: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
    let mut values = Vec::with_capacity(ids.len());
    for (row, line) in lines.enumerate() {
        let mut cells = line.split(',');
        if cells.next() != ids.get(row).map(String::as_str) {
            return Err(corrupt(path, format!("row {row} does not match the header")));
        }
        let vals: Vec<f64> = cells
            .map(|c| c.parse::<f64>().map_err(|e| corrupt(path, e.to_string())))
            .collect::<Result<_, _>>()?;
        if vals.len() != ids.len() {
            return Err(corrupt(path, format!("row {row} has {} entries", vals.len())));
        }
        values.push(vals);
    }
    if values.len() != ids.len() {
        return Err(corrupt(path, "diversity table is not square"));
    }
    Ok((ids, values))
}

pub fn load_manifest(path: &Path) -> Result<SetManifest, ForgeError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| corrupt(path, e.to_string()))
}

pub fn load_set(path: &Path) -> Result<PolicySet, ForgeError> {
    let manifest = load_manifest(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let policies = manifest
        .members
        .iter()
        .map(|m| {
            let p = load_policy(&dir.join(&m.policy))?;
            if p.id != m.id {
                return Err(corrupt(path, format!("member `{}` loads as `{}`", m.id, p.id)));
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let csv_path = dir.join(safe_name(&manifest.diversity_csv)?);
    let text = fs::read_to_string(&csv_path).map_err(io_err(&csv_path))?;
    let (ids, values) = parse_csv(&csv_path, &text)?;
    if ids.iter().ne(manifest.members.iter().map(|m| &m.id)) {
        return Err(corrupt(&csv_path, "ids differ from the manifest"));
    }
    Ok(PolicySet {
        name: manifest.name,
        scene: manifest.scene,
        policies,
        success: manifest.members.iter().map(|m| m.success_rate).collect(),
        diversity: DiversityMatrix {
            ids,
            values,
            empty_pairs: manifest.flagged_pairs,
        },
    })
}
