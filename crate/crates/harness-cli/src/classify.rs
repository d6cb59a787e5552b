//! Avoidability classification of every failure in a campaign.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufRead;
use std::path::Path;

use analysis::VerdictRecord;
use counterfactual::{classify, FailureCase};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sim_core::io::{load_trajectory, write_trajectory, Provenance};
use sim_core::seed;

use crate::campaign::{load_runs, resolver_of, thread_pool, CampaignMeta, Resolver};
use crate::config::ClassifySettings;
use crate::error::{HarnessError, Result};
use crate::fsutil::{read_json, write_atomic, write_json};
use crate::records::RunRecord;

pub const VERDICTS_FILE: &str = "verdicts.jsonl";
pub const SETTINGS_FILE: &str = "classify.json";
pub const ERRORS_FILE: &str = "classify_errors.jsonl";
pub const EVIDENCE_DIR: &str = "evidence";

pub fn case_id(policy_set: &str, run: &RunRecord) -> String {
    format!("{policy_set}.{}", run.id())
}

pub fn case_seed(master: u64, case_id: &str) -> u64 {
    seed::derive(master, &["classify", case_id])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseError {
    pub case_id: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassifyReport {
    pub failures: usize,
    pub classified: usize,
    pub skipped: usize,
    pub errors: Vec<CaseError>,
}

/// Verdicts already on disk; damaged lines are dropped so their cases rerun.
fn load_existing(path: &Path) -> Result<Vec<VerdictRecord>> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(HarnessError::io(path)(e)),
    };
    let mut out = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(HarnessError::io(path))?;
        match serde_json::from_str::<VerdictRecord>(&line) {
            Ok(v) => out.push(v),
            Err(_) if line.trim().is_empty() => {}
            Err(e) => log::warn!("{}: dropping damaged verdict ({e})", path.display()),
        }
    }
    Ok(out)
}

fn write_verdicts(path: &Path, verdicts: &BTreeMap<String, VerdictRecord>) -> Result<()> {
    let text: String = verdicts
        .values()
        .map(|v| serde_json::to_string(v).expect("verdict serializes") + "\n")
        .collect();
    write_atomic(path, text)
}

struct Classifier<'a> {
    dir: &'a Path,
    meta: &'a CampaignMeta,
    resolver: &'a Resolver,
    settings: &'a ClassifySettings,
}

impl Classifier<'_> {
    fn run(&self, run: &RunRecord) -> std::result::Result<VerdictRecord, String> {
        let id = case_id(&self.meta.policy_set, run);
        let rel = run.trajectory.as_ref().ok_or("failure has no recorded trajectory")?;
        let (trajectory, _) = load_trajectory(&self.dir.join(rel)).map_err(|e| e.to_string())?;
        let case = FailureCase::new(
            id.clone(),
            run.scenario_id.clone(),
            run.policy_id.clone(),
            trajectory,
            self.meta.config.planner,
        )
        .map_err(|e| e.to_string())?;
        let seed = case_seed(self.meta.config.seed, &id);
        let verdict = classify(&case, &self.meta.scene, self.resolver, &self.settings.to_config(), seed)
            .map_err(|e| e.to_string())?;

        let evidence = format!("{EVIDENCE_DIR}/{id}.jsonl");
        let mut bytes = Vec::new();
        let provenance = Provenance {
            campaign_seed: self.meta.config.seed,
            scenario_id: run.scenario_id.clone(),
            policy_id: run.policy_id.clone(),
        };
        write_trajectory(&mut bytes, &verdict.evidence, &provenance).map_err(|e| e.to_string())?;
        write_atomic(&self.dir.join(&evidence), bytes).map_err(|e| e.to_string())?;

        Ok(VerdictRecord {
            case_id: id,
            scene_id: self.meta.scene.id.clone(),
            policy_set: self.meta.policy_set.clone(),
            policy_id: run.policy_id.clone(),
            label: verdict.label,
            collision: run.terminal,
            collision_step: case.collision_step(),
            rewind_step: verdict.rewind_step,
            theta_prime: verdict.theta_prime,
            trials: verdict.trials,
            evidence,
            seeds: verdict.seeds,
        })
    }
}

/// Classifies every failure of the campaign in `dir` that has no verdict yet
/// and rewrites `verdicts.jsonl` sorted by case id. A case that errors is
/// reported and skipped; the others still get verdicts.
pub fn classify_campaign(dir: &Path, settings: &ClassifySettings, jobs: usize) -> Result<ClassifyReport> {
    let meta = CampaignMeta::load(dir)?;
    let set = meta.load_set()?;
    classify_with(dir, &meta, &resolver_of(&set), settings, jobs)
}

/// [`classify_campaign`] with the other vehicles' controllers supplied by the caller.
pub fn classify_with(
    dir: &Path,
    meta: &CampaignMeta,
    resolver: &Resolver,
    settings: &ClassifySettings,
    jobs: usize,
) -> Result<ClassifyReport> {
    settings.validate()?;
    let runs = load_runs(dir)?;
    let mut failures: Vec<&RunRecord> = runs.iter().filter(|r| r.terminal.is_failure()).collect();
    failures.sort_by_key(|r| case_id(&meta.policy_set, r));

    let verdict_path = dir.join(VERDICTS_FILE);
    let settings_path = dir.join(SETTINGS_FILE);
    let same_settings = settings_path.is_file() && read_json::<ClassifySettings>(&settings_path)? == *settings;
    let wanted: BTreeMap<String, &RunRecord> = failures.iter().map(|r| (case_id(&meta.policy_set, r), *r)).collect();
    let mut verdicts: BTreeMap<String, VerdictRecord> = if same_settings {
        load_existing(&verdict_path)?
            .into_iter()
            .filter(|v| wanted.contains_key(&v.case_id))
            .map(|v| (v.case_id.clone(), v))
            .collect()
    } else {
        BTreeMap::new()
    };
    write_json(&settings_path, settings)?;
    write_verdicts(&verdict_path, &verdicts)?;

    let pending: Vec<&RunRecord> = wanted
        .iter()
        .filter(|(id, _)| !verdicts.contains_key(*id))
        .map(|(_, r)| *r)
        .collect();
    let mut report = ClassifyReport {
        failures: failures.len(),
        skipped: failures.len() - pending.len(),
        ..ClassifyReport::default()
    };
    let classifier = Classifier {
        dir,
        meta,
        resolver,
        settings,
    };
    let pool = thread_pool(jobs)?;
    for chunk in pending.chunks(8 * jobs.max(1)) {
        let results: Vec<_> = pool.install(|| chunk.par_iter().map(|r| (r, classifier.run(r))).collect());
        for (run, result) in results {
            match result {
                Ok(v) => {
                    report.classified += 1;
                    verdicts.insert(v.case_id.clone(), v);
                }
                Err(error) => {
                    let id = case_id(&meta.policy_set, run);
                    log::error!("{id}: {error}");
                    report.errors.push(CaseError { case_id: id, error });
                }
            }
        }
        write_verdicts(&verdict_path, &verdicts)?;
        log::info!("{}: {}/{} failures classified", dir.display(), verdicts.len(), report.failures);
    }

    let errors_path = dir.join(ERRORS_FILE);
    if report.errors.is_empty() {
        if errors_path.exists() {
            fs::remove_file(&errors_path).map_err(HarnessError::io(&errors_path))?;
        }
    } else {
        let text: String = report
            .errors
            .iter()
            .map(|e| serde_json::to_string(e).expect("error serializes") + "\n")
            .collect();
        write_atomic(&errors_path, text)?;
    }
    Ok(report)
}
