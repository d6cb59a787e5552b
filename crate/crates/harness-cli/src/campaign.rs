//! Batch execution of the planner against perturbed scenarios and a policy set.
//!
//! Layout of a campaign directory:
//!
//! ```text
//! campaign.json     configuration, scene and set members
//! runs.jsonl        one checksummed RunRecord per test
//! failures/         trajectories of the failed tests
//! verdicts.jsonl    written by classification
//! evidence/         counterfactual evidence trajectories
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use planner_idm::IdmPlanner;
use policy_forge::store::load_set;
use policy_forge::PolicySet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sim_core::io::{write_trajectory, Provenance};
use sim_core::{
    generate_perturbations, seed, Controller, EndPredicate, FailurePredicate, Scenario, Scene, SimConfig, SimState,
    Simulator,
};

use crate::config::{CampaignConfig, ClassifySettings};
use crate::error::{HarnessError, Result};
use crate::fsutil::{read_json, write_atomic, write_json};
use crate::records::{self, RecordLog, RunRecord};
use crate::scenes::resolve_scene;

pub const META_FILE: &str = "campaign.json";
pub const RUNS_FILE: &str = "runs.jsonl";
pub const FAILURES_DIR: &str = "failures";

/// Directory of the campaign for `scene` against policy set `set`.
pub fn campaign_dir(out: &Path, scene: &str, set: &str) -> PathBuf {
    out.join("campaigns").join(format!("{scene}-{set}"))
}

/// Everything needed to interpret or resume a campaign directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignMeta {
    pub scene: Scene,
    pub policy_set: String,
    pub members: Vec<String>,
    pub config: CampaignConfig,
}

impl CampaignMeta {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(META_FILE);
        if !path.is_file() {
            return Err(HarnessError::Invalid(format!(
                "{} is not a campaign directory (no {META_FILE}); run `crashsieve run` first",
                dir.display()
            )));
        }
        read_json(&path)
    }

    pub fn load_set(&self) -> Result<PolicySet> {
        load_manifest_set(&self.config.manifest)
    }

    /// Identity for resuming: classification settings may change between runs.
    fn run_identity(&self) -> CampaignMeta {
        let mut m = self.clone();
        m.config.classify = ClassifySettings::default();
        m
    }
}

pub fn load_manifest_set(path: &Path) -> Result<PolicySet> {
    if !path.is_file() {
        return Err(HarnessError::Invalid(format!(
            "policy-set manifest {} not found; create it with `crashsieve train` and `crashsieve select`, or pass --manifest",
            path.display()
        )));
    }
    Ok(load_set(path)?)
}

pub type Resolver = BTreeMap<String, Arc<dyn Controller>>;

pub fn resolver_of(set: &PolicySet) -> Resolver {
    set.policies
        .iter()
        .map(|p| (p.id.clone(), Arc::new(p.clone()) as Arc<dyn Controller>))
        .collect()
}

pub fn scenario_id(scene: &str, pattern: usize) -> String {
    format!("{scene}-p{pattern:04}")
}

/// Per-test seed: a stable hash of the master seed, scenario id and policy id.
pub fn test_seed(master: u64, scenario_id: &str, policy_id: &str) -> u64 {
    seed::derive(master, &["run", scenario_id, policy_id])
}

pub fn patterns_seed(master: u64, scene: &str) -> u64 {
    seed::derive(master, &["patterns", scene])
}

/// Policy of each other vehicle for set member `member`.
pub fn assignment(members: &[String], member: usize, others: usize, mix: bool) -> Vec<String> {
    (0..others)
        .map(|j| members[if mix { (member + j) % members.len() } else { member }].clone())
        .collect()
}

pub fn policy_label(assignment: &[String]) -> String {
    if assignment.windows(2).all(|w| w[0] == w[1]) {
        assignment.first().cloned().unwrap_or_default()
    } else {
        assignment.join("+")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CampaignReport {
    pub total: usize,
    pub executed: usize,
    pub skipped: usize,
    pub dropped: usize,
    pub failures: usize,
}

struct Job {
    scenario_id: String,
    initial: SimState,
    assignment: Vec<String>,
}

struct Runner<'a> {
    dir: &'a Path,
    scene: &'a Scene,
    resolver: &'a Resolver,
    config: &'a CampaignConfig,
}

impl Runner<'_> {
    fn execute(&self, job: &Job) -> Result<RunRecord> {
        let started = Instant::now();
        let policy_id = policy_label(&job.assignment);
        let rng_seed = test_seed(self.config.seed, &job.scenario_id, &policy_id);
        let sim = Simulator::new(
            self.scene,
            self.resolver,
            SimConfig {
                dt: self.config.dt,
                rng_seed,
            },
        );
        let scenario = Scenario {
            policy_assignment: job.assignment.clone(),
            initial_state: job.initial.clone(),
            failure: FailurePredicate::default(),
            end: EndPredicate {
                goal_reached: true,
                step_budget: self.config.step_budget,
            },
        };
        let trajectory = sim.run(&IdmPlanner::new(self.config.planner), &scenario, None)?;
        let min_ttc = analysis::min_ttc(&trajectory, self.scene);
        let mut path = None;
        if trajectory.terminal.is_failure() {
            let rel = format!("{FAILURES_DIR}/{}.jsonl", records::test_id(&job.scenario_id, &policy_id));
            let mut bytes = Vec::new();
            let provenance = Provenance {
                campaign_seed: self.config.seed,
                scenario_id: job.scenario_id.clone(),
                policy_id: policy_id.clone(),
            };
            write_trajectory(&mut bytes, &trajectory, &provenance)?;
            write_atomic(&self.dir.join(&rel), bytes)?;
            path = Some(rel);
        }
        Ok(RunRecord {
            scenario_id: job.scenario_id.clone(),
            policy_id,
            seed: rng_seed,
            terminal: trajectory.terminal,
            steps: trajectory.len() - 1,
            min_ttc: min_ttc.is_finite().then_some(min_ttc),
            trajectory: path,
            duration_ms: started.elapsed().as_millis() as u64,
        })
    }
}

/// Runs every (pattern, set member) test not yet recorded in `dir`.
///
/// Records are appended in a fixed order, chunk by chunk, so an interrupted
/// campaign resumes where it stopped and the final record set does not depend
/// on the number of worker threads.
pub fn run_campaign(config: &CampaignConfig, dir: &Path, jobs: usize) -> Result<CampaignReport> {
    config.validate()?;
    let scene = resolve_scene(&config.scene)?;
    let set = load_manifest_set(&config.manifest)?;
    if set.policies.is_empty() {
        return Err(HarnessError::Invalid(format!("policy set `{}` has no members", set.name)));
    }
    if set.scene != scene.id {
        log::warn!("policy set `{}` was selected on scene `{}`, running on `{}`", set.name, set.scene, scene.id);
    }
    let members: Vec<String> = set.policies.iter().map(|p| p.id.clone()).collect();
    let meta = CampaignMeta {
        scene: scene.clone(),
        policy_set: set.name.clone(),
        members: members.clone(),
        config: config.clone(),
    };
    let meta_path = dir.join(META_FILE);
    if meta_path.is_file() {
        let existing: CampaignMeta = read_json(&meta_path)?;
        if existing.run_identity() != meta.run_identity() {
            return Err(HarnessError::Invalid(format!(
                "{} holds a campaign with a different configuration; pick another --out or remove it",
                dir.display()
            )));
        }
    }
    write_json(&meta_path, &meta)?;

    let initials = generate_perturbations(&scene, &config.perturbation, config.patterns, patterns_seed(config.seed, &scene.id))
        .map_err(|e| HarnessError::Invalid(e.to_string()))?;
    let all_jobs: Vec<Job> = initials
        .iter()
        .enumerate()
        .flat_map(|(i, init)| {
            let members = &members;
            let scene_id = &scene.id;
            (0..members.len()).map(move |k| Job {
                scenario_id: scenario_id(scene_id, i),
                initial: init.clone(),
                assignment: assignment(members, k, init.len() - 1, config.mix_policies),
            })
        })
        .collect();

    let log = RecordLog::new(dir.join(RUNS_FILE));
    let loaded = log.load::<RunRecord>()?;
    if !loaded.clean {
        log.rewrite(&loaded.records)?;
    }
    let done = records::ids(&loaded.records);
    let pending: Vec<&Job> = all_jobs
        .iter()
        .filter(|j| !done.contains(&records::test_id(&j.scenario_id, &policy_label(&j.assignment))))
        .collect();
    let mut report = CampaignReport {
        total: all_jobs.len(),
        skipped: all_jobs.len() - pending.len(),
        dropped: loaded.dropped,
        ..CampaignReport::default()
    };

    let resolver = resolver_of(&set);
    let runner = Runner {
        dir,
        scene: &scene,
        resolver: &resolver,
        config,
    };
    let pool = thread_pool(jobs)?;
    for chunk in pending.chunks(64 * jobs.max(1)) {
        let results: Vec<RunRecord> = pool.install(|| chunk.par_iter().map(|j| runner.execute(j)).collect::<Result<_>>())?;
        report.executed += results.len();
        report.failures += results.iter().filter(|r| r.terminal.is_failure()).count();
        log.append(&results)?;
        log::info!("{}: {}/{} tests recorded", dir.display(), report.skipped + report.executed, report.total);
    }

    let recorded = log.load::<RunRecord>()?;
    if recorded.records.len() != report.total || recorded.dropped > 0 {
        return Err(HarnessError::Runtime(format!(
            "{} holds {} intact records, expected {}",
            log.path().display(),
            recorded.records.len(),
            report.total
        )));
    }
    Ok(report)
}

pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Runtime(format!("cannot start worker threads: {e}")))
}

/// Intact run records of a campaign.
pub fn load_runs(dir: &Path) -> Result<Vec<RunRecord>> {
    let loaded = RecordLog::new(dir.join(RUNS_FILE)).load()?;
    if loaded.dropped > 0 {
        return Err(HarnessError::corrupt(
            &dir.join(RUNS_FILE),
            format!("{} damaged records; rerun `crashsieve run` to repair", loaded.dropped),
        ));
    }
    Ok(loaded.records)
}
