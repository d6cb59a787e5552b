#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use harness_cli::policies::tiny_pool_config;
use harness_cli::{CampaignConfig, RunRecord};
use policy_forge::store::save_set;
use policy_forge::{build_pool, PolicyPool};
use sim_core::scenes;

/// Tiny right-turn pool, trained once per test binary.
pub fn tiny_pool() -> &'static PolicyPool {
    static POOL: OnceLock<PolicyPool> = OnceLock::new();
    POOL.get_or_init(|| build_pool(&scenes::right_turn(), &tiny_pool_config(), 5).unwrap())
}

/// Saves a `k`-member diverse set of the tiny pool under `dir`.
pub fn set_manifest(dir: &Path, k: usize) -> PathBuf {
    let set = tiny_pool().select_diverse("diverse", k, 0.0).unwrap();
    save_set(dir, &set).unwrap()
}

pub fn config(manifest: PathBuf, patterns: usize) -> CampaignConfig {
    CampaignConfig {
        scene: scenes::RIGHT_TURN.into(),
        manifest,
        patterns,
        seed: 3,
        ..CampaignConfig::default()
    }
}

pub fn sorted_outcomes(records: &[RunRecord]) -> Vec<RunRecord> {
    let mut out: Vec<RunRecord> = records.iter().map(RunRecord::outcome).collect();
    out.sort_by_key(RunRecord::id);
    out
}
