//! Training the candidate pool and selecting the Diverse and LessDiverse sets.

use std::path::{Path, PathBuf};

use policy_forge::store::save_set;
use policy_forge::{build_pool, PolicyPool, PoolConfig, TrainConfig};
use sim_core::Scene;

use crate::campaign::load_manifest_set;
use crate::error::{HarnessError, Result};

pub const POOL_SET: &str = "pool";
pub const DIVERSE_SET: &str = "diverse";
pub const LESS_DIVERSE_SET: &str = "less-diverse";

pub fn policy_dir(out: &Path, scene: &str) -> PathBuf {
    out.join("policies").join(scene)
}

pub fn manifest_path(out: &Path, scene: &str, set: &str) -> PathBuf {
    policy_dir(out, scene).join(format!("{set}.manifest.json"))
}

/// A pool small enough for smoke tests: four families, three variants and
/// one short training round.
pub fn tiny_pool_config() -> PoolConfig {
    PoolConfig {
        families: 4,
        anchor_variants: 3,
        eval_count: 12,
        train: TrainConfig {
            population: 4,
            iterations: 1,
            episodes: 2,
            ..TrainConfig::default()
        },
        ..PoolConfig::default()
    }
}

/// Trains the pool for `scene` and stores it as the `pool` set.
pub fn train(scene: &Scene, config: &PoolConfig, seed: u64, out: &Path) -> Result<(PathBuf, PolicyPool)> {
    let pool = build_pool(scene, config, seed)?;
    let path = save_set(&policy_dir(out, &scene.id), &pool.to_set(POOL_SET))?;
    Ok((path, pool))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selected {
    pub diverse: PathBuf,
    pub less_diverse: PathBuf,
    pub diverse_score: f64,
    pub less_diverse_score: f64,
    pub diverse_min_success: f64,
    pub less_diverse_min_success: f64,
}

/// Greedy diverse selection and the anchor-centred LessDiverse set, both of
/// size `k` among members with success rate at least `min_success`.
pub fn select(pool_manifest: &Path, k: usize, min_success: f64) -> Result<Selected> {
    if k < 2 {
        return Err(HarnessError::Invalid(format!("set size must be at least 2, got {k}")));
    }
    if !(0.0..=1.0).contains(&min_success) {
        return Err(HarnessError::Invalid(format!("success floor must lie in [0, 1], got {min_success}")));
    }
    let set = load_manifest_set(pool_manifest)?;
    let pool = PolicyPool {
        scene: set.scene.clone(),
        policies: set.policies,
        success: set.success,
        diversity: set.diversity,
    };
    let qualifying = pool.success.iter().filter(|&&s| s >= min_success).count();
    if qualifying < k {
        return Err(HarnessError::Invalid(format!(
            "only {qualifying} pool members reach success {min_success}, cannot select {k}"
        )));
    }
    let anchor = pool.anchor(min_success).expect("a qualifying member exists");
    let anchor_id = pool.policies[anchor].id.clone();
    let diverse = pool.select_diverse(DIVERSE_SET, k, min_success)?;
    let less = pool.select_less_diverse(LESS_DIVERSE_SET, &anchor_id, k, min_success)?;
    let dir = pool_manifest.parent().unwrap_or(Path::new("."));
    Ok(Selected {
        diverse: save_set(dir, &diverse)?,
        less_diverse: save_set(dir, &less)?,
        diverse_score: diverse.score(),
        less_diverse_score: less.score(),
        diverse_min_success: diverse.min_success(),
        less_diverse_min_success: less.min_success(),
    })
}
