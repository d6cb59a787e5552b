//! Candidate pools: training style families, evaluating success and
//! diversity on held-out perturbations, and extracting policy sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sim_core::{generate_perturbations, seed, PerturbationSpec, Scene, SimState, Vec2};

use crate::diversity::{diversity_matrix, positions, DiversityMatrix};
use crate::evaluate::{rollout_all, success_of};
use crate::policy::Policy;
use crate::prior::{Style, STYLE_LEN};
use crate::select::{default_anchor, select_diverse, select_less_diverse, Selection};
use crate::train::{train_policy, TrainConfig};
use crate::ForgeError;

/// Vehicle slot whose paths define trajectory distance.
pub const TRACKED_SLOT: usize = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyPool {
    pub scene: String,
    pub policies: Vec<Policy>,
    /// Success rate per policy on the evaluation set.
    pub success: Vec<f64>,
    pub diversity: DiversityMatrix,
}

/// Per policy: success rate, per-scenario success and tracked-slot path.
struct Outcomes {
    rates: Vec<f64>,
    flags: Vec<Vec<bool>>,
    paths: Vec<Vec<Vec<Vec2>>>,
}

fn rollouts(
    policies: &[Policy],
    scene: &Scene,
    initials: &[SimState],
    step_budget: usize,
    rollout_seed: u64,
) -> Result<Outcomes, ForgeError> {
    if initials.is_empty() {
        return Err(ForgeError::NoScenarios);
    }
    let mut rates = Vec::with_capacity(policies.len());
    let mut flags = Vec::with_capacity(policies.len());
    let mut paths = Vec::with_capacity(policies.len());
    for p in policies {
        let trajs = rollout_all(p, scene, initials, step_budget, rollout_seed)?;
        let report = success_of(&trajs);
        rates.push(report.rate);
        flags.push(report.successes);
        paths.push(trajs.iter().map(|t| positions(t, TRACKED_SLOT)).collect());
    }
    Ok(Outcomes { rates, flags, paths })
}

/// Pairwise inter-policy diversity of `policies` on `initials`, each policy
/// driving every vehicle.
pub fn interpolicy_diversity(
    policies: &[Policy],
    scene: &Scene,
    initials: &[SimState],
    step_budget: usize,
    rollout_seed: u64,
) -> Result<DiversityMatrix, ForgeError> {
    if policies.len() < 2 {
        return Err(ForgeError::TooFewPolicies {
            need: 2,
            have: policies.len(),
        });
    }
    let out = rollouts(policies, scene, initials, step_budget, rollout_seed)?;
    let ids: Vec<String> = policies.iter().map(|p| p.id.clone()).collect();
    diversity_matrix(&ids, &out.paths, &out.flags)
}

impl PolicyPool {
    pub fn evaluate(
        policies: Vec<Policy>,
        scene: &Scene,
        initials: &[SimState],
        step_budget: usize,
        rollout_seed: u64,
    ) -> Result<Self, ForgeError> {
        let out = rollouts(&policies, scene, initials, step_budget, rollout_seed)?;
        let ids: Vec<String> = policies.iter().map(|p| p.id.clone()).collect();
        let diversity = diversity_matrix(&ids, &out.paths, &out.flags)?;
        Ok(Self {
            scene: scene.id.clone(),
            policies,
            success: out.rates,
            diversity,
        })
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.policies.iter().position(|p| p.id == id)
    }

    pub fn anchor(&self, min_success: f64) -> Option<usize> {
        default_anchor(&self.diversity.ids, &self.success, min_success)
    }

    pub fn select_diverse(&self, name: &str, k: usize, min_success: f64) -> Result<PolicySet, ForgeError> {
        let sel = select_diverse(&self.diversity, &self.success, k, min_success)?;
        Ok(self.policy_set(name, &sel))
    }

    pub fn select_less_diverse(
        &self,
        name: &str,
        anchor: &str,
        k: usize,
        min_success: f64,
    ) -> Result<PolicySet, ForgeError> {
        let a = self
            .index_of(anchor)
            .ok_or_else(|| ForgeError::UnknownPolicy(anchor.to_string()))?;
        let sel = select_less_diverse(&self.diversity, &self.success, a, k, min_success)?;
        Ok(self.policy_set(name, &sel))
    }

    /// The whole pool as a set, e.g. for storage.
    pub fn to_set(&self, name: &str) -> PolicySet {
        let all: Vec<usize> = (0..self.policies.len()).collect();
        self.policy_set(name, &Selection { members: all, score: self.diversity.score() })
    }

    fn policy_set(&self, name: &str, sel: &Selection) -> PolicySet {
        PolicySet {
            name: name.to_string(),
            scene: self.scene.clone(),
            policies: sel.members.iter().map(|&i| self.policies[i].clone()).collect(),
            success: sel.members.iter().map(|&i| self.success[i]).collect(),
            diversity: self.diversity.submatrix(&sel.members),
        }
    }
}

/// Policies assigned to other vehicles in campaigns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySet {
    pub name: String,
    pub scene: String,
    pub policies: Vec<Policy>,
    pub success: Vec<f64>,
    pub diversity: DiversityMatrix,
}

impl PolicySet {
    /// Inter-policy diversity of the set.
    pub fn score(&self) -> f64 {
        self.diversity.score()
    }

    pub fn min_success(&self) -> f64 {
        self.success.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Box the family styles are drawn from; offsets are stratified across families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StyleRange {
    pub cruise: (f64, f64),
    pub offset: (f64, f64),
    pub horizon: (f64, f64),
    pub margin: (f64, f64),
}

impl Default for StyleRange {
    fn default() -> Self {
        Self {
            cruise: (1.5, 2.0),
            offset: (-0.6, 0.6),
            horizon: (2.0, 4.5),
            margin: (0.15, 0.6),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    /// Independently trained policies, one per sampled style.
    pub families: usize,
    /// Perturbed copies of the anchor added to the pool.
    pub anchor_variants: usize,
    pub variant_style_sigma: f64,
    pub variant_weight_sigma: f64,
    pub styles: StyleRange,
    pub train: TrainConfig,
    pub eval_count: usize,
    /// Disjoint from the training perturbation seed.
    pub eval_seed: u64,
    pub eval_perturbation: PerturbationSpec,
    pub step_budget: usize,
    pub min_success: f64,
}

impl Default for PoolConfig {
    fn default() -> Self {
        Self {
            families: 12,
            anchor_variants: 9,
            variant_style_sigma: 0.02,
            variant_weight_sigma: 0.01,
            styles: StyleRange::default(),
            train: TrainConfig::default(),
            eval_count: 40,
            eval_seed: 0x6576_616c_0000,
            eval_perturbation: PerturbationSpec::default(),
            step_budget: 300,
            min_success: 0.9,
        }
    }
}

impl PoolConfig {
    pub fn validate(&self) -> Result<(), ForgeError> {
        self.train.validate()?;
        if self.families + self.anchor_variants < 2 {
            return Err(ForgeError::InvalidConfig("a pool needs at least two policies".into()));
        }
        if self.eval_count == 0 || self.step_budget == 0 {
            return Err(ForgeError::InvalidConfig("evaluation needs scenarios and a step budget".into()));
        }
        if self.eval_seed == self.train.perturbation_seed {
            return Err(ForgeError::InvalidConfig("evaluation and training seeds must differ".into()));
        }
        Ok(())
    }
}

fn family_style(range: &StyleRange, family: usize, families: usize, rng: &mut ChaCha8Rng) -> Style {
    let u = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| lo + (hi - lo) * rng.random::<f64>();
    let stratum = (family as f64 + rng.random::<f64>()) / families as f64;
    Style {
        cruise: u(rng, range.cruise),
        offset: range.offset.0 + (range.offset.1 - range.offset.0) * stratum,
        horizon: u(rng, range.horizon),
        margin: u(rng, range.margin),
    }
}

/// Trains the style families, picks the anchor, adds its variants and
/// evaluates the whole pool. Deterministic given `config` and `seed`.
pub fn build_pool(scene: &Scene, config: &PoolConfig, seed: u64) -> Result<PolicyPool, ForgeError> {
    config.validate()?;
    let route = scene.ego.route.clone();
    let initials = generate_perturbations(scene, &config.eval_perturbation, config.eval_count, config.eval_seed)?;
    let rollout_seed = seed::mix(config.eval_seed, 1);

    let families: Vec<Policy> = (0..config.families)
        .into_par_iter()
        .map(|f| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed, 100 + f as u64));
            let train = TrainConfig {
                initial_style: family_style(&config.styles, f, config.families, &mut rng),
                ..config.train.clone()
            };
            let mut p = train_policy(scene, &route, &train, seed::mix(seed, 200 + f as u64))?;
            p.id = format!("{}-f{f:02}", scene.id);
            Ok(p)
        })
        .collect::<Result<_, ForgeError>>()?;

    let rates = rollouts(&families, scene, &initials, config.step_budget, rollout_seed)?.rates;
    let ids: Vec<String> = families.iter().map(|p| p.id.clone()).collect();
    let mut policies = families.clone();
    if config.anchor_variants > 0 {
        let anchor = default_anchor(&ids, &rates, config.min_success)
            .or_else(|| default_anchor(&ids, &rates, 0.0))
            .ok_or(ForgeError::TooFewPolicies { need: 1, have: 0 })?;
        let base = &families[anchor];
        let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed, 300));
        for v in 0..config.anchor_variants {
            let mut p = base.clone();
            p.id = format!("{}-v{v:02}", base.id);
            for (d, x) in p.params.iter_mut().enumerate() {
                let s = if d < STYLE_LEN {
                    config.variant_style_sigma
                } else {
                    config.variant_weight_sigma
                };
                let z: f64 = StandardNormal.sample(&mut rng);
                *x += s * z;
            }
            policies.push(p);
        }
    }
    PolicyPool::evaluate(policies, scene, &initials, config.step_budget, rollout_seed)
}
