//! Derivative-free training: cross-entropy method or antithetic evolution
//! strategies over the style and residual weights, with every vehicle in a
//! training episode running a copy of the candidate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sim_core::{
    detect_collisions, generate_perturbations, seed, step_joint, CollisionEvent, Context, Controller,
    PerturbationSpec, Scene, SimState,
};

use crate::policy::Policy;
use crate::prior::{Style, STYLE_LEN};
use crate::ForgeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Cem,
    Es,
}

/// Per-vehicle episodic reward: `progress` times the completed fraction of
/// the route to the goal, plus the penalty for each kind of collision the
/// vehicle took part in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub progress: f64,
    pub collision: f64,
    pub wall: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            progress: 1.0,
            collision: -2.0,
            wall: -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub optimizer: Optimizer,
    pub population: usize,
    pub iterations: usize,
    /// Fraction of the population kept as elites (CEM).
    pub elite_fraction: f64,
    /// Step size on the normalized-rank gradient estimate (ES).
    pub learning_rate: f64,
    /// Initial sampling deviation of the style entries.
    pub style_sigma: f64,
    /// Initial sampling deviation of the network weights.
    pub weight_sigma: f64,
    pub rewards: RewardWeights,
    /// Number of perturbed training episodes every candidate is scored on.
    pub episodes: usize,
    pub step_budget: usize,
    pub dt: f64,
    pub perturbation: PerturbationSpec,
    pub perturbation_seed: u64,
    /// Style of the initial policy.
    pub initial_style: Style,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            optimizer: Optimizer::Cem,
            population: 8,
            iterations: 4,
            elite_fraction: 0.25,
            learning_rate: 0.05,
            style_sigma: 0.1,
            weight_sigma: 0.05,
            rewards: RewardWeights::default(),
            episodes: 6,
            step_budget: 300,
            dt: 0.1,
            perturbation: PerturbationSpec::default(),
            perturbation_seed: 0x7472_6169_6e00,
            initial_style: Style::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ForgeError> {
        let bad = |m: &str| Err(ForgeError::InvalidConfig(m.into()));
        if self.population < 2 {
            return bad("population must be at least 2");
        }
        if !(self.rewards.progress >= 0.0 && self.rewards.collision <= 0.0 && self.rewards.wall <= 0.0) {
            return bad("reward weights need penalties <= 0 <= progress");
        }
        if !(self.elite_fraction > 0.0 && self.elite_fraction <= 1.0) {
            return bad("elite fraction must lie in (0, 1]");
        }
        if !(self.style_sigma >= 0.0 && self.weight_sigma >= 0.0 && self.learning_rate >= 0.0) {
            return bad("sigmas and learning rate must be non-negative");
        }
        if self.episodes == 0 || self.step_budget == 0 {
            return bad("episodes and step budget must be positive");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        self.perturbation.validate()?;
        Ok(())
    }

    fn sigma(&self, len: usize) -> Vec<f64> {
        (0..len)
            .map(|i| if i < STYLE_LEN { self.style_sigma } else { self.weight_sigma })
            .collect()
    }
}

/// Mean per-vehicle reward of one training episode. The episode ends at the
/// first collision of any pair, once every vehicle has passed its goal, or at
/// the step budget.
pub fn episode_reward(
    policy: &Policy,
    scene: &Scene,
    initial: &SimState,
    weights: &RewardWeights,
    step_budget: usize,
    dt: f64,
    rng_seed: u64,
) -> f64 {
    let n = scene.vehicle_count();
    let start: Vec<f64> = (0..n)
        .map(|i| scene.route(i).project(initial.vehicles[i].position()).s)
        .collect();
    let progress_of = |state: &SimState, i: usize| scene.route(i).project(state.vehicles[i].position()).s;
    let mut state = initial.clone();
    let mut hit_vehicle = vec![false; n];
    let mut hit_wall = vec![false; n];
    for _ in 0..step_budget {
        let step_seed = seed::mix(rng_seed, state.step_index as u64);
        let ctx = Context { scene, state: &state, dt };
        let actions: Vec<_> = (0..n)
            .map(|slot| policy.act(&ctx, slot, seed::vehicle_seed(step_seed, slot)))
            .collect();
        state = step_joint(scene, &state, &actions, dt);
        let events = detect_collisions(&state, scene);
        for e in &events {
            match *e {
                CollisionEvent::EgoVehicle { other } => {
                    hit_vehicle[0] = true;
                    hit_vehicle[other] = true;
                }
                CollisionEvent::VehicleVehicle { a, b } => {
                    hit_vehicle[a] = true;
                    hit_vehicle[b] = true;
                }
                CollisionEvent::EgoWall { .. } => hit_wall[0] = true,
                CollisionEvent::VehicleWall { vehicle, .. } => hit_wall[vehicle] = true,
            }
        }
        if !events.is_empty() || (0..n).all(|i| progress_of(&state, i) >= scene.vehicle(i).goal_s) {
            break;
        }
    }
    let total: f64 = (0..n)
        .map(|i| {
            let span = (scene.vehicle(i).goal_s - start[i]).max(1e-9);
            let frac = ((progress_of(&state, i) - start[i]) / span).clamp(0.0, 1.0);
            let mut r = weights.progress * frac;
            if hit_vehicle[i] {
                r += weights.collision;
            }
            if hit_wall[i] {
                r += weights.wall;
            }
            r
        })
        .sum();
    total / n as f64
}

/// Mean episodic reward over `initials`; `None` for candidates with
/// non-finite parameters or rewards.
pub fn mean_reward(
    policy: &Policy,
    scene: &Scene,
    initials: &[SimState],
    config: &TrainConfig,
    rng_seed: u64,
) -> Option<f64> {
    if policy.validate().is_err() {
        return None;
    }
    let sum: f64 = initials
        .iter()
        .enumerate()
        .map(|(i, init)| {
            episode_reward(
                policy,
                scene,
                init,
                &config.rewards,
                config.step_budget,
                config.dt,
                seed::mix(rng_seed, i as u64),
            )
        })
        .sum();
    let mean = sum / initials.len() as f64;
    mean.is_finite().then_some(mean)
}

struct Search<'a> {
    scene: &'a Scene,
    initials: Vec<SimState>,
    config: &'a TrainConfig,
    template: Policy,
    rollout_seed: u64,
    best: Option<(Vec<f64>, f64)>,
}

impl Search<'_> {
    fn score(&mut self, candidates: &[Vec<f64>]) -> Vec<Option<f64>> {
        let scores: Vec<Option<f64>> = candidates
            .par_iter()
            .map(|params| {
                let mut p = self.template.clone();
                p.params.clone_from(params);
                mean_reward(&p, self.scene, &self.initials, self.config, self.rollout_seed)
            })
            .collect();
        for (params, score) in candidates.iter().zip(&scores) {
            if let Some(r) = *score {
                if self.best.as_ref().is_none_or(|(_, b)| r > *b) {
                    self.best = Some((params.clone(), r));
                }
            }
        }
        scores
    }
}

fn gaussian(rng: &mut ChaCha8Rng, mean: &[f64], sigma: &[f64]) -> Vec<f64> {
    mean.iter()
        .zip(sigma)
        .map(|(m, s)| {
            let z: f64 = StandardNormal.sample(rng);
            m + s * z
        })
        .collect()
}

/// Trains a network policy for `route` in `scene`. Deterministic given the
/// configuration and `seed`. Returns the best candidate seen over the run;
/// reward ties keep the earliest candidate, so the initial policy survives a
/// degenerate reward.
pub fn train_policy(scene: &Scene, route: &str, config: &TrainConfig, seed: u64) -> Result<Policy, ForgeError> {
    config.validate()?;
    scene.map.route(route)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed, 0));
    let mut initial = Policy::network(format!("{route}-{seed:016x}"), config.initial_style, &mut rng);
    initial.route = Some(route.to_string());
    if config.iterations == 0 {
        return Ok(initial);
    }
    let initials = generate_perturbations(scene, &config.perturbation, config.episodes, config.perturbation_seed)?;
    let mut search = Search {
        scene,
        initials,
        config,
        template: initial.clone(),
        rollout_seed: seed::mix(seed, 1),
        best: None,
    };
    let mut mean = initial.params.clone();
    let mut sigma = config.sigma(mean.len());
    let floor: Vec<f64> = sigma.iter().map(|s| 0.1 * s).collect();

    for it in 0..config.iterations {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed, 2 + it as u64));
        match config.optimizer {
            Optimizer::Cem => {
                let mut candidates = vec![mean.clone()];
                while candidates.len() < config.population {
                    candidates.push(gaussian(&mut rng, &mean, &sigma));
                }
                let scores = search.score(&candidates);
                let mut ranked: Vec<(usize, f64)> = scores
                    .iter()
                    .enumerate()
                    .filter_map(|(i, s)| s.map(|r| (i, r)))
                    .collect();
                if ranked.is_empty() {
                    continue;
                }
                ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
                let n_elite = ((config.elite_fraction * config.population as f64).ceil() as usize)
                    .clamp(1, ranked.len());
                let elites: Vec<&Vec<f64>> = ranked[..n_elite].iter().map(|(i, _)| &candidates[*i]).collect();
                for d in 0..mean.len() {
                    let m = elites.iter().map(|e| e[d]).sum::<f64>() / n_elite as f64;
                    let var = elites.iter().map(|e| (e[d] - m).powi(2)).sum::<f64>() / n_elite as f64;
                    mean[d] = m;
                    sigma[d] = var.sqrt().max(floor[d]);
                }
            }
            Optimizer::Es => {
                let zeros = vec![0.0; mean.len()];
                let pairs = config.population / 2;
                let noise: Vec<Vec<f64>> = (0..pairs).map(|_| gaussian(&mut rng, &zeros, &sigma)).collect();
                let mut candidates = vec![mean.clone()];
                for eps in &noise {
                    candidates.push(mean.iter().zip(eps).map(|(m, e)| m + e).collect());
                    candidates.push(mean.iter().zip(eps).map(|(m, e)| m - e).collect());
                }
                let scores = search.score(&candidates);
                let centered = centered_ranks(&scores[1..]);
                let mut step = vec![0.0; mean.len()];
                for (k, eps) in noise.iter().enumerate() {
                    let w = centered[2 * k] - centered[2 * k + 1];
                    for (s, e) in step.iter_mut().zip(eps) {
                        *s += w * e;
                    }
                }
                let scale = config.learning_rate / pairs.max(1) as f64;
                for (m, s) in mean.iter_mut().zip(&step) {
                    *m += scale * s;
                }
            }
        }
    }
    let mut out = initial;
    if let Some((params, _)) = search.best {
        out.params = params;
    }
    Ok(out)
}

/// Ranks mapped onto `[-0.5, 0.5]`; discarded candidates rank lowest.
fn centered_ranks(scores: &[Option<f64>]) -> Vec<f64> {
    let n = scores.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let key = |s: &Option<f64>| s.unwrap_or(f64::NEG_INFINITY);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key(&scores[a]).total_cmp(&key(&scores[b])));
    let mut out = vec![0.0; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank as f64 / (n - 1) as f64 - 0.5;
    }
    out
}
