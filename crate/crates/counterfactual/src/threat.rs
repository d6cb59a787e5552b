//! Monte Carlo threat estimation under a uniformly random baseline policy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sim_core::seed;

use crate::CounterfactualError;

/// Classification of a state reached during a rollout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Running,
    /// In F.
    Failure,
    /// In E without F.
    Safe,
}

/// A deterministic environment that can be rolled out under the baseline policy.
pub trait RolloutEnv {
    type State: Clone;
    type Action: Copy;

    fn step(&self, state: &Self::State, action: Self::Action) -> Self::State;
    fn outcome(&self, state: &Self::State) -> Outcome;
    /// One draw of the baseline policy at `state`.
    fn random_action(&self, state: &Self::State, rng: &mut ChaCha8Rng) -> Self::Action;
}

/// How far a rollout looks ahead after the evaluated action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    /// At most this many transitions, the evaluated action included.
    Steps(usize),
    /// Until the episode ends.
    Episode,
}

impl Horizon {
    fn allows(self, taken: usize) -> bool {
        match self {
            Horizon::Steps(n) => taken < n,
            Horizon::Episode => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    MonteCarlo,
}

/// Threat function under the uniformly random baseline policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreatModel {
    pub baseline: BaselinePolicy,
    pub rollouts: usize,
    pub horizon: Horizon,
    pub estimator: Estimator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselinePolicy {
    Random,
}

impl Default for ThreatModel {
    fn default() -> Self {
        Self {
            baseline: BaselinePolicy::Random,
            rollouts: 8,
            horizon: Horizon::Steps(20),
            estimator: Estimator::MonteCarlo,
        }
    }
}

impl ThreatModel {
    pub fn validate(&self) -> Result<(), CounterfactualError> {
        if self.rollouts == 0 {
            return Err(CounterfactualError::InvalidConfig("threat rollout count must be at least 1".into()));
        }
        if self.horizon == Horizon::Steps(0) {
            return Err(CounterfactualError::InvalidConfig("threat horizon must be at least one step".into()));
        }
        Ok(())
    }
}

/// Result of the deterministic first transition shared by every rollout.
pub(crate) enum FirstStep<S> {
    Decided(Outcome),
    Continue(S),
}

pub(crate) fn first_step<E: RolloutEnv>(env: &E, state: &E::State, action: E::Action) -> FirstStep<E::State> {
    let next = env.step(state, action);
    match env.outcome(&next) {
        Outcome::Running => FirstStep::Continue(next),
        decided => FirstStep::Decided(decided),
    }
}

/// Whether rollout `index` reaches F from `start`, one transition having been taken already.
pub(crate) fn rollout_fails<E: RolloutEnv>(env: &E, start: &E::State, horizon: Horizon, seed: u64, index: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed, index as u64));
    let mut state = start.clone();
    let mut taken = 1;
    while horizon.allows(taken) {
        let a = env.random_action(&state, &mut rng);
        state = env.step(&state, a);
        taken += 1;
        match env.outcome(&state) {
            Outcome::Running => {}
            Outcome::Failure => return true,
            Outcome::Safe => return false,
        }
    }
    false
}

/// Fraction of baseline rollouts reaching F after taking `action` at `state`.
///
/// Rollout `i` draws its baseline actions from `mix(seed, i)`, so two
/// actions evaluated with the same seed see the same random streams.
pub fn estimate_threat<E: RolloutEnv>(env: &E, state: &E::State, action: E::Action, model: &ThreatModel, seed: u64) -> f64 {
    failure_count(env, state, action, model, seed, usize::MAX) as f64 / model.rollouts.max(1) as f64
}

/// Failing rollouts, counting stops early once `stop_at` is reached.
pub(crate) fn failure_count<E: RolloutEnv>(
    env: &E,
    state: &E::State,
    action: E::Action,
    model: &ThreatModel,
    seed: u64,
    stop_at: usize,
) -> usize {
    let rollouts = model.rollouts.max(1);
    let start = match first_step(env, state, action) {
        FirstStep::Decided(Outcome::Failure) => return rollouts,
        FirstStep::Decided(_) => return 0,
        FirstStep::Continue(s) => s,
    };
    let mut failures = 0;
    for i in 0..rollouts {
        if rollout_fails(env, &start, model.horizon, seed, i) {
            failures += 1;
            if failures >= stop_at {
                break;
            }
        }
    }
    failures
}
