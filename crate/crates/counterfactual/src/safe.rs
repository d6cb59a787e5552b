//! The simulator as a rollout environment and the greedy-safe ego policy.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sim_core::{
    end_status, seed, step_joint, Action, Context, Controller, EndPredicate, FailurePredicate, PolicyResolver,
    Scenario, Scene, SimConfig, SimState, Simulator,
};

use crate::threat::{failure_count, Outcome, RolloutEnv, ThreatModel};
use crate::CounterfactualError;

/// One scenario's dynamics with the ego action left open. Other vehicles
/// rerun their assigned policies on the episode's seed stream.
pub struct SimEnv<'a> {
    sim: Simulator<'a>,
    others: Vec<Arc<dyn Controller>>,
    pub failure: FailurePredicate,
    pub end: EndPredicate,
}

impl<'a> SimEnv<'a> {
    pub fn new(
        scene: &'a Scene,
        resolver: &'a dyn PolicyResolver,
        config: SimConfig,
        scenario: &Scenario,
    ) -> Result<Self, CounterfactualError> {
        let sim = Simulator::new(scene, resolver, config);
        let others = sim.resolve_assignment(&scenario.policy_assignment)?;
        Ok(Self {
            sim,
            others,
            failure: scenario.failure,
            end: scenario.end,
        })
    }

    pub fn scene(&self) -> &Scene {
        self.sim.scene
    }

    pub fn config(&self) -> SimConfig {
        self.sim.config
    }
}

impl RolloutEnv for SimEnv<'_> {
    type State = SimState;
    type Action = Action;

    fn step(&self, state: &SimState, action: Action) -> SimState {
        let mut actions = Vec::with_capacity(state.len());
        actions.push(action);
        actions.extend(self.sim.others_actions(&self.others, state));
        step_joint(self.sim.scene, state, &actions, self.sim.config.dt)
    }

    fn outcome(&self, state: &SimState) -> Outcome {
        match end_status(self.sim.scene, state, &self.failure, &self.end) {
            None => Outcome::Running,
            Some(t) if t.is_failure() => Outcome::Failure,
            Some(_) => Outcome::Safe,
        }
    }

    fn random_action(&self, _: &SimState, rng: &mut ChaCha8Rng) -> Action {
        uniform_action(self.sim.scene, rng)
    }
}

/// Uniform draw from the ego's actuation box.
pub fn uniform_action<R: Rng + ?Sized>(scene: &Scene, rng: &mut R) -> Action {
    let l = scene.limits(0);
    Action::new(
        rng.random_range(l.a_min..=l.a_max),
        rng.random_range(-l.phi_steer_max..=l.phi_steer_max),
    )
}

/// The `sample_count` uniform candidate actions drawn for `seed`, in
/// tie-break order: smallest `|alpha|` first, then smallest `|phi|`.
pub fn candidate_actions(scene: &Scene, sample_count: usize, seed: u64) -> Vec<Action> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed, 0));
    let mut candidates: Vec<Action> = (0..sample_count.max(1))
        .map(|_| uniform_action(scene, &mut rng))
        .collect();
    candidates.sort_by(|a, b| {
        a.alpha
            .abs()
            .total_cmp(&b.alpha.abs())
            .then(a.phi.abs().total_cmp(&b.phi.abs()))
    });
    candidates
}

/// Seed of the rollout streams shared by every candidate for `seed`.
pub fn rollout_seed(seed: u64) -> u64 {
    seed::mix(seed, 1)
}

/// Draws `sample_count` uniform actions and returns the one with the lowest
/// estimated threat, ties going to the smallest `|alpha|` and then `|phi|`.
///
/// Candidates are scored in tie-break order on common random streams and a
/// candidate stops being scored once it cannot beat the best so far, which
/// yields the same argmin as scoring every candidate fully.
pub fn greedy_safe_action(env: &SimEnv<'_>, state: &SimState, model: &ThreatModel, sample_count: usize, seed: u64) -> Action {
    let candidates = candidate_actions(env.scene(), sample_count, seed);
    let streams = rollout_seed(seed);
    let mut best = (candidates[0], usize::MAX);
    for a in candidates {
        let failures = failure_count(env, state, a, model, streams, best.1);
        if failures < best.1 {
            best = (a, failures);
            if failures == 0 {
                break;
            }
        }
    }
    best.0
}

/// The planner-independent ego policy: greedy-safe action every step.
pub struct GreedySafe<'a> {
    pub env: SimEnv<'a>,
    pub model: ThreatModel,
    pub sample_count: usize,
    pub seed: u64,
}

impl Controller for GreedySafe<'_> {
    fn act(&self, ctx: &Context<'_>, slot: usize, _seed: u64) -> Action {
        debug_assert_eq!(slot, 0, "greedy-safe drives the ego");
        let step_seed = seed::mix(self.seed, ctx.state.step_index as u64);
        greedy_safe_action(&self.env, ctx.state, &self.model, self.sample_count, step_seed)
    }
}
