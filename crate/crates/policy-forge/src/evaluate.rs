//! Success-rate evaluation with every vehicle running the same policy.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use sim_core::{
    seed, Controller, EndPredicate, FailurePredicate, Scenario, Scene, SimConfig, SimState, Simulator, TerminalStatus,
    Trajectory,
};

use crate::policy::Policy;
use crate::ForgeError;

/// Outcome of one policy over a scenario set.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessReport {
    pub rate: f64,
    /// `successes[i]` is true when scenario `i` ended with the ego slot at the goal.
    pub successes: Vec<bool>,
}

/// Evaluation episodes count only `GoalReached` as success.
pub fn evaluation_scenario(scene: &Scene, initial: &SimState, policy_id: &str, step_budget: usize) -> Scenario {
    Scenario {
        policy_assignment: vec![policy_id.to_string(); scene.others.len()],
        initial_state: initial.clone(),
        failure: FailurePredicate::default(),
        end: EndPredicate {
            goal_reached: true,
            step_budget,
        },
    }
}

/// Runs `policy` in every slot (ego included) from each initial state.
pub fn rollout_all(
    policy: &Policy,
    scene: &Scene,
    initial_states: &[SimState],
    step_budget: usize,
    base_seed: u64,
) -> Result<Vec<Trajectory>, ForgeError> {
    let shared: Arc<dyn Controller> = Arc::new(policy.clone());
    let mut reg: BTreeMap<String, Arc<dyn Controller>> = BTreeMap::new();
    reg.insert(policy.id.clone(), shared.clone());
    initial_states
        .par_iter()
        .enumerate()
        .map(|(i, init)| {
            let config = SimConfig {
                dt: 0.1,
                rng_seed: seed::mix(base_seed, i as u64),
            };
            let sim = Simulator::new(scene, &reg, config);
            let sc = evaluation_scenario(scene, init, &policy.id, step_budget);
            Ok(sim.run(shared.as_ref(), &sc, None)?)
        })
        .collect()
}

pub fn success_of(trajectories: &[Trajectory]) -> SuccessReport {
    let successes: Vec<bool> = trajectories
        .iter()
        .map(|t| t.terminal == TerminalStatus::GoalReached)
        .collect();
    let rate = if successes.is_empty() {
        0.0
    } else {
        successes.iter().filter(|s| **s).count() as f64 / successes.len() as f64
    };
    SuccessReport { rate, successes }
}

pub fn evaluate_success_rate(
    policy: &Policy,
    scene: &Scene,
    initial_states: &[SimState],
    step_budget: usize,
    base_seed: u64,
) -> Result<SuccessReport, ForgeError> {
    if initial_states.is_empty() {
        return Err(ForgeError::NoScenarios);
    }
    Ok(success_of(&rollout_all(policy, scene, initial_states, step_budget, base_seed)?))
}
