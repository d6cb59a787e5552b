//! Episode execution and rewind.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::collision::ego_failure;
use crate::error::{Result, SimError};
use crate::scene::Scene;
use crate::seed;
use crate::state::{EndPredicate, FailurePredicate, Scenario, SimConfig, SimState, TerminalStatus, Trajectory};
use crate::vehicle::{integrate, Action};

/// Read-only view handed to controllers each step.
#[derive(Clone, Copy)]
pub struct Context<'a> {
    pub scene: &'a Scene,
    pub state: &'a SimState,
    pub dt: f64,
}

/// A driving policy. Implementations must be pure functions of their
/// arguments so that episodes replay bit-identically.
pub trait Controller: Send + Sync {
    /// Action for the vehicle in `slot`; `seed` is that vehicle's seed for this step.
    fn act(&self, ctx: &Context<'_>, slot: usize, seed: u64) -> Action;
}

impl<F> Controller for F
where
    F: Fn(&Context<'_>, usize, u64) -> Action + Send + Sync,
{
    fn act(&self, ctx: &Context<'_>, slot: usize, seed: u64) -> Action {
        self(ctx, slot, seed)
    }
}

/// Maps policy ids in a scenario's assignment to controllers.
pub trait PolicyResolver: Sync {
    fn resolve(&self, id: &str) -> Option<Arc<dyn Controller>>;
}

impl PolicyResolver for BTreeMap<String, Arc<dyn Controller>> {
    fn resolve(&self, id: &str) -> Option<Arc<dyn Controller>> {
        self.get(id).cloned()
    }
}

impl PolicyResolver for HashMap<String, Arc<dyn Controller>> {
    fn resolve(&self, id: &str) -> Option<Arc<dyn Controller>> {
        self.get(id).cloned()
    }
}

/// Advances every vehicle simultaneously with the given (already chosen) actions.
pub fn step_joint(scene: &Scene, state: &SimState, actions: &[Action], dt: f64) -> SimState {
    let mut vehicles = Vec::with_capacity(state.len());
    let mut applied = Vec::with_capacity(state.len());
    for (slot, (v, a)) in state.vehicles.iter().zip(actions).enumerate() {
        let limits = scene.limits(slot);
        let a = a.clamped(limits);
        vehicles.push(integrate(v, &a, limits, dt));
        applied.push(a);
    }
    SimState {
        step_index: state.step_index + 1,
        vehicles,
        actions: applied,
    }
}

/// End condition holding in `state`, if any. Failure is checked first, so F is a subset of E.
pub fn end_status(
    scene: &Scene,
    state: &SimState,
    failure: &FailurePredicate,
    end: &EndPredicate,
) -> Option<TerminalStatus> {
    if let Some(f) = ego_failure(state, scene, failure) {
        return Some(f);
    }
    if end.goal_reached && scene.map.goal_region.contains(state.ego().position()) {
        return Some(TerminalStatus::GoalReached);
    }
    if state.step_index >= end.step_budget {
        return Some(TerminalStatus::Timeout);
    }
    None
}

/// Runs episodes in one scene with other vehicles resolved through `resolver`.
pub struct Simulator<'a> {
    pub scene: &'a Scene,
    pub resolver: &'a dyn PolicyResolver,
    pub config: SimConfig,
}

impl<'a> Simulator<'a> {
    pub fn new(scene: &'a Scene, resolver: &'a dyn PolicyResolver, config: SimConfig) -> Self {
        Self {
            scene,
            resolver,
            config,
        }
    }

    pub fn resolve_assignment(&self, assignment: &[String]) -> Result<Vec<Arc<dyn Controller>>> {
        if assignment.len() != self.scene.others.len() {
            return Err(SimError::AssignmentLength {
                expected: self.scene.others.len(),
                got: assignment.len(),
            });
        }
        assignment
            .iter()
            .map(|id| {
                self.resolver
                    .resolve(id)
                    .ok_or_else(|| SimError::UnknownPolicy(id.clone()))
            })
            .collect()
    }

    /// Actions of the other vehicles at `state`, in slot order starting at slot 1.
    pub fn others_actions(&self, others: &[Arc<dyn Controller>], state: &SimState) -> Vec<Action> {
        let ctx = Context {
            scene: self.scene,
            state,
            dt: self.config.dt,
        };
        let step_seed = seed::step_seed(self.config.rng_seed, state.step_index);
        others
            .iter()
            .enumerate()
            .map(|(i, c)| c.act(&ctx, i + 1, seed::vehicle_seed(step_seed, i + 1)))
            .collect()
    }

    /// Runs `planner` on the ego slot from the scenario's initial state.
    ///
    /// With `max_steps = Some(n)` at most `n` transitions are taken and an
    /// episode still running at that point ends as `Truncated`; `None` runs
    /// until an end condition holds.
    pub fn run(
        &self,
        planner: &dyn Controller,
        scenario: &Scenario,
        max_steps: Option<usize>,
    ) -> Result<Trajectory> {
        if !(self.config.dt > 0.0 && self.config.dt.is_finite()) {
            return Err(SimError::InvalidConfig(format!("dt must be positive, got {}", self.config.dt)));
        }
        if max_steps == Some(0) {
            return Err(SimError::ZeroSteps);
        }
        if scenario.end.step_budget == 0 {
            return Err(SimError::InvalidConfig("step budget must be positive".into()));
        }
        let others = self.resolve_assignment(&scenario.policy_assignment)?;
        let init = &scenario.initial_state;
        if init.len() != self.scene.vehicle_count() {
            return Err(SimError::InvalidConfig(format!(
                "initial state has {} vehicles, scene has {}",
                init.len(),
                self.scene.vehicle_count()
            )));
        }
        if let Some(v) = init.vehicles.iter().find(|v| !v.is_finite()) {
            return Err(SimError::NonFinite {
                what: "initial state",
                value: v.x + v.y + v.v + v.h,
            });
        }
        if ego_failure(init, self.scene, &scenario.failure).is_some() {
            return Err(SimError::StartsInFailure);
        }

        let mut states = vec![init.clone()];
        let mut seeds = Vec::new();
        let terminal = loop {
            let state = states.last().expect("non-empty");
            if let Some(t) = end_status(self.scene, state, &scenario.failure, &scenario.end) {
                break t;
            }
            if max_steps.is_some_and(|n| seeds.len() >= n) {
                break TerminalStatus::Truncated;
            }
            let step_seed = seed::step_seed(self.config.rng_seed, state.step_index);
            let ctx = Context {
                scene: self.scene,
                state,
                dt: self.config.dt,
            };
            let mut actions = Vec::with_capacity(state.len());
            actions.push(planner.act(&ctx, 0, seed::vehicle_seed(step_seed, 0)));
            actions.extend(self.others_actions(&others, state));
            let next = step_joint(self.scene, state, &actions, self.config.dt);
            seeds.push(step_seed);
            states.push(next);
        };
        Ok(Trajectory {
            config: self.config,
            policy_assignment: scenario.policy_assignment.clone(),
            failure: scenario.failure,
            end: scenario.end,
            states,
            seeds,
            terminal,
        })
    }
}

/// Scenario that resumes `trajectory` from its recorded state at index `step`.
///
/// Per-step seeds derive from the configuration seed and the absolute step
/// index, so resuming with the trajectory's `config` replays the recorded
/// seed stream.
pub fn snapshot_at(trajectory: &Trajectory, step: usize) -> Result<Scenario> {
    let state = trajectory
        .states
        .get(step)
        .ok_or(SimError::StepOutOfRange {
            step,
            len: trajectory.len(),
        })?;
    Ok(Scenario {
        policy_assignment: trajectory.policy_assignment.clone(),
        initial_state: state.clone(),
        failure: trajectory.failure,
        end: trajectory.end,
    })
}
