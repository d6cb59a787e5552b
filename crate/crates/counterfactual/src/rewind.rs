//! Failure cases and the rewind to the last state that still leaves the
//! minimum reaction time.

use planner_idm::{IdmPlanner, PlannerParams};
use serde::{Deserialize, Serialize};
use sim_core::{ego_failure, snapshot_at, Controller, PolicyResolver, Scenario, Scene, SimError, Simulator, TerminalStatus, Trajectory};

use crate::CounterfactualError;

/// A recorded episode in which the planner under test collided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureCase {
    pub case_id: String,
    pub scenario_id: String,
    pub policy_id: String,
    pub trajectory: Trajectory,
    pub params: PlannerParams,
}

impl FailureCase {
    pub fn new(
        case_id: impl Into<String>,
        scenario_id: impl Into<String>,
        policy_id: impl Into<String>,
        trajectory: Trajectory,
        params: PlannerParams,
    ) -> Result<Self, CounterfactualError> {
        let case = Self {
            case_id: case_id.into(),
            scenario_id: scenario_id.into(),
            policy_id: policy_id.into(),
            trajectory,
            params,
        };
        case.validate()?;
        Ok(case)
    }

    pub fn validate(&self) -> Result<(), CounterfactualError> {
        if !self.trajectory.terminal.is_failure() {
            return Err(CounterfactualError::NotAFailure(self.trajectory.terminal));
        }
        if self.trajectory.seeds.len() + 1 != self.trajectory.len() {
            return Err(CounterfactualError::InvalidConfig(format!(
                "case {}: {} states but {} seeds",
                self.case_id,
                self.trajectory.len(),
                self.trajectory.seeds.len()
            )));
        }
        Ok(())
    }

    /// Step index of the collision.
    pub fn collision_step(&self) -> usize {
        self.trajectory.final_step()
    }

    pub fn terminal(&self) -> TerminalStatus {
        self.trajectory.terminal
    }
}

/// Whole steps covering a reaction time, `ceil(rho / dt)` up to rounding noise.
pub fn reaction_steps(rho: f64, dt: f64) -> usize {
    (rho / dt - 1e-9).ceil().max(0.0) as usize
}

/// Rewind step for a collision at step `n`, clamped at the start of the episode.
pub fn rewind_step(n: usize, rho: f64, dt: f64) -> usize {
    n.saturating_sub(reaction_steps(rho, dt))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewindPoint {
    /// Absolute step index resumed from.
    pub step: usize,
    pub scenario: Scenario,
    pub rho: f64,
}

/// Rewinds `case` by `rho` seconds and checks that resuming with the
/// recorded parameters reproduces the recorded collision bit for bit.
pub fn rewind(
    case: &FailureCase,
    rho: f64,
    scene: &Scene,
    resolver: &dyn PolicyResolver,
) -> Result<RewindPoint, CounterfactualError> {
    case.validate()?;
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(CounterfactualError::InvalidConfig(format!("reaction time must be non-negative, got {rho}")));
    }
    let traj = &case.trajectory;
    let first = traj.states[0].step_index;
    let step = rewind_step(case.collision_step(), rho, traj.config.dt).max(first);
    let scenario = snapshot_at(traj, step - first)?;
    let point = RewindPoint { step, scenario, rho };

    let sim = Simulator::new(scene, resolver, traj.config);
    let replay = resume(&sim, &IdmPlanner::new(case.params), &point.scenario)?;
    let recorded = &traj.states[step - first..];
    if replay.terminal != traj.terminal {
        return Err(CounterfactualError::Irreproducible {
            case_id: case.case_id.clone(),
            detail: format!("replay ended {} instead of {}", replay.terminal.label(), traj.terminal.label()),
        });
    }
    if let Some(k) = (0..recorded.len().max(replay.len())).find(|&k| recorded.get(k) != replay.states.get(k)) {
        return Err(CounterfactualError::Irreproducible {
            case_id: case.case_id.clone(),
            detail: format!("replay diverges at step {}", step + k),
        });
    }
    Ok(point)
}

/// Runs `ego` from `scenario` to the end of the episode. A scenario that
/// already starts in F yields the one-state trajectory ending there.
pub fn resume(sim: &Simulator<'_>, ego: &dyn Controller, scenario: &Scenario) -> Result<Trajectory, CounterfactualError> {
    match sim.run(ego, scenario, None) {
        Err(SimError::StartsInFailure) => {
            let terminal = ego_failure(&scenario.initial_state, sim.scene, &scenario.failure)
                .expect("run reported a failing start");
            Ok(Trajectory {
                config: sim.config,
                policy_assignment: scenario.policy_assignment.clone(),
                failure: scenario.failure,
                end: scenario.end,
                states: vec![scenario.initial_state.clone()],
                seeds: Vec::new(),
                terminal,
            })
        }
        other => Ok(other?),
    }
}
