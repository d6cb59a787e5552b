//! Joint simulator state, scenarios, predicates and trajectories.

use serde::{Deserialize, Serialize};

use crate::vehicle::{Action, VehicleState};

/// Joint state of all vehicles at one step. Slot 0 is the ego vehicle,
/// slots `1..=m` are the other vehicles in scene order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub step_index: usize,
    pub vehicles: Vec<VehicleState>,
    /// Action each vehicle applied to reach this state (idle for the initial state).
    pub actions: Vec<Action>,
}

impl SimState {
    pub fn new(step_index: usize, vehicles: Vec<VehicleState>) -> Self {
        let actions = vec![Action::IDLE; vehicles.len()];
        Self {
            step_index,
            vehicles,
            actions,
        }
    }

    pub fn ego(&self) -> &VehicleState {
        &self.vehicles[0]
    }

    pub fn others(&self) -> &[VehicleState] {
        &self.vehicles[1..]
    }

    pub fn len(&self) -> usize {
        self.vehicles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vehicles.is_empty()
    }
}

/// Ego failure conditions. A state satisfying any enabled condition ends the episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailurePredicate {
    pub vehicle_collision: bool,
    pub wall_collision: bool,
}

impl Default for FailurePredicate {
    fn default() -> Self {
        Self {
            vehicle_collision: true,
            wall_collision: true,
        }
    }
}

/// Non-failure end conditions; failure always ends the episode as well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndPredicate {
    pub goal_reached: bool,
    /// Absolute step index at which the episode times out.
    pub step_budget: usize,
}

impl Default for EndPredicate {
    fn default() -> Self {
        Self {
            goal_reached: true,
            step_budget: 300,
        }
    }
}

/// Everything fed to the simulator besides the planner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Policy id driving each other vehicle, in slot order.
    pub policy_assignment: Vec<String>,
    pub initial_state: SimState,
    pub failure: FailurePredicate,
    pub end: EndPredicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    /// Base of the per-step seed stream consumed by stochastic policies.
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TerminalStatus {
    GoalReached,
    Timeout,
    /// Ego overlapped the other vehicle in slot `other` (1-based).
    CollisionVehicle { other: usize },
    CollisionWall { wall: usize },
    /// Stopped by an explicit step limit before any end condition held.
    Truncated,
}

impl TerminalStatus {
    pub fn is_failure(&self) -> bool {
        matches!(
            self,
            TerminalStatus::CollisionVehicle { .. } | TerminalStatus::CollisionWall { .. }
        )
    }

    /// Ended in E without F: goal or timeout.
    pub fn is_success(&self) -> bool {
        matches!(self, TerminalStatus::GoalReached | TerminalStatus::Timeout)
    }

    pub fn label(&self) -> String {
        match self {
            TerminalStatus::GoalReached => "goal".into(),
            TerminalStatus::Timeout => "timeout".into(),
            TerminalStatus::CollisionVehicle { other } => format!("collision_vehicle:{other}"),
            TerminalStatus::CollisionWall { wall } => format!("collision_wall:{wall}"),
            TerminalStatus::Truncated => "truncated".into(),
        }
    }
}

/// Recorded episode: states, per-step seeds and how it ended, together with
/// the scenario fields needed to resume from any recorded step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: SimConfig,
    pub policy_assignment: Vec<String>,
    pub failure: FailurePredicate,
    pub end: EndPredicate,
    pub states: Vec<SimState>,
    /// `seeds[i]` drove the transition from `states[i]` to `states[i + 1]`.
    pub seeds: Vec<u64>,
    pub terminal: TerminalStatus,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last_state(&self) -> &SimState {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Step index of the final recorded state.
    pub fn final_step(&self) -> usize {
        self.last_state().step_index
    }

    /// Positions of one vehicle slot over the episode.
    pub fn positions(&self, slot: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.states
            .iter()
            .map(move |s| (s.vehicles[slot].x, s.vehicles[slot].y))
    }
}
