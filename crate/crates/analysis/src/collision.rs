//! Collision records: who was hit, at what angle and where.

use serde::{Deserialize, Serialize};
use sim_core::{normalize_angle, Action, Scene, TerminalStatus, Trajectory, VehicleState};

use counterfactual::Label;

/// Heading of `other` relative to `ego` in degrees, in `[-180, 180)`.
/// Positive angles turn counter-clockwise from the ego's heading, so a
/// vehicle crossing from the ego's right towards its left sits at +90.
pub fn collision_angle(ego: &VehicleState, other: &VehicleState) -> f64 {
    wrap_degrees(normalize_angle(other.h - ego.h).to_degrees())
}

/// Maps degrees into `[-180, 180)`.
pub fn wrap_degrees(deg: f64) -> f64 {
    let r = (deg + 180.0).rem_euclid(360.0) - 180.0;
    if r >= 180.0 {
        r - 360.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Partner {
    Vehicle { slot: usize, name: String },
    Wall { wall: usize },
}

impl Partner {
    pub fn label(&self) -> String {
        match self {
            Partner::Vehicle { name, .. } => name.clone(),
            Partner::Wall { wall } => format!("wall{wall}"),
        }
    }
}

/// Vehicle state and last applied action of one collision participant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Participant {
    pub state: VehicleState,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionRecord {
    pub case_id: String,
    pub label: Label,
    pub partner: Partner,
    pub ego: Participant,
    /// Absent for wall collisions.
    pub other: Option<Participant>,
    /// Degrees in `[-180, 180)`, vehicle collisions only.
    pub angle: Option<f64>,
    /// Ego center at the collision step.
    pub location: (f64, f64),
}

impl CollisionRecord {
    /// Record for a trajectory ending in an ego collision, `None` otherwise.
    pub fn from_trajectory(case_id: &str, label: Label, trajectory: &Trajectory, scene: &Scene) -> Option<Self> {
        let last = trajectory.last_state();
        let participant = |slot: usize| Participant {
            state: last.vehicles[slot],
            action: last.actions.get(slot).copied().unwrap_or_default(),
        };
        let ego = participant(0);
        let (partner, other) = match trajectory.terminal {
            TerminalStatus::CollisionVehicle { other } => (
                Partner::Vehicle {
                    slot: other,
                    name: scene.vehicle(other).name.clone(),
                },
                Some(participant(other)),
            ),
            TerminalStatus::CollisionWall { wall } => (Partner::Wall { wall }, None),
            _ => return None,
        };
        Some(Self {
            case_id: case_id.to_string(),
            label,
            partner,
            ego,
            angle: other.map(|o| collision_angle(&ego.state, &o.state)),
            other,
            location: (ego.state.x, ego.state.y),
        })
    }
}
