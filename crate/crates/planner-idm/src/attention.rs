//! Attentional-vehicle selection.

use serde::{Deserialize, Serialize};
use sim_core::{normalize_angle, SimState, VehicleState};

use crate::params::{IdmTuning, PlannerParams};

/// Speed of `other` toward `ego` along the line of sight, positive when closing in.
/// Coincident centers give 0.
pub fn lateral_approach(ego: &VehicleState, other: &VehicleState) -> f64 {
    match (other.position() - ego.position()).normalized() {
        Some(los) => -other.velocity().dot(los),
        None => 0.0,
    }
}

/// Full width of the attention fan for a candidate approaching at `psi_lat`.
pub fn attentional_angle(psi_lat: f64, params: &PlannerParams, tuning: &IdmTuning) -> f64 {
    if psi_lat <= 0.0 {
        params.phi_min
    } else {
        (params.phi_max * (psi_lat / tuning.lateral_scale).min(1.0)).max(params.phi_min)
    }
}

/// Per-step attention bookkeeping, useful for logging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttentionState {
    /// Slot of the selected vehicle.
    pub vehicle: Option<usize>,
    /// Fan width assigned to each vehicle slot (`None` for the planner's own
    /// slot and for vehicles beyond the attention radius).
    pub angles: Vec<Option<f64>>,
    pub radius: f64,
}

/// Picks the closest vehicle whose center lies inside its fan. Ties go to the lowest slot.
pub fn select_attentional_vehicle_for(
    state: &SimState,
    slot: usize,
    params: &PlannerParams,
    tuning: &IdmTuning,
) -> AttentionState {
    let ego = &state.vehicles[slot];
    let mut angles = vec![None; state.len()];
    let mut best: Option<(f64, usize)> = None;
    for (j, other) in state.vehicles.iter().enumerate() {
        if j == slot {
            continue;
        }
        let d = other.position() - ego.position();
        let dist = d.norm();
        if dist > tuning.attention_radius {
            continue;
        }
        let angle = attentional_angle(lateral_approach(ego, other), params, tuning);
        angles[j] = Some(angle);
        let bearing = if dist > 0.0 {
            normalize_angle(d.angle() - ego.h).abs()
        } else {
            0.0
        };
        if bearing <= 0.5 * angle && best.is_none_or(|(bd, _)| dist < bd) {
            best = Some((dist, j));
        }
    }
    AttentionState {
        vehicle: best.map(|(_, j)| j),
        angles,
        radius: tuning.attention_radius,
    }
}

/// Attention of the ego vehicle (slot 0).
pub fn select_attentional_vehicle(state: &SimState, params: &PlannerParams, tuning: &IdmTuning) -> AttentionState {
    select_attentional_vehicle_for(state, 0, params, tuning)
}
