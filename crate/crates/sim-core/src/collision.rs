//! Collision detection between vehicle footprints and walls.

use serde::{Deserialize, Serialize};

use crate::geometry::{rect_segment_intersect, rects_overlap, OrientedRect};
use crate::scene::Scene;
use crate::state::{FailurePredicate, SimState, TerminalStatus};

/// One overlapping pair. The derived ordering (kind first, then ids) is the
/// order in which events are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CollisionEvent {
    EgoVehicle { other: usize },
    EgoWall { wall: usize },
    VehicleVehicle { a: usize, b: usize },
    VehicleWall { vehicle: usize, wall: usize },
}

impl CollisionEvent {
    pub fn involves_ego(&self) -> bool {
        matches!(self, CollisionEvent::EgoVehicle { .. } | CollisionEvent::EgoWall { .. })
    }
}

fn footprints(state: &SimState, scene: &Scene) -> Vec<OrientedRect> {
    state
        .vehicles
        .iter()
        .enumerate()
        .map(|(slot, v)| v.footprint(scene.limits(slot)))
        .collect()
}

/// All overlapping pairs in deterministic order.
pub fn detect_collisions(state: &SimState, scene: &Scene) -> Vec<CollisionEvent> {
    let rects = footprints(state, scene);
    let mut events = Vec::new();
    for i in 0..rects.len() {
        for j in (i + 1)..rects.len() {
            if rects_overlap(&rects[i], &rects[j]) {
                events.push(if i == 0 {
                    CollisionEvent::EgoVehicle { other: j }
                } else {
                    CollisionEvent::VehicleVehicle { a: i, b: j }
                });
            }
        }
        for (w, wall) in scene.map.walls.iter().enumerate() {
            if rect_segment_intersect(&rects[i], wall) {
                events.push(if i == 0 {
                    CollisionEvent::EgoWall { wall: w }
                } else {
                    CollisionEvent::VehicleWall { vehicle: i, wall: w }
                });
            }
        }
    }
    events.sort();
    events
}

/// First ego failure under `predicate`, vehicle collisions taking precedence
/// over walls and lower ids over higher ones.
pub fn ego_failure(
    state: &SimState,
    scene: &Scene,
    predicate: &FailurePredicate,
) -> Option<TerminalStatus> {
    let ego = state.vehicles[0].footprint(scene.limits(0));
    if predicate.vehicle_collision {
        for (slot, v) in state.vehicles.iter().enumerate().skip(1) {
            if rects_overlap(&ego, &v.footprint(scene.limits(slot))) {
                return Some(TerminalStatus::CollisionVehicle { other: slot });
            }
        }
    }
    if predicate.wall_collision {
        for (w, wall) in scene.map.walls.iter().enumerate() {
            if rect_segment_intersect(&ego, wall) {
                return Some(TerminalStatus::CollisionWall { wall: w });
            }
        }
    }
    None
}
