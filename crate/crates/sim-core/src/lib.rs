//! Deterministic discrete-time multi-agent simulator.
//!
//! Vehicles follow a center-referenced kinematic bicycle model, are checked
//! for footprint overlap with each other and with walls, and are advanced
//! simultaneously from a shared joint state. Slot 0 of every [`SimState`] is
//! the ego vehicle driven by the planner under test.

pub mod collision;
pub mod error;
pub mod geometry;
pub mod io;
pub mod map;
pub mod scene;
pub mod scenes;
pub mod seed;
pub mod sim;
pub mod state;
pub mod tracking;
pub mod vehicle;

pub use collision::{detect_collisions, ego_failure, CollisionEvent};
pub use error::{Result, SimError};
pub use geometry::{OrientedRect, Segment, Vec2};
pub use map::{MapGeometry, Polyline, Projection};
pub use scene::{generate_perturbations, PerturbationSpec, Scene, VehicleSpec};
pub use sim::{end_status, snapshot_at, step_joint, Context, Controller, PolicyResolver, Simulator};
pub use state::{EndPredicate, FailurePredicate, Scenario, SimConfig, SimState, TerminalStatus, Trajectory};
pub use vehicle::{normalize_angle, step_vehicle, Action, VehicleLimits, VehicleState};
