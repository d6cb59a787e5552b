//! The planner under test: an Intelligent Driver Model variant that follows
//! the closest vehicle inside a speed-dependent attention fan, tuned by
//! `(d_idm, phi_max, phi_min)`.

pub mod attention;
pub mod fixtures;
pub mod idm;
pub mod params;

pub use attention::{attentional_angle, lateral_approach, select_attentional_vehicle, AttentionState};
pub use idm::{plan_action, IdmPlanner, Plan};
pub use params::{IdmTuning, Interval, ParamSpace, PlannerParams};

#[derive(Debug, thiserror::Error)]
pub enum PlannerError {
    #[error("invalid planner parameters {0:?}")]
    InvalidParams(PlannerParams),
    #[error("parameter space admits invalid parameters")]
    InvalidSpace,
    #[error("IDM tuning constants must be finite and positive")]
    InvalidTuning,
}
