//! Background-traffic policies: a residual network over a lane-keeping,
//! yielding prior, trained with derivative-free search; success-rate
//! evaluation; inter-policy diversity; and greedy diverse subset selection.

pub mod diversity;
pub mod evaluate;
pub mod network;
pub mod observation;
pub mod policy;
pub mod pool;
pub mod prior;
pub mod select;
pub mod store;
pub mod train;

pub use diversity::{trajectory_distance, DiversityMatrix};
pub use evaluate::{evaluate_success_rate, rollout_all, SuccessReport};
pub use observation::{observe, Observation};
pub use policy::{Policy, PolicyKind};
pub use pool::{build_pool, interpolicy_diversity, PolicyPool, PolicySet, PoolConfig};
pub use prior::Style;
pub use train::{train_policy, Optimizer, RewardWeights, TrainConfig};

#[derive(Debug, thiserror::Error)]
pub enum ForgeError {
    #[error("policy `{id}` has {got} parameters, expected {expected}")]
    ParamLength { id: String, expected: usize, got: usize },
    #[error("policy `{0}` has non-finite parameters")]
    NonFinite(String),
    #[error("scenario set is empty")]
    NoScenarios,
    #[error("need at least {need} policies, have {have}")]
    TooFewPolicies { need: usize, have: usize },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),
    #[error(transparent)]
    Sim(#[from] sim_core::SimError),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("corrupt policy file {path}: {reason}")]
    Corrupt { path: String, reason: String },
}
