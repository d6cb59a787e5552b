//! Counterfactual replay of recorded failures.
//!
//! A failure is rewound by the minimum reaction time and resumed twice: with
//! other parameters of the planner under test (planner-specific avoidable,
//! A-P) and, if none helps, with a greedy policy minimizing the estimated
//! probability of failure under random driving (generic avoidable, A-G).
//! Failures avoided by neither are labelled unavoidable (U).

pub mod classify;
pub mod fixtures;
pub mod rewind;
pub mod safe;
pub mod search;
pub mod threat;
pub mod toy;

pub use classify::{classify, classify_generic, ClassifyConfig, Label, Verdict, VerdictSeeds};
pub use rewind::{resume, rewind, rewind_step, FailureCase, RewindPoint};
pub use safe::{candidate_actions, greedy_safe_action, rollout_seed, uniform_action, GreedySafe, SimEnv};
pub use search::{classify_planner_specific, SearchConfig, SearchOutcome, SearchTrial};
pub use threat::{estimate_threat, Horizon, Outcome, RolloutEnv, ThreatModel};

use sim_core::{SimError, TerminalStatus};

#[derive(Debug, thiserror::Error)]
pub enum CounterfactualError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("recorded episode ended {} rather than in a collision", .0.label())]
    NotAFailure(TerminalStatus),
    #[error("case {case_id} does not reproduce from its rewind point: {detail}")]
    Irreproducible { case_id: String, detail: String },
    #[error("{0}")]
    InvalidConfig(String),
}
