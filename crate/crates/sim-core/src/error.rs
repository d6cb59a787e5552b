use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("non-finite {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unresolvable policy id `{0}`")]
    UnknownPolicy(String),
    #[error("policy assignment has {got} entries but the scene has {expected} other vehicles")]
    AssignmentLength { expected: usize, got: usize },
    #[error("max_steps must be positive")]
    ZeroSteps,
    #[error("initial state already satisfies the failure predicate")]
    StartsInFailure,
    #[error("step {step} out of range for trajectory of length {len}")]
    StepOutOfRange { step: usize, len: usize },
    #[error("route `{0}` not found in map")]
    UnknownRoute(String),
    #[error("perturbation retry cap exceeded for pattern {pattern} after {retries} draws")]
    PerturbationRetries { pattern: usize, retries: usize },
    #[error("trajectory file: {0}")]
    Format(String),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
