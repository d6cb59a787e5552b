use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// Bad input from the user: configuration, paths, arguments.
    #[error("{0}")]
    Invalid(String),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("corrupt file {path}: {reason}")]
    Corrupt { path: String, reason: String },
    #[error(transparent)]
    Sim(#[from] sim_core::SimError),
    #[error(transparent)]
    Forge(#[from] policy_forge::ForgeError),
    #[error(transparent)]
    Counterfactual(#[from] counterfactual::CounterfactualError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error("{0}")]
    Runtime(String),
}

impl HarnessError {
    /// 1 for validation errors, 2 for everything that failed while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Invalid(_) => 1,
            _ => 2,
        }
    }

    pub fn io(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
        move |source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn corrupt(path: &Path, reason: impl std::fmt::Display) -> HarnessError {
        HarnessError::Corrupt {
            path: path.display().to_string(),
            reason: reason.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
