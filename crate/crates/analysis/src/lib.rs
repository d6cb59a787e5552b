//! Post-hoc analysis of campaign results: collision angles and partners,
//! failure-type tables, min-TTC distributions and collision-state features.

pub mod collision;
pub mod features;
pub mod histogram;
pub mod summary;
pub mod svg;
pub mod ttc;

pub use collision::{collision_angle, CollisionRecord, Participant, Partner};
pub use features::{export_features, feature_vector, FeatureVector, Pca, FEATURE_DIM, FEATURE_NAMES};
pub use histogram::{histogram, Histogram, HistogramSpec};
pub use summary::{
    parse_verdicts, read_verdicts, summarize_collision_partners, summarize_failures, FailureCounts, VerdictRecord,
};
pub use ttc::{compute_ttc_2d, min_ttc, ttc_series, TtcRecord, NEAR_MISS, TTC_HORIZON};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("verdict line {line} is malformed: {message}")]
    Malformed { line: usize, message: String },
    #[error("invalid histogram spec {0}")]
    InvalidSpec(String),
    #[error("principal components need at least 2 records, got {0}")]
    TooFewRecords(usize),
}
