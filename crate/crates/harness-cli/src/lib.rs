//! Campaign orchestration: perturbed scenarios, batch runs over policy sets,
//! avoidability classification and analysis, behind the `crashsieve` CLI.

pub mod analyze;
pub mod campaign;
pub mod classify;
pub mod cli;
pub mod config;
pub mod error;
pub mod fsutil;
pub mod policies;
pub mod records;
pub mod replay;
pub mod scenes;

pub use analyze::{analyze, discover_campaigns, AnalysisReport};
pub use campaign::{campaign_dir, run_campaign, test_seed, CampaignMeta, CampaignReport};
pub use classify::{classify_campaign, classify_with, ClassifyReport};
pub use config::{CampaignConfig, ClassifySettings};
pub use error::HarnessError;
pub use records::RunRecord;
pub use scenes::build_scenes;
