//! Campaign and classification settings, with their JSON form.

use std::path::PathBuf;

use counterfactual::{ClassifyConfig, SearchConfig, ThreatModel};
use planner_idm::{ParamSpace, PlannerParams};
use serde::{Deserialize, Serialize};
use sim_core::PerturbationSpec;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    /// Built-in scene id or path to a scene JSON file.
    pub scene: String,
    /// Policy-set manifest written by `select`.
    pub manifest: PathBuf,
    pub patterns: usize,
    pub step_budget: usize,
    pub dt: f64,
    pub perturbation: PerturbationSpec,
    pub planner: PlannerParams,
    /// Give each other vehicle its own set member instead of sharing one.
    pub mix_policies: bool,
    pub classify: ClassifySettings,
    pub seed: u64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            scene: sim_core::scenes::RIGHT_TURN.into(),
            manifest: PathBuf::new(),
            patterns: 300,
            step_budget: 300,
            dt: 0.1,
            perturbation: PerturbationSpec::default(),
            planner: PlannerParams::default(),
            mix_policies: false,
            classify: ClassifySettings::default(),
            seed: 0,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Invalid(m));
        if self.patterns == 0 {
            return bad("patterns must be positive".into());
        }
        if self.step_budget == 0 {
            return bad("step budget must be positive".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.manifest.as_os_str().is_empty() {
            return bad("no policy-set manifest given".into());
        }
        self.perturbation
            .validate()
            .map_err(|e| HarnessError::Invalid(e.to_string()))?;
        if !ParamSpace::default().contains(&self.planner) {
            return bad(format!("planner parameters {:?} lie outside the search space", self.planner));
        }
        self.classify.validate()
    }
}

/// Knobs of the avoidability classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySettings {
    /// Minimum reaction time, s.
    pub rho: f64,
    pub search_budget: usize,
    pub safe_samples: usize,
    pub threat_rollouts: usize,
}

impl Default for ClassifySettings {
    fn default() -> Self {
        let c = ClassifyConfig::default();
        Self {
            rho: c.rho,
            search_budget: c.search.budget,
            safe_samples: c.safe_samples,
            threat_rollouts: c.threat.rollouts,
        }
    }
}

impl ClassifySettings {
    pub fn to_config(&self) -> ClassifyConfig {
        let d = ClassifyConfig::default();
        ClassifyConfig {
            rho: self.rho,
            search: SearchConfig {
                budget: self.search_budget,
                ..d.search
            },
            threat: ThreatModel {
                rollouts: self.threat_rollouts,
                ..d.threat
            },
            safe_samples: self.safe_samples,
            ..d
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.to_config()
            .validate()
            .map_err(|e| HarnessError::Invalid(e.to_string()))
    }
}
