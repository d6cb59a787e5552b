//! Avoidability verdicts: parameter search first, then the greedy-safe policy.

use planner_idm::{ParamSpace, PlannerParams};
use serde::{Deserialize, Serialize};
use sim_core::{seed, PolicyResolver, Scene, Simulator, TerminalStatus, Trajectory};

use crate::rewind::{resume, rewind, FailureCase, RewindPoint};
use crate::safe::{GreedySafe, SimEnv};
use crate::search::{classify_planner_specific, SearchConfig, SearchTrial};
use crate::threat::ThreatModel;
use crate::CounterfactualError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    /// Avoided by some other planner parameters.
    #[serde(rename = "A-P")]
    PlannerAvoidable,
    /// Avoided only by the planner-independent greedy-safe policy.
    #[serde(rename = "A-G")]
    GenericAvoidable,
    #[serde(rename = "U")]
    Unavoidable,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::PlannerAvoidable, Label::GenericAvoidable, Label::Unavoidable];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::PlannerAvoidable => "A-P",
            Label::GenericAvoidable => "A-G",
            Label::Unavoidable => "U",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// Reaction time, s.
    pub rho: f64,
    pub space: ParamSpace,
    pub search: SearchConfig,
    pub threat: ThreatModel,
    pub safe_samples: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            rho: 2.0,
            space: ParamSpace::default(),
            search: SearchConfig::default(),
            threat: ThreatModel::default(),
            safe_samples: 30,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<(), CounterfactualError> {
        self.search.validate()?;
        self.threat.validate()?;
        if self.safe_samples == 0 {
            return Err(CounterfactualError::InvalidConfig("safe sample count must be at least 1".into()));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(CounterfactualError::InvalidConfig(format!("reaction time must be non-negative, got {}", self.rho)));
        }
        self.space
            .validate()
            .map_err(|e| CounterfactualError::InvalidConfig(e.to_string()))
    }
}

/// Seeds consumed by one classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictSeeds {
    pub case: u64,
    pub search: u64,
    pub safe: u64,
}

impl VerdictSeeds {
    pub fn derive(case_seed: u64) -> Self {
        Self {
            case: case_seed,
            search: seed::mix(case_seed, 1),
            safe: seed::mix(case_seed, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub case_id: String,
    pub label: Label,
    pub rewind_step: usize,
    /// Parameters that avoided the failure, for A-P.
    pub theta_prime: Option<PlannerParams>,
    /// Parameter-search trials consumed.
    pub trials: usize,
    pub search_log: Vec<SearchTrial>,
    /// How the greedy-safe resumption ended, when it ran.
    pub generic_terminal: Option<TerminalStatus>,
    /// The avoiding run for A-P and A-G, the failed greedy-safe run for U.
    pub evidence: Trajectory,
    pub seeds: VerdictSeeds,
}

/// Resumes `point` with the greedy-safe ego policy until the episode ends.
pub fn classify_generic(
    point: &RewindPoint,
    scene: &Scene,
    resolver: &dyn PolicyResolver,
    sim_config: sim_core::SimConfig,
    model: &ThreatModel,
    sample_count: usize,
    seed: u64,
) -> Result<Trajectory, CounterfactualError> {
    let env = SimEnv::new(scene, resolver, sim_config, &point.scenario)?;
    let ego = GreedySafe {
        env,
        model: *model,
        sample_count,
        seed,
    };
    let sim = Simulator::new(scene, resolver, sim_config);
    resume(&sim, &ego, &point.scenario)
}

/// Rewind, reproduction check, parameter search and, when the search is
/// exhausted, the greedy-safe check.
pub fn classify(
    case: &FailureCase,
    scene: &Scene,
    resolver: &dyn PolicyResolver,
    config: &ClassifyConfig,
    case_seed: u64,
) -> Result<Verdict, CounterfactualError> {
    config.validate()?;
    let seeds = VerdictSeeds::derive(case_seed);
    let point = rewind(case, config.rho, scene, resolver)?;
    let sim_config = case.trajectory.config;
    let sim = Simulator::new(scene, resolver, sim_config);
    let search = classify_planner_specific(&point, case.params, &config.space, &config.search, &sim, seeds.search)?;
    let trials = search.trials.len();
    if let Some((theta_prime, evidence)) = search.found {
        return Ok(Verdict {
            case_id: case.case_id.clone(),
            label: Label::PlannerAvoidable,
            rewind_step: point.step,
            theta_prime: Some(theta_prime),
            trials,
            search_log: search.trials,
            generic_terminal: None,
            evidence,
            seeds,
        });
    }
    let generic = classify_generic(
        &point,
        scene,
        resolver,
        sim_config,
        &config.threat,
        config.safe_samples,
        seeds.safe,
    )?;
    let label = if generic.terminal.is_success() {
        Label::GenericAvoidable
    } else {
        Label::Unavoidable
    };
    Ok(Verdict {
        case_id: case.case_id.clone(),
        label,
        rewind_step: point.step,
        theta_prime: None,
        trials,
        search_log: search.trials,
        generic_terminal: Some(generic.terminal),
        evidence: generic,
        seeds,
    })
}
