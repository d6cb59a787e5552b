//! Planner-specific avoidability: search the parameter box for a θ′ ≠ θ
//! that resumes the rewound scenario without failing.

use planner_idm::{IdmPlanner, ParamSpace, PlannerParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sim_core::{Simulator, TerminalStatus, Trajectory};

use crate::rewind::{resume, RewindPoint};
use crate::CounterfactualError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub budget: usize,
    /// Trials drawn uniformly before the sampler starts exploiting.
    pub warmup: usize,
    /// Number of longest-surviving trials resampled around.
    pub elites: usize,
    /// Proposal standard deviation as a fraction of each interval's width.
    pub sigma_fraction: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: 100,
            warmup: 20,
            elites: 5,
            sigma_fraction: 0.1,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), CounterfactualError> {
        if self.elites == 0 || !(self.sigma_fraction > 0.0 && self.sigma_fraction.is_finite()) {
            return Err(CounterfactualError::InvalidConfig(format!("invalid search config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchTrial {
    pub index: usize,
    pub params: PlannerParams,
    pub terminal: TerminalStatus,
    /// Steps survived after the rewind point.
    pub survived: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub trials: Vec<SearchTrial>,
    /// The successful θ′ and its resumed trajectory.
    pub found: Option<(PlannerParams, Trajectory)>,
}

impl SearchOutcome {
    pub fn is_exhausted(&self) -> bool {
        self.found.is_none()
    }
}

/// Proposes parameter triples: uniform during warm-up, then Gaussian around
/// a uniformly chosen elite. The proposal sequence depends only on the seed
/// and the trials observed so far, never on the budget.
struct Sampler {
    space: ParamSpace,
    config: SearchConfig,
    rng: ChaCha8Rng,
    excluded: PlannerParams,
}

impl Sampler {
    const MAX_REDRAWS: usize = 1000;

    fn propose(&mut self, history: &[SearchTrial]) -> PlannerParams {
        for _ in 0..Self::MAX_REDRAWS {
            let p = if history.len() < self.config.warmup {
                self.space.sample(&mut self.rng)
            } else {
                self.around_elite(history)
            };
            if p != self.excluded {
                return p;
            }
        }
        panic!("parameter space {:?} admits nothing but the excluded θ", self.space)
    }

    fn around_elite(&mut self, history: &[SearchTrial]) -> PlannerParams {
        let mut ranked: Vec<&SearchTrial> = history.iter().collect();
        ranked.sort_by(|a, b| b.survived.cmp(&a.survived).then(a.index.cmp(&b.index)));
        let elite = ranked[self.rng.random_range(0..self.config.elites.min(ranked.len()))];
        let centre = ParamSpace::to_array(&elite.params);
        let ivs = self.space.intervals();
        let mut next = [0.0; 3];
        for d in 0..3 {
            let z: f64 = StandardNormal.sample(&mut self.rng);
            next[d] = ivs[d].clamp(centre[d] + z * self.config.sigma_fraction * ivs[d].width());
        }
        ParamSpace::from_array(next)
    }
}

/// Searches up to `config.budget` parameter triples other than `theta`,
/// stopping at the first whose resumed episode ends in E without F.
pub fn classify_planner_specific(
    point: &RewindPoint,
    theta: PlannerParams,
    space: &ParamSpace,
    config: &SearchConfig,
    sim: &Simulator<'_>,
    seed: u64,
) -> Result<SearchOutcome, CounterfactualError> {
    config.validate()?;
    space.validate().map_err(|e| CounterfactualError::InvalidConfig(e.to_string()))?;
    let mut sampler = Sampler {
        space: *space,
        config: *config,
        rng: ChaCha8Rng::seed_from_u64(seed),
        excluded: theta,
    };
    let mut trials: Vec<SearchTrial> = Vec::with_capacity(config.budget);
    for index in 0..config.budget {
        let params = sampler.propose(&trials);
        let traj = resume(sim, &IdmPlanner::new(params), &point.scenario)?;
        trials.push(SearchTrial {
            index,
            params,
            terminal: traj.terminal,
            survived: traj.final_step() - point.step,
        });
        if traj.terminal.is_success() {
            return Ok(SearchOutcome {
                trials,
                found: Some((params, traj)),
            });
        }
    }
    Ok(SearchOutcome { trials, found: None })
}
