//! Background-traffic policies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sim_core::{Action, Context, Controller, VehicleLimits};

use crate::network::Architecture;
use crate::observation::{observe, Observation, OBSERVATION_SPEC, OBS_DIM};
use crate::prior::{prior_action, Style, STYLE_LEN};
use crate::ForgeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Style parameters followed by residual network weights.
    Network,
    /// `[alpha, phi]`.
    ConstantAction,
    /// Uniform random actions within the limits, drawn from the step seed.
    Random,
    /// The prior alone; parameters are the style.
    Scripted,
}

pub fn network_architecture() -> Architecture {
    Architecture(vec![OBS_DIM, 32, 32, 2])
}

/// Residual network output is scaled by this fraction of the action limits.
pub const RESIDUAL_GAIN: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub id: String,
    pub kind: PolicyKind,
    pub params: Vec<f64>,
    /// Route the policy was trained on, if any. At run time every vehicle
    /// follows its own route from the scene.
    #[serde(default)]
    pub route: Option<String>,
    pub observation: String,
}

impl Policy {
    pub fn expected_len(kind: PolicyKind) -> Option<usize> {
        match kind {
            PolicyKind::Network => Some(STYLE_LEN + network_architecture().param_count()),
            PolicyKind::ConstantAction => Some(2),
            PolicyKind::Random => Some(0),
            PolicyKind::Scripted => Some(STYLE_LEN),
        }
    }

    pub fn new(id: impl Into<String>, kind: PolicyKind, params: Vec<f64>) -> Result<Self, ForgeError> {
        let p = Self {
            id: id.into(),
            kind,
            params,
            route: None,
            observation: OBSERVATION_SPEC.into(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn scripted(id: impl Into<String>, style: Style) -> Self {
        Self::new(id, PolicyKind::Scripted, style.to_array().to_vec()).expect("fixed length")
    }

    pub fn constant(id: impl Into<String>, alpha: f64, phi: f64) -> Self {
        Self::new(id, PolicyKind::ConstantAction, vec![alpha, phi]).expect("fixed length")
    }

    pub fn random(id: impl Into<String>) -> Self {
        Self::new(id, PolicyKind::Random, vec![]).expect("fixed length")
    }

    /// Network policy with the given style and freshly initialized weights.
    pub fn network<R: Rng + ?Sized>(id: impl Into<String>, style: Style, rng: &mut R) -> Self {
        let mut params = style.to_array().to_vec();
        params.extend(network_architecture().init(rng));
        Self::new(id, PolicyKind::Network, params).expect("fixed length")
    }

    pub fn validate(&self) -> Result<(), ForgeError> {
        let want = Self::expected_len(self.kind).expect("every kind has a fixed length");
        if self.params.len() != want {
            return Err(ForgeError::ParamLength {
                id: self.id.clone(),
                expected: want,
                got: self.params.len(),
            });
        }
        if self.params.iter().any(|x| !x.is_finite()) {
            return Err(ForgeError::NonFinite(self.id.clone()));
        }
        Ok(())
    }

    pub fn style(&self, limits: &VehicleLimits) -> Option<Style> {
        match self.kind {
            PolicyKind::Network | PolicyKind::Scripted => Some(Style::from_slice(&self.params, limits)),
            _ => None,
        }
    }

    /// Action from an observation; `seed` only matters for `Random`.
    pub fn act_on(&self, obs: &Observation, limits: &VehicleLimits, dt: f64, seed: u64) -> Action {
        let a = match self.kind {
            PolicyKind::ConstantAction => Action::new(self.params[0], self.params[1]),
            PolicyKind::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Action::new(
                    rng.random_range(limits.a_min..=limits.a_max),
                    rng.random_range(-limits.phi_steer_max..=limits.phi_steer_max),
                )
            }
            PolicyKind::Scripted => prior_action(obs, &Style::from_slice(&self.params, limits), limits, dt).0,
            PolicyKind::Network => {
                let style = Style::from_slice(&self.params, limits);
                let (base, _) = prior_action(obs, &style, limits, dt);
                let out = network_architecture().forward(&self.params[STYLE_LEN..], obs.as_slice());
                let mut alpha = base.alpha + RESIDUAL_GAIN * out[0] * limits.a_max;
                let v = obs.speed(limits.v_max);
                if v >= 0.0 {
                    alpha = alpha.max((-v / dt).min(base.alpha));
                }
                Action::new(alpha, base.phi + RESIDUAL_GAIN * out[1] * limits.phi_steer_max)
            }
        };
        a.clamped(limits)
    }
}

impl Controller for Policy {
    fn act(&self, ctx: &Context<'_>, slot: usize, seed: u64) -> Action {
        let limits = ctx.scene.limits(slot);
        if self.kind == PolicyKind::ConstantAction || self.kind == PolicyKind::Random {
            return self.act_on(&Observation([0.0; OBS_DIM]), limits, ctx.dt, seed);
        }
        self.act_on(&observe(ctx, slot), limits, ctx.dt, seed)
    }
}
