use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::PlannerError;

/// Searchable planner parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    /// Comfortable deceleration, m/s².
    pub d_idm: f64,
    /// Widest attentional angle (full fan width), rad.
    pub phi_max: f64,
    /// Narrowest attentional angle, rad.
    pub phi_min: f64,
}

impl Default for PlannerParams {
    // Defaults are pi and pi/6 rounded to three decimals.
    #[allow(clippy::approx_constant)]
    fn default() -> Self {
        Self {
            d_idm: 0.5,
            phi_max: 3.142,
            phi_min: 0.524,
        }
    }
}

impl PlannerParams {
    pub fn new(d_idm: f64, phi_max: f64, phi_min: f64) -> Result<Self, PlannerError> {
        let p = Self {
            d_idm,
            phi_max,
            phi_min,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PlannerError> {
        let ok = self.d_idm.is_finite()
            && self.d_idm > 0.0
            && self.phi_min > 0.0
            && self.phi_min <= self.phi_max
            && self.phi_max <= 2.0 * PI;
        if ok {
            Ok(())
        } else {
            Err(PlannerError::InvalidParams(*self))
        }
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.hi > self.lo {
            rng.random_range(self.lo..=self.hi)
        } else {
            self.lo
        }
    }
}

/// Box of admissible parameters for the counterfactual search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    pub d_idm: Interval,
    pub phi_max: Interval,
    pub phi_min: Interval,
}

impl Default for ParamSpace {
    fn default() -> Self {
        Self {
            d_idm: Interval::new(0.1, 10.0),
            phi_max: Interval::new(FRAC_PI_2, 2.0 * PI),
            phi_min: Interval::new(PI / 12.0, FRAC_PI_2),
        }
    }
}

impl ParamSpace {
    /// Every point of the box must be a valid parameter triple.
    pub fn validate(&self) -> Result<(), PlannerError> {
        let ivs = [self.d_idm, self.phi_max, self.phi_min];
        let ok = ivs.iter().all(|i| i.lo.is_finite() && i.hi.is_finite() && i.lo <= i.hi)
            && self.d_idm.lo > 0.0
            && self.phi_min.lo > 0.0
            && self.phi_min.hi <= self.phi_max.lo
            && self.phi_max.hi <= 2.0 * PI;
        if ok {
            Ok(())
        } else {
            Err(PlannerError::InvalidSpace)
        }
    }

    pub fn contains(&self, p: &PlannerParams) -> bool {
        self.d_idm.contains(p.d_idm) && self.phi_max.contains(p.phi_max) && self.phi_min.contains(p.phi_min)
    }

    pub fn clamp(&self, p: PlannerParams) -> PlannerParams {
        PlannerParams {
            d_idm: self.d_idm.clamp(p.d_idm),
            phi_max: self.phi_max.clamp(p.phi_max),
            phi_min: self.phi_min.clamp(p.phi_min),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PlannerParams {
        PlannerParams {
            d_idm: self.d_idm.sample(rng),
            phi_max: self.phi_max.sample(rng),
            phi_min: self.phi_min.sample(rng),
        }
    }

    pub fn to_array(p: &PlannerParams) -> [f64; 3] {
        [p.d_idm, p.phi_max, p.phi_min]
    }

    pub fn from_array(a: [f64; 3]) -> PlannerParams {
        PlannerParams {
            d_idm: a[0],
            phi_max: a[1],
            phi_min: a[2],
        }
    }

    pub fn intervals(&self) -> [Interval; 3] {
        [self.d_idm, self.phi_max, self.phi_min]
    }
}

/// Fixed IDM constants and planner geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdmTuning {
    /// Jam distance, m.
    pub s0: f64,
    /// Desired time headway, s.
    pub time_headway: f64,
    /// Free-road acceleration exponent.
    pub exponent: f64,
    pub desired_speed: f64,
    /// Lateral approach speed at which the fan reaches its full width, m/s.
    pub lateral_scale: f64,
    pub attention_radius: f64,
    /// Pure-pursuit lookahead along the route, m.
    pub lookahead: f64,
}

impl Default for IdmTuning {
    fn default() -> Self {
        Self {
            s0: 2.0,
            time_headway: 1.5,
            exponent: 4.0,
            desired_speed: 2.0,
            lateral_scale: 2.0,
            attention_radius: 20.0,
            lookahead: 3.0,
        }
    }
}

impl IdmTuning {
    pub fn validate(&self) -> Result<(), PlannerError> {
        let all = [
            self.s0,
            self.time_headway,
            self.exponent,
            self.desired_speed,
            self.lateral_scale,
            self.attention_radius,
            self.lookahead,
        ];
        if all.iter().all(|x| x.is_finite() && *x > 0.0) {
            Ok(())
        } else {
            Err(PlannerError::InvalidTuning)
        }
    }
}
