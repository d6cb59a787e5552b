//! Scenes (map plus vehicle layout) and seeded initial-state perturbation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collision::{detect_collisions, CollisionEvent};
use crate::error::{Result, SimError};
use crate::map::{MapGeometry, Polyline};
use crate::seed;
use crate::state::SimState;
use crate::vehicle::{VehicleLimits, VehicleState};

/// Placement and route of one vehicle. The nominal start is expressed in
/// route coordinates so perturbations stay aligned with the lane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleSpec {
    pub name: String,
    pub route: String,
    #[serde(default)]
    pub limits: VehicleLimits,
    /// Arc length of the initial center along the route.
    pub start_s: f64,
    /// Initial lateral offset from the route, positive to the left.
    #[serde(default)]
    pub start_offset: f64,
    #[serde(default)]
    pub start_speed: f64,
    /// Arc length past which the vehicle has completed its route.
    pub goal_s: f64,
}

impl VehicleSpec {
    pub fn state_at(&self, route: &Polyline, s: f64, offset: f64, v: f64) -> VehicleState {
        let (p, h) = route.point_at(s);
        let n = crate::geometry::Vec2::from_angle(h).perp();
        let c = p + n * offset;
        VehicleState::new(c.x, c.y, v, h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub id: String,
    pub map: MapGeometry,
    pub ego: VehicleSpec,
    pub others: Vec<VehicleSpec>,
}

impl Scene {
    pub fn vehicle_count(&self) -> usize {
        1 + self.others.len()
    }

    pub fn vehicle(&self, slot: usize) -> &VehicleSpec {
        if slot == 0 {
            &self.ego
        } else {
            &self.others[slot - 1]
        }
    }

    pub fn route(&self, slot: usize) -> &Polyline {
        let name = &self.vehicle(slot).route;
        self.map
            .routes
            .get(name)
            .unwrap_or_else(|| panic!("scene `{}` references missing route `{name}`", self.id))
    }

    pub fn limits(&self, slot: usize) -> &VehicleLimits {
        &self.vehicle(slot).limits
    }

    pub fn nominal_state(&self) -> SimState {
        let vehicles = (0..self.vehicle_count())
            .map(|slot| {
                let spec = self.vehicle(slot);
                spec.state_at(self.route(slot), spec.start_s, spec.start_offset, spec.start_speed)
            })
            .collect();
        SimState::new(0, vehicles)
    }

    /// Structural checks plus validity of the nominal layout.
    pub fn validate(&self) -> Result<()> {
        self.map.validate()?;
        for slot in 0..self.vehicle_count() {
            let spec = self.vehicle(slot);
            self.map.route(&spec.route)?;
            spec.limits.validate()?;
        }
        let nominal = self.nominal_state();
        self.check_state(&nominal)
    }

    /// A layout is valid when no footprints overlap, no vehicle touches a
    /// wall and every footprint lies inside the map bounds.
    pub fn check_state(&self, state: &SimState) -> Result<()> {
        if state.len() != self.vehicle_count() {
            return Err(SimError::InvalidConfig(format!(
                "state has {} vehicles, scene `{}` has {}",
                state.len(),
                self.id,
                self.vehicle_count()
            )));
        }
        if let Some(event) = detect_collisions(state, self).first() {
            return Err(SimError::InvalidConfig(format!(
                "layout of scene `{}` is not collision-free: {event:?}",
                self.id
            )));
        }
        for (slot, v) in state.vehicles.iter().enumerate() {
            if !v.is_finite() {
                return Err(SimError::NonFinite {
                    what: "initial state",
                    value: f64::NAN,
                });
            }
            if !self.map.in_bounds(&v.footprint(self.limits(slot))) {
                return Err(SimError::InvalidConfig(format!(
                    "vehicle {slot} of scene `{}` leaves the map bounds",
                    self.id
                )));
            }
        }
        Ok(())
    }

    pub fn is_valid_state(&self, state: &SimState) -> bool {
        self.check_state(state).is_ok()
    }

    /// Convenience filter used by callers that only care about ego events.
    pub fn ego_events(&self, state: &SimState) -> Vec<CollisionEvent> {
        detect_collisions(state, self)
            .into_iter()
            .filter(CollisionEvent::involves_ego)
            .collect()
    }
}

/// Per-vehicle perturbation ranges around the nominal layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    /// Longitudinal shift along the route, uniform in `[-longitudinal, longitudinal]` m.
    pub longitudinal: f64,
    /// Lateral shift, uniform in `[-lateral, lateral]` m.
    pub lateral: f64,
    pub speed_lo: f64,
    pub speed_hi: f64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        Self {
            longitudinal: 3.0,
            lateral: 0.3,
            speed_lo: 0.0,
            speed_hi: 1.5,
        }
    }
}

impl PerturbationSpec {
    pub const NONE: PerturbationSpec = PerturbationSpec {
        longitudinal: 0.0,
        lateral: 0.0,
        speed_lo: 0.0,
        speed_hi: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        if self.longitudinal >= 0.0 && self.lateral >= 0.0 && self.speed_lo <= self.speed_hi {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!("bad perturbation ranges {self:?}")))
        }
    }
}

/// Maximum draws per pattern before the ranges are declared too aggressive.
pub const PERTURBATION_RETRY_CAP: usize = 100;

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Draws `count` valid initial states. Pattern `i` depends only on
/// `(seed, i)`, so a longer list extends a shorter one.
///
/// A zero-width speed range keeps each vehicle's nominal speed.
pub fn generate_perturbations(
    scene: &Scene,
    spec: &PerturbationSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<SimState>> {
    spec.validate()?;
    if count == 0 {
        return Err(SimError::InvalidConfig("perturbation count must be positive".into()));
    }
    (0..count)
        .map(|pattern| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed, pattern as u64));
            for _ in 0..PERTURBATION_RETRY_CAP {
                let vehicles = (0..scene.vehicle_count())
                    .map(|slot| {
                        let v = scene.vehicle(slot);
                        let ds = uniform(&mut rng, -spec.longitudinal, spec.longitudinal);
                        let dd = uniform(&mut rng, -spec.lateral, spec.lateral);
                        let speed = if spec.speed_hi > spec.speed_lo {
                            uniform(&mut rng, spec.speed_lo, spec.speed_hi)
                        } else {
                            v.start_speed
                        };
                        v.state_at(scene.route(slot), v.start_s + ds, v.start_offset + dd, speed)
                    })
                    .collect();
                let state = SimState::new(0, vehicles);
                if scene.is_valid_state(&state) {
                    return Ok(state);
                }
            }
            Err(SimError::PerturbationRetries {
                pattern,
                retries: PERTURBATION_RETRY_CAP,
            })
        })
        .collect()
}
