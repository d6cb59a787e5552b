//! Vehicle state, actions, limits and the kinematic bicycle update.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::{OrientedRect, Vec2};

/// Pose and speed of one vehicle: center position, signed speed and heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    /// Heading in radians, kept in (-pi, pi].
    pub h: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, v: f64, h: f64) -> Self {
        Self {
            x,
            y,
            v,
            h: normalize_angle(h),
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn direction(&self) -> Vec2 {
        Vec2::from_angle(self.h)
    }

    pub fn velocity(&self) -> Vec2 {
        self.direction() * self.v
    }

    pub fn footprint(&self, limits: &VehicleLimits) -> OrientedRect {
        OrientedRect::new(
            self.position(),
            self.h,
            0.5 * limits.length,
            0.5 * limits.width,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.v.is_finite() && self.h.is_finite()
    }
}

/// Acceleration (m/s^2) and steering angle (rad).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Action {
    pub alpha: f64,
    pub phi: f64,
}

impl Action {
    pub const IDLE: Action = Action {
        alpha: 0.0,
        phi: 0.0,
    };

    pub fn new(alpha: f64, phi: f64) -> Self {
        Self { alpha, phi }
    }

    #[inline]
    pub fn clamped(self, limits: &VehicleLimits) -> Self {
        Self {
            alpha: self.alpha.clamp(limits.a_min, limits.a_max),
            phi: self
                .phi
                .clamp(-limits.phi_steer_max, limits.phi_steer_max),
        }
    }
}

/// Per-vehicle actuation limits and body dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleLimits {
    pub v_max: f64,
    pub v_min: f64,
    pub a_max: f64,
    pub a_min: f64,
    pub phi_steer_max: f64,
    pub length: f64,
    pub width: f64,
    pub wheelbase: f64,
}

impl Default for VehicleLimits {
    fn default() -> Self {
        Self {
            v_max: 2.0,
            v_min: -0.5,
            a_max: 1.0,
            a_min: -1.0,
            phi_steer_max: 0.6,
            length: 4.0,
            width: 1.8,
            wheelbase: 2.5,
        }
    }
}

impl VehicleLimits {
    pub fn validate(&self) -> Result<()> {
        let ok = self.v_min <= 0.0
            && 0.0 <= self.v_max
            && self.a_min < 0.0
            && 0.0 < self.a_max
            && self.phi_steer_max > 0.0
            && self.length > self.wheelbase
            && self.wheelbase > 0.0
            && self.width > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!(
                "vehicle limits violate v_min <= 0 <= v_max, a_min < 0 < a_max, length > wheelbase > 0, width > 0: {self:?}"
            )))
        }
    }

    /// Radius of the circle enclosing the footprint.
    pub fn bounding_radius(&self) -> f64 {
        0.5 * self.length.hypot(self.width)
    }
}

/// Wraps an angle into (-pi, pi].
#[inline]
pub fn normalize_angle(h: f64) -> f64 {
    // Same bits as `rem_euclid` within one turn, without the fmod call.
    let r = if (0.0..TAU).contains(&h) {
        h
    } else if h > -TAU && h < 0.0 {
        h + TAU
    } else {
        h.rem_euclid(TAU)
    };
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[inline]
fn check_finite(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(SimError::NonFinite { what, value })
    }
}

/// Advances one vehicle by `dt` under the center-referenced kinematic bicycle model.
///
/// The action is clamped to `limits`, the new speed is clamped to
/// `[v_min, v_max]` and held over the step. Position advances along the
/// chord heading `h + beta + yaw_rate * dt / 2` (midpoint rule), which makes
/// the integrator second order in `dt` for constant inputs.
#[inline]
pub fn step_vehicle(
    state: &VehicleState,
    action: &Action,
    limits: &VehicleLimits,
    dt: f64,
) -> Result<VehicleState> {
    check_finite("x", state.x)?;
    check_finite("y", state.y)?;
    check_finite("v", state.v)?;
    check_finite("h", state.h)?;
    check_finite("alpha", action.alpha)?;
    check_finite("phi", action.phi)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    Ok(integrate(state, &action.clamped(limits), limits, dt))
}

/// Unchecked update used by the simulation loop once inputs are validated.
#[inline]
pub(crate) fn integrate(
    state: &VehicleState,
    action: &Action,
    limits: &VehicleLimits,
    dt: f64,
) -> VehicleState {
    let v = (state.v + action.alpha * dt).clamp(limits.v_min, limits.v_max);
    let beta = (0.5 * action.phi.tan()).atan();
    let yaw_rate = v / (0.5 * limits.wheelbase) * beta.sin();
    let chord = state.h + beta + 0.5 * yaw_rate * dt;
    VehicleState {
        x: state.x + v * chord.cos() * dt,
        y: state.y + v * chord.sin() * dt,
        v,
        h: normalize_angle(state.h + yaw_rate * dt),
    }
}
