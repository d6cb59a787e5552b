//! Longitudinal IDM control toward the attentional vehicle plus pure-pursuit steering.

use sim_core::tracking::pure_pursuit;
use sim_core::{Action, Context, Controller, Polyline, SimState, VehicleLimits};

use crate::attention::{lateral_approach, select_attentional_vehicle_for, AttentionState};
use crate::params::{IdmTuning, PlannerParams};

/// Bumper-to-bumper gap along the line of sight between two footprints.
pub fn footprint_gap(state: &SimState, a: usize, b: usize, limits_a: &VehicleLimits, limits_b: &VehicleLimits) -> f64 {
    let va = &state.vehicles[a];
    let vb = &state.vehicles[b];
    let d = vb.position() - va.position();
    let dist = d.norm();
    match d.normalized() {
        Some(los) => dist - va.footprint(limits_a).support(los) - vb.footprint(limits_b).support(los),
        None => 0.0,
    }
}

/// Free-road IDM acceleration, before clamping.
pub fn free_road_accel(v: f64, limits: &VehicleLimits, tuning: &IdmTuning) -> f64 {
    limits.a_max * (1.0 - (v / tuning.desired_speed).abs().powf(tuning.exponent))
}

/// Desired dynamic gap. The speed-dependent part is floored at zero so a
/// fast-receding leader never makes the desired gap shorter than `s0`.
pub fn desired_gap(v: f64, approach: f64, params: &PlannerParams, limits: &VehicleLimits, tuning: &IdmTuning) -> f64 {
    let dynamic = v * tuning.time_headway + v * approach / (2.0 * (limits.a_max * params.d_idm).sqrt());
    tuning.s0 + dynamic.max(0.0)
}

/// IDM acceleration behind a vehicle at bumper gap `gap` closing in at
/// `approach`, clamped to the acceleration limits. A non-positive gap
/// returns the emergency deceleration.
pub fn follow_accel(
    v: f64,
    gap: f64,
    approach: f64,
    params: &PlannerParams,
    limits: &VehicleLimits,
    tuning: &IdmTuning,
) -> f64 {
    if gap <= 0.0 {
        return limits.a_min;
    }
    let ratio = desired_gap(v, approach, params, limits, tuning) / gap;
    let raw = free_road_accel(v, limits, tuning) - limits.a_max * ratio * ratio;
    raw.clamp(limits.a_min, limits.a_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub action: Action,
    pub attention: AttentionState,
}

/// One planning step for the vehicle in `slot` following `route`.
///
/// The planner never reverses: when braking would carry the speed below zero
/// within `dt`, the deceleration is reduced to stop exactly.
pub fn plan_action_for(
    state: &SimState,
    slot: usize,
    route: &Polyline,
    limits_of: &dyn Fn(usize) -> VehicleLimits,
    params: &PlannerParams,
    tuning: &IdmTuning,
    dt: f64,
) -> Plan {
    let me = &state.vehicles[slot];
    let limits = limits_of(slot);
    let attention = select_attentional_vehicle_for(state, slot, params, tuning);
    let mut alpha = match attention.vehicle {
        None => free_road_accel(me.v, &limits, tuning).clamp(limits.a_min, limits.a_max),
        Some(j) => {
            let gap = footprint_gap(state, slot, j, &limits, &limits_of(j));
            let approach = lateral_approach(me, &state.vehicles[j]);
            follow_accel(me.v, gap, approach, params, &limits, tuning)
        }
    };
    if me.v >= 0.0 && dt > 0.0 {
        alpha = alpha.max(-me.v / dt);
    }
    let phi = pure_pursuit(me, route, tuning.lookahead, 0.0, &limits);
    Plan {
        action: Action::new(alpha, phi),
        attention,
    }
}

/// Ego planning step where every vehicle shares `limits`.
pub fn plan_action(
    state: &SimState,
    route: &Polyline,
    params: &PlannerParams,
    tuning: &IdmTuning,
    limits: &VehicleLimits,
    dt: f64,
) -> Plan {
    let l = *limits;
    plan_action_for(state, 0, route, &move |_| l, params, tuning, dt)
}

/// The planner under test as a simulator controller.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IdmPlanner {
    pub params: PlannerParams,
    pub tuning: IdmTuning,
}

impl IdmPlanner {
    pub fn new(params: PlannerParams) -> Self {
        Self {
            params,
            tuning: IdmTuning::default(),
        }
    }

    pub fn plan(&self, ctx: &Context<'_>, slot: usize) -> Plan {
        let scene = ctx.scene;
        plan_action_for(
            ctx.state,
            slot,
            scene.route(slot),
            &|j| *scene.limits(j),
            &self.params,
            &self.tuning,
            ctx.dt,
        )
    }
}

impl Controller for IdmPlanner {
    fn act(&self, ctx: &Context<'_>, slot: usize, _seed: u64) -> Action {
        self.plan(ctx, slot).action
    }
}
