//! Fixed-size, ego-frame observation shared by every learned policy.

use sim_core::{normalize_angle, Context, SimState, Vec2};
use std::f64::consts::PI;

/// Own features plus `NEIGHBORS` neighbor blocks.
pub const OWN_FEATURES: usize = 4;
pub const NEIGHBORS: usize = 3;
pub const NEIGHBOR_FEATURES: usize = 6;
pub const OBS_DIM: usize = OWN_FEATURES + NEIGHBORS * NEIGHBOR_FEATURES;

/// Distance along the route at which the heading error is measured.
pub const LOOKAHEAD: f64 = 3.0;
pub const POSITION_SCALE: f64 = 20.0;
pub const LATERAL_SCALE: f64 = 1.75;
pub const PROGRESS_CAP: f64 = 20.0;
pub const OBSERVATION_SPEC: &str = "ego-frame-k3-v2";

/// Layout:
/// `[v/v_max, heading error/pi, cross-track/1.75, min(remaining, 20)/20]`
/// followed, for each of the three nearest others (distance, then slot), by
/// `[dx/20, dy/20, dvx/v_max, dvy/v_max, dh/pi, turn/pi]` in the observer's frame,
/// where `turn` is the neighbor's own heading error (its turn signal).
/// Missing neighbors are all zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation(pub [f64; OBS_DIM]);

/// Decoded neighbor in physical units, observer at the origin facing +x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub position: Vec2,
    /// Absolute velocity expressed in the observer frame.
    pub velocity: Vec2,
    pub heading: f64,
    /// The neighbor's route tangent at its lookahead point minus its heading, rad.
    pub turn: f64,
}

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn speed(&self, v_max: f64) -> f64 {
        self.0[0] * v_max
    }

    /// Route tangent at the lookahead point relative to the own heading, rad.
    pub fn heading_error(&self) -> f64 {
        self.0[1] * PI
    }

    /// Signed offset from the route, positive to the left, m.
    pub fn cross_track(&self) -> f64 {
        self.0[2] * LATERAL_SCALE
    }

    pub fn remaining(&self) -> f64 {
        self.0[3] * PROGRESS_CAP
    }

    pub fn neighbors(&self, v_max: f64) -> impl Iterator<Item = Neighbor> + '_ {
        let own = Vec2::new(self.speed(v_max), 0.0);
        (0..NEIGHBORS).filter_map(move |k| {
            let b = &self.0[OWN_FEATURES + k * NEIGHBOR_FEATURES..][..NEIGHBOR_FEATURES];
            if b.iter().all(|x| *x == 0.0) {
                return None;
            }
            Some(Neighbor {
                position: Vec2::new(b[0], b[1]) * POSITION_SCALE,
                velocity: Vec2::new(b[2], b[3]) * v_max + own,
                heading: b[4] * PI,
                turn: b[5] * PI,
            })
        })
    }
}

fn heading_error(scene: &sim_core::Scene, state: &SimState, slot: usize) -> f64 {
    let me = &state.vehicles[slot];
    let route = scene.route(slot);
    let (_, look_h) = route.point_at(route.project(me.position()).s + LOOKAHEAD);
    normalize_angle(look_h - me.h)
}

/// Observation of the vehicle in `slot`.
pub fn observe(ctx: &Context<'_>, slot: usize) -> Observation {
    observe_state(ctx.scene, ctx.state, slot)
}

pub fn observe_state(scene: &sim_core::Scene, state: &SimState, slot: usize) -> Observation {
    let me = &state.vehicles[slot];
    let spec = scene.vehicle(slot);
    let v_max = spec.limits.v_max;
    let route = scene.route(slot);
    let proj = route.project(me.position());

    let mut f = [0.0; OBS_DIM];
    f[0] = me.v / v_max;
    f[1] = heading_error(scene, state, slot) / PI;
    f[2] = proj.lateral / LATERAL_SCALE;
    f[3] = (spec.goal_s - proj.s).clamp(0.0, PROGRESS_CAP) / PROGRESS_CAP;

    let mut others: Vec<(f64, usize)> = state
        .vehicles
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != slot)
        .map(|(j, o)| (o.position().distance(me.position()), j))
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    for (k, &(_, j)) in others.iter().take(NEIGHBORS).enumerate() {
        let o = &state.vehicles[j];
        let d = (o.position() - me.position()).to_frame(me.h);
        let dv = (o.velocity() - me.velocity()).to_frame(me.h);
        let b = &mut f[OWN_FEATURES + k * NEIGHBOR_FEATURES..][..NEIGHBOR_FEATURES];
        b[0] = d.x / POSITION_SCALE;
        b[1] = d.y / POSITION_SCALE;
        b[2] = dv.x / v_max;
        b[3] = dv.y / v_max;
        b[4] = normalize_angle(o.h - me.h) / PI;
        b[5] = heading_error(scene, state, j) / PI;
    }
    Observation(f)
}
