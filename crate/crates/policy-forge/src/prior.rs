//! Observation-only driving prior: lane tracking at a preferred speed and
//! offset, plus a symmetric yielding rule between vehicles running it.
//!
//! Every vehicle predicts itself and each neighbor along their current
//! headings at `max(speed, PROBE_SPEED)`. At the first predicted overlap,
//! the vehicle that would be driving into the other (the other lies further
//! ahead along its heading than it lies ahead along the other's) brakes to
//! stop short of the contact. Two vehicles evaluating the same pair reach
//! opposite conclusions, so exactly one of them yields.

use serde::{Deserialize, Serialize};
use sim_core::geometry::{rects_overlap, OrientedRect};
use sim_core::{Action, Vec2, VehicleLimits};

use crate::observation::{Neighbor, Observation, LOOKAHEAD};

pub const PROBE_SPEED: f64 = 0.5;
const PREDICTION_STEP: f64 = 0.2;
const SPEED_GAIN: f64 = 1.0;
const STANDSTILL: f64 = 0.05;
const TURN_TIE: f64 = 0.05;
/// Speed held while backing off a mutual block, m/s.
const BACKOFF_SPEED: f64 = -0.3;

/// Behavioral style of the prior; also the leading entries of a network
/// policy's parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Style {
    /// Preferred cruising speed, m/s.
    pub cruise: f64,
    /// Preferred lateral offset from the route, positive to the left, m.
    pub offset: f64,
    /// Prediction horizon for conflicts, s.
    pub horizon: f64,
    /// Extra clearance added around both footprints, m.
    pub margin: f64,
}

pub const STYLE_LEN: usize = 4;

impl Default for Style {
    fn default() -> Self {
        Self {
            cruise: 1.6,
            offset: 0.0,
            horizon: 3.0,
            margin: 0.4,
        }
    }
}

impl Style {
    pub fn to_array(self) -> [f64; STYLE_LEN] {
        [self.cruise, self.offset, self.horizon, self.margin]
    }

    /// Reads a style from raw parameters, projecting onto the usable box.
    pub fn from_slice(p: &[f64], limits: &VehicleLimits) -> Self {
        Self {
            cruise: p[0].clamp(0.2, limits.v_max),
            offset: p[1].clamp(-0.8, 0.8),
            horizon: p[2].clamp(0.4, 6.0),
            margin: p[3].clamp(0.0, 1.0),
        }
    }
}

/// The most pressing reason to brake, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conflict {
    /// Free distance along the own heading before the predicted contact, m.
    pub room: f64,
    /// True when the neighbor's current footprint blocks the own path; false
    /// when the own vehicle gives way in a predicted crossing.
    pub blocked: bool,
    /// Both vehicles block each other and this one backs off to break the tie.
    pub reverse: bool,
}

/// Pose predicted along a circular arc of constant curvature.
#[derive(Debug, Clone, Copy)]
struct Pose {
    center: Vec2,
    heading: f64,
}

/// Curvature a pure-pursuit tracker settles on for a given heading error.
fn intent_curvature(turn: f64, limits: &VehicleLimits) -> f64 {
    let cap = limits.phi_steer_max.tan() / limits.wheelbase;
    (2.0 * turn.sin() / LOOKAHEAD).clamp(-cap, cap)
}

fn predict(start: Vec2, heading: f64, speed: f64, curvature: f64, steps: usize) -> Vec<Pose> {
    (0..=steps)
        .map(|k| {
            let t = k as f64 * PREDICTION_STEP;
            let turn = speed * curvature * t;
            let center = if turn.abs() < 1e-9 {
                start + Vec2::from_angle(heading) * (speed * t)
            } else {
                let r = 1.0 / curvature;
                start
                    + Vec2::new(
                        r * ((heading + turn).sin() - heading.sin()),
                        r * (heading.cos() - (heading + turn).cos()),
                    )
            };
            Pose {
                center,
                heading: heading + turn,
            }
        })
        .collect()
}

fn footprint(p: &Pose, hl: f64, hw: f64) -> OrientedRect {
    OrientedRect::new(p.center, p.heading, hl, hw)
}

/// First own sample index at which the own footprint touches any of `obstacles`.
fn first_touch(path: &[Pose], hl: f64, hw: f64, obstacles: &[OrientedRect]) -> Option<usize> {
    path.iter().position(|p| {
        let me = footprint(p, hl, hw);
        obstacles.iter().any(|o| rects_overlap(&me, o))
    })
}

/// Tie-break between two stopped vehicles blocking each other: the one turning harder
/// backs off, then the one lying behind the other. Both sides evaluate the same pair of
/// numbers with roles swapped, so exactly one backs off.
fn backs_off(own_turn: f64, n: &Neighbor) -> bool {
    if (own_turn.abs() - n.turn.abs()).abs() > TURN_TIE {
        return own_turn.abs() > n.turn.abs();
    }
    let ahead_me = n.position.x;
    let ahead_o = -n.position.dot(Vec2::from_angle(n.heading));
    if (ahead_me - ahead_o).abs() > 1e-9 {
        ahead_me > ahead_o
    } else {
        n.position.y < 0.0
    }
}

fn first_conflict(obs: &Observation, style: &Style, limits: &VehicleLimits) -> Option<Conflict> {
    let v = obs.speed(limits.v_max);
    let u_me = v.max(PROBE_SPEED);
    let hl = 0.5 * limits.length + 0.5 * style.margin;
    let hw = 0.5 * limits.width + 0.5 * style.margin;
    let bare_hw = 0.5 * limits.width;
    let reach = 2.0 * hl.hypot(hw);
    let steps = (style.horizon / PREDICTION_STEP).ceil() as usize;
    let buffer = u_me * PREDICTION_STEP;
    let room_at = |k: usize| (u_me * k as f64 * PREDICTION_STEP - buffer).max(0.0);
    let mine = predict(Vec2::ZERO, 0.0, u_me, intent_curvature(obs.heading_error(), limits), steps);
    let mut best: Option<Conflict> = None;
    let mut consider = |c: Conflict| {
        if best.is_none_or(|b| (c.reverse, -c.room) > (b.reverse, -b.room)) {
            best = Some(c);
        }
    };
    for n in obs.neighbors(limits.v_max) {
        let u_o = n.velocity.dot(Vec2::from_angle(n.heading)).max(PROBE_SPEED);
        if n.position.norm() > reach + (u_me + u_o) * style.horizon {
            continue;
        }
        let theirs = predict(n.position, n.heading, u_o, intent_curvature(n.turn, limits), steps);
        // Whatever the neighbor does next, its current footprint must not be driven into.
        // Lateral clearance is not inflated here, so vehicles side by side never block each other.
        if let Some(k) = first_touch(&mine, hl, bare_hw, &[footprint(&theirs[0], hl, bare_hw)]) {
            let mutual = first_touch(&theirs, hl, bare_hw, &[footprint(&mine[0], hl, bare_hw)]).is_some();
            consider(Conflict {
                room: room_at(k),
                blocked: true,
                reverse: mutual && v < STANDSTILL && backs_off(obs.heading_error(), &n),
            });
        }
        // Predicted contact: the vehicle driving into the other gives way.
        let Some(k) = (0..=steps).find(|&k| rects_overlap(&footprint(&mine[k], hl, hw), &footprint(&theirs[k], hl, hw)))
        else {
            continue;
        };
        let (a, b) = (mine[k], theirs[k]);
        let ahead_me = (b.center - a.center).dot(Vec2::from_angle(a.heading));
        let ahead_o = (a.center - b.center).dot(Vec2::from_angle(b.heading));
        let give_way = if (ahead_me - ahead_o).abs() > 1e-9 {
            ahead_me > ahead_o
        } else {
            n.position.y < 0.0
        };
        if give_way {
            // Stay clear of everywhere the neighbor is predicted to be over the horizon.
            let sweep = 0.5 * u_o * PREDICTION_STEP;
            let corridor: Vec<OrientedRect> = theirs.iter().map(|p| footprint(p, hl + sweep, hw)).collect();
            let k = first_touch(&mine, hl, hw, &corridor).unwrap_or(0);
            consider(Conflict {
                room: room_at(k),
                blocked: false,
                reverse: false,
            });
        }
    }
    best
}

/// Steering toward the point `LOOKAHEAD` ahead on the line offset by
/// `style.offset` from the route, reconstructed from the observation.
pub fn lane_steer(obs: &Observation, style: &Style, limits: &VehicleLimits) -> f64 {
    let dh = obs.heading_error();
    let along = Vec2::from_angle(dh);
    let target = along * LOOKAHEAD + along.perp() * (style.offset - obs.cross_track());
    let dist = target.norm();
    let bearing = target.angle();
    let phi = (2.0 * limits.wheelbase * bearing.sin() / dist).atan();
    phi.clamp(-limits.phi_steer_max, limits.phi_steer_max)
}

/// Prior action and the conflict it reacted to.
pub fn prior_action(obs: &Observation, style: &Style, limits: &VehicleLimits, dt: f64) -> (Action, Option<Conflict>) {
    let v = obs.speed(limits.v_max);
    let mut alpha = (SPEED_GAIN * (style.cruise - v)).clamp(limits.a_min, limits.a_max);
    let conflict = first_conflict(obs, style, limits);
    match conflict {
        Some(c) if c.reverse => {
            let alpha = (SPEED_GAIN * (BACKOFF_SPEED.max(limits.v_min) - v)).clamp(limits.a_min, limits.a_max);
            return (Action::new(alpha, 0.0), conflict);
        }
        Some(c) if v > 0.0 => {
            let brake = -v * v / (2.0 * c.room.max(0.05)) - 0.1;
            alpha = alpha.min(brake).min(0.0).max(limits.a_min);
        }
        Some(_) => alpha = (-v / dt).min(limits.a_max),
        None => {}
    }
    (Action::new(alpha, lane_steer(obs, style, limits)), conflict)
}
