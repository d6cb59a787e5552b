//! Two-dimensional time to collision under constant-velocity extrapolation.

use sim_core::geometry::rect_separation;
use sim_core::{ego_failure, OrientedRect, Scene, Trajectory, VehicleLimits, VehicleState};

/// Extrapolation window; later contacts report `f64::INFINITY`.
pub const TTC_HORIZON: f64 = 10.0;
/// Bisection stops once the bracket is this narrow, s.
pub const TTC_TOLERANCE: f64 = 1e-6;
/// Episodes whose min-TTC is at most this are near-misses, s.
pub const NEAR_MISS: f64 = 2.0;

fn footprint_at(state: &VehicleState, limits: &VehicleLimits, t: f64) -> OrientedRect {
    state.footprint(limits).translated(state.velocity() * t)
}

/// Signed separation of the two footprints after `t` seconds of straight
/// driving at constant speed. With headings frozen every axis gap is the
/// absolute value of a linear function of `t`, so this is convex in `t`.
pub fn separation_at(a: &VehicleState, la: &VehicleLimits, b: &VehicleState, lb: &VehicleLimits, t: f64) -> f64 {
    rect_separation(&footprint_at(a, la, t), &footprint_at(b, lb, t))
}

/// Earliest `t` in `[0, TTC_HORIZON]` at which the extrapolated footprints
/// touch, or `f64::INFINITY` if they stay apart.
///
/// The separation is convex in `t`, so a ternary search finds its minimum and
/// a bisection on the decreasing branch before it finds the first contact.
pub fn compute_ttc_2d(a: &VehicleState, la: &VehicleLimits, b: &VehicleState, lb: &VehicleLimits) -> f64 {
    let d = |t: f64| separation_at(a, la, b, lb, t);
    if d(0.0) <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, TTC_HORIZON);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if d(m1) < d(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let t_min = 0.5 * (lo + hi);
    let deepest = [t_min, lo, hi, TTC_HORIZON]
        .into_iter()
        .find(|&t| d(t) <= 0.0);
    let Some(mut hi) = deepest else {
        return f64::INFINITY;
    };
    let mut lo = 0.0;
    while hi - lo > TTC_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if d(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// TTC of the ego against every other vehicle at every recorded step;
/// `series[k][j - 1]` pairs the ego with slot `j` at step `k`.
pub fn ttc_series(trajectory: &Trajectory, scene: &Scene) -> Vec<Vec<f64>> {
    trajectory
        .states
        .iter()
        .map(|s| {
            (1..s.len())
                .map(|j| compute_ttc_2d(&s.vehicles[0], scene.limits(0), &s.vehicles[j], scene.limits(j)))
                .collect()
        })
        .collect()
}

/// Smallest TTC between the ego and any other vehicle over the episode.
/// Episodes ending in a collision, with a vehicle or a wall, score 0.
pub fn min_ttc(trajectory: &Trajectory, scene: &Scene) -> f64 {
    if trajectory.terminal.is_failure()
        || ego_failure(trajectory.last_state(), scene, &trajectory.failure).is_some()
    {
        return 0.0;
    }
    ttc_series(trajectory, scene)
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min)
}

/// Per-episode TTC summary.
#[derive(Debug, Clone, PartialEq)]
pub struct TtcRecord {
    pub series: Vec<Vec<f64>>,
    pub min_ttc: f64,
}

impl TtcRecord {
    pub fn of(trajectory: &Trajectory, scene: &Scene) -> Self {
        Self {
            series: ttc_series(trajectory, scene),
            min_ttc: min_ttc(trajectory, scene),
        }
    }

    pub fn is_near_miss(&self) -> bool {
        self.min_ttc > 0.0 && self.min_ttc <= NEAR_MISS
    }
}
