//! Built-in four-way intersection scenes with left-hand traffic.
//!
//! The intersection is centered at the origin; both roads are 7 m wide
//! (two 3.5 m lanes) and their arms reach 30 m out. Vehicles keep left, so
//! northbound traffic uses `x = -1.75`, southbound `x = +1.75`, westbound
//! `y = -1.75` and eastbound `y = +1.75`. The ego drives north through the
//! intersection behind a leading `car1`; `car2` is the interacting vehicle.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::geometry::{OrientedRect, Segment, Vec2};
use crate::map::{MapGeometry, Polyline};
use crate::scene::{Scene, VehicleSpec};
use crate::vehicle::VehicleLimits;

pub const LANE_WIDTH: f64 = 3.5;
pub const ARM_LENGTH: f64 = 30.0;
const HALF_LANE: f64 = LANE_WIDTH / 2.0;

pub const RIGHT_TURN: &str = "right-turn";
pub const CROSSING: &str = "crossing";

/// Walls of the intersection: an L-shaped curb at each corner and a cap
/// across the end of each arm.
pub fn intersection_walls() -> Vec<Segment> {
    let (w, a) = (LANE_WIDTH, ARM_LENGTH);
    let mut walls = Vec::with_capacity(12);
    for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
        let corner = Vec2::new(sx * w, sy * w);
        walls.push(Segment::new(Vec2::new(sx * w, sy * a), corner));
        walls.push(Segment::new(corner, Vec2::new(sx * a, sy * w)));
    }
    walls.push(Segment::new(Vec2::new(-w, a), Vec2::new(w, a)));
    walls.push(Segment::new(Vec2::new(-w, -a), Vec2::new(w, -a)));
    walls.push(Segment::new(Vec2::new(a, -w), Vec2::new(a, w)));
    walls.push(Segment::new(Vec2::new(-a, -w), Vec2::new(-a, w)));
    walls
}

/// Points along a circular arc, endpoints included.
pub fn arc_points(center: Vec2, radius: f64, from: f64, to: f64, pieces: usize) -> Vec<Vec2> {
    (0..=pieces)
        .map(|i| {
            let t = from + (to - from) * i as f64 / pieces as f64;
            center + Vec2::from_angle(t) * radius
        })
        .collect()
}

fn line(points: &[(f64, f64)]) -> Polyline {
    Polyline::new(points.iter().map(|&(x, y)| Vec2::new(x, y)).collect()).expect("valid route")
}

/// Named routes shared by the built-in scenes and fixtures.
pub fn intersection_routes() -> BTreeMap<String, Polyline> {
    let a = ARM_LENGTH;
    let mut routes = BTreeMap::new();
    routes.insert("north".into(), line(&[(-HALF_LANE, -a), (-HALF_LANE, a)]));
    routes.insert("west".into(), line(&[(a, -HALF_LANE), (-a, -HALF_LANE)]));
    routes.insert("east".into(), line(&[(-a, HALF_LANE), (a, HALF_LANE)]));
    routes.insert("south".into(), line(&[(HALF_LANE, a), (HALF_LANE, -a)]));

    // Southbound, turning right across the northbound lane into the westbound lane.
    let r = LANE_WIDTH + HALF_LANE;
    let mut pts = vec![Vec2::new(HALF_LANE, a)];
    pts.extend(arc_points(Vec2::new(-LANE_WIDTH, LANE_WIDTH), r, 0.0, -FRAC_PI_2, 16));
    pts.push(Vec2::new(-a, -HALF_LANE));
    routes.insert("south-right".into(), Polyline::new(pts).expect("valid route"));

    // Northbound, turning left (the tight turn) into the westbound lane.
    let r = 4.0;
    let c = Vec2::new(-HALF_LANE - r, -HALF_LANE - r);
    let mut pts = vec![Vec2::new(-HALF_LANE, -a)];
    pts.extend(arc_points(c, r, 0.0, FRAC_PI_2, 12));
    pts.push(Vec2::new(-a, -HALF_LANE));
    routes.insert("north-left".into(), Polyline::new(pts).expect("valid route"));
    routes
}

pub fn intersection_map() -> MapGeometry {
    MapGeometry {
        walls: intersection_walls(),
        routes: intersection_routes(),
        goal_region: OrientedRect::from_bounds(Vec2::new(-LANE_WIDTH, 10.0), Vec2::new(0.0, 16.0)),
        bounds_min: Vec2::new(-ARM_LENGTH, -ARM_LENGTH),
        bounds_max: Vec2::new(ARM_LENGTH, ARM_LENGTH),
    }
}

fn spec(name: &str, route: &str, start_s: f64, start_speed: f64, goal_s: f64) -> VehicleSpec {
    VehicleSpec {
        name: name.into(),
        route: route.into(),
        limits: VehicleLimits::default(),
        start_s,
        start_offset: 0.0,
        start_speed,
        goal_s,
    }
}

/// Ego northbound from `y = -18`, `car1` leading 8 m ahead on the same lane.
fn base(id: &str, car2: VehicleSpec) -> Scene {
    Scene {
        id: id.into(),
        map: intersection_map(),
        ego: spec("ego", "north", 12.0, 1.0, 43.0),
        others: vec![spec("car1", "north", 20.0, 1.0, 56.0), car2],
    }
}

/// Oncoming `car2` turns right across the ego's path.
pub fn right_turn() -> Scene {
    base(RIGHT_TURN, spec("car2", "south-right", 16.0, 1.0, 48.0))
}

/// `car2` crosses from the right along the westbound lane.
pub fn crossing() -> Scene {
    base(CROSSING, spec("car2", "west", 14.0, 1.0, 52.0))
}

pub fn builtin(id: &str) -> Option<Scene> {
    match id {
        RIGHT_TURN => Some(right_turn()),
        CROSSING => Some(crossing()),
        _ => None,
    }
}

pub fn builtin_scenes() -> Vec<Scene> {
    vec![right_turn(), crossing()]
}

/// Heading of a northbound vehicle.
pub const NORTH: f64 = FRAC_PI_2;
/// Heading of a westbound vehicle.
pub const WEST: f64 = PI;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_scenes_validate() {
        for scene in builtin_scenes() {
            scene.validate().unwrap();
            assert_eq!(scene.map.walls.len(), 12);
        }
    }

    #[test]
    fn right_turner_crosses_ego_route() {
        let scene = right_turn();
        let ego = scene.route(0);
        let car2 = scene.route(2);
        assert!(ego.segments().any(|a| car2.segments().any(|b| a.intersects(&b))));
    }

    #[test]
    fn leader_shares_ego_route_further_ahead() {
        let scene = crossing();
        assert_eq!(scene.ego.route, scene.others[0].route);
        assert!(scene.others[0].start_s > scene.ego.start_s);
    }

    #[test]
    fn turning_radius_is_feasible() {
        let l = VehicleLimits::default();
        let beta = (0.5 * l.phi_steer_max.tan()).atan();
        let r_min = 0.5 * l.wheelbase / beta.sin();
        assert!(r_min < LANE_WIDTH + HALF_LANE);
        assert!(r_min < 4.0);
    }
}
