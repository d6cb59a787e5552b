#![allow(dead_code)]

use std::collections::BTreeMap;

use sim_core::*;

/// Straight eastbound lane from x = 0 to 80 with walls at y = 0 and y = -3.5,
/// goal x in [40, 46]. `others` are start arc lengths of vehicles ahead.
pub fn straight_road(others: &[f64]) -> Scene {
    let mut routes = BTreeMap::new();
    routes.insert(
        "east".to_string(),
        Polyline::new(vec![Vec2::new(0.0, -1.75), Vec2::new(80.0, -1.75)]).unwrap(),
    );
    let map = MapGeometry {
        walls: vec![
            Segment::new(Vec2::new(0.0, -3.5), Vec2::new(80.0, -3.5)),
            Segment::new(Vec2::new(0.0, 0.0), Vec2::new(80.0, 0.0)),
        ],
        routes,
        goal_region: OrientedRect::from_bounds(Vec2::new(40.0, -3.5), Vec2::new(46.0, 0.0)),
        bounds_min: Vec2::new(0.0, -3.5),
        bounds_max: Vec2::new(80.0, 0.0),
    };
    let spec = |name: String, s: f64| VehicleSpec {
        name,
        route: "east".into(),
        limits: VehicleLimits::default(),
        start_s: s,
        start_offset: 0.0,
        start_speed: 0.5,
        goal_s: 46.0,
    };
    Scene {
        id: "straight".into(),
        map,
        ego: spec("ego".into(), 12.0),
        others: others
            .iter()
            .enumerate()
            .map(|(i, s)| spec(format!("car{}", i + 1), *s))
            .collect(),
    }
}

pub fn held_out(scene: &Scene, count: usize, seed: u64) -> Vec<SimState> {
    generate_perturbations(scene, &PerturbationSpec::default(), count, seed).unwrap()
}
