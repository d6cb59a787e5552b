#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use sim_core::*;

/// Straight two-lane road along +x from -50 to 150 with walls at y = +-3.5.
/// `others` holds `(start position along x, start speed)` per other vehicle.
pub fn straight_road(others: Vec<(f64, f64)>) -> Scene {
    let mut routes = BTreeMap::new();
    routes.insert(
        "east".to_string(),
        Polyline::new(vec![Vec2::new(-50.0, -1.75), Vec2::new(150.0, -1.75)]).unwrap(),
    );
    let map = MapGeometry {
        walls: vec![
            Segment::new(Vec2::new(-50.0, -3.5), Vec2::new(150.0, -3.5)),
            Segment::new(Vec2::new(-50.0, 3.5), Vec2::new(150.0, 3.5)),
        ],
        routes,
        goal_region: OrientedRect::from_bounds(Vec2::new(100.0, -3.5), Vec2::new(110.0, 0.0)),
        bounds_min: Vec2::new(-50.0, -3.5),
        bounds_max: Vec2::new(150.0, 3.5),
    };
    let spec = |name: &str, s: f64, v: f64| VehicleSpec {
        name: name.into(),
        route: "east".into(),
        limits: VehicleLimits::default(),
        start_s: s + 50.0,
        start_offset: 0.0,
        start_speed: v,
        goal_s: 155.0,
    };
    Scene {
        id: "straight".into(),
        map,
        ego: spec("ego", 0.0, 0.0),
        others: others
            .into_iter()
            .enumerate()
            .map(|(i, (s, v))| spec(&format!("car{}", i + 1), s, v))
            .collect(),
    }
}

pub fn constant(alpha: f64, phi: f64) -> Arc<dyn Controller> {
    Arc::new(move |_: &Context<'_>, _: usize, _: u64| Action::new(alpha, phi))
}

pub fn registry(entries: &[(&str, Arc<dyn Controller>)]) -> BTreeMap<String, Arc<dyn Controller>> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

pub fn scenario(scene: &Scene, assignment: &[&str], budget: usize) -> Scenario {
    Scenario {
        policy_assignment: assignment.iter().map(|s| s.to_string()).collect(),
        initial_state: scene.nominal_state(),
        failure: FailurePredicate::default(),
        end: EndPredicate {
            goal_reached: true,
            step_budget: budget,
        },
    }
}

/// Random-action controller driven only by the per-step seed.
pub fn seeded_random() -> Arc<dyn Controller> {
    Arc::new(|_: &Context<'_>, _: usize, seed: u64| {
        let a = (seed >> 11) as f64 / (1u64 << 53) as f64;
        let b = (seed.rotate_left(17) >> 11) as f64 / (1u64 << 53) as f64;
        Action::new(2.0 * a - 1.0, 0.2 * (2.0 * b - 1.0))
    })
}
