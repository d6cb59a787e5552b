//! Constructed failure cases with known avoidability.
//!
//! * stopped-leader: the planner loses a leader stopped mid-turn from its
//!   attention fan; a wider fan avoids it (A-P).
//! * swerve-only: a faster car approaches from behind, offset to the right,
//!   and clips the ego's rear corner. Braking only brings the contact closer
//!   and the planner never leaves its lane, so no parameters help, but a
//!   small swerve to the left clears it (A-G).
//! * zero-gap ram: a fast car is a fraction of a metre from the stopped ego's
//!   nose and keeps coming; nothing within the ego's limits escapes (U).

use std::collections::BTreeMap;
use std::sync::Arc;

use planner_idm::{IdmPlanner, PlannerParams};
use sim_core::geometry::{OrientedRect, Segment, Vec2};
use sim_core::map::{MapGeometry, Polyline};
use sim_core::tracking::pure_pursuit;
use sim_core::{
    Action, Context, Controller, EndPredicate, FailurePredicate, Scenario, Scene, SimConfig, Simulator,
    VehicleLimits, VehicleSpec,
};

use crate::rewind::FailureCase;
use crate::CounterfactualError;

pub const STOPPED_LEADER: &str = "stopped-leader";
pub const SWERVE_ONLY: &str = "swerve-only";
pub const ZERO_GAP_RAM: &str = "zero-gap-ram";

/// A scene, its scenario and the policies of the other vehicles.
pub struct CaseFixture {
    pub scene: Scene,
    pub scenario: Scenario,
    pub policies: BTreeMap<String, Arc<dyn Controller>>,
    pub params: PlannerParams,
}

impl CaseFixture {
    /// Runs the planner under test and records the resulting failure case.
    pub fn record(&self, rng_seed: u64) -> Result<FailureCase, CounterfactualError> {
        let config = SimConfig { dt: 0.1, rng_seed };
        let sim = Simulator::new(&self.scene, &self.policies, config);
        let trajectory = sim.run(&IdmPlanner::new(self.params), &self.scenario, None)?;
        FailureCase::new(
            format!("{}-{rng_seed:016x}", self.scene.id),
            self.scene.id.clone(),
            self.scenario.policy_assignment.join("+"),
            trajectory,
            self.params,
        )
    }
}

/// Scripted vehicle holding `speed` along its route.
#[derive(Debug, Clone, Copy)]
pub struct Cruise {
    pub speed: f64,
}

impl Controller for Cruise {
    fn act(&self, ctx: &Context<'_>, slot: usize, _seed: u64) -> Action {
        let me = &ctx.state.vehicles[slot];
        let limits = ctx.scene.limits(slot);
        let alpha = ((self.speed - me.v) / ctx.dt).clamp(limits.a_min, limits.a_max);
        Action::new(alpha, pure_pursuit(me, ctx.scene.route(slot), 3.0, 0.0, limits))
    }
}

const ROAD_HALF_WIDTH: f64 = 7.0;
const ROAD_END: f64 = 60.0;

fn northbound(x: f64) -> Polyline {
    Polyline::new(vec![Vec2::new(x, -ROAD_END), Vec2::new(x, ROAD_END)]).expect("valid route")
}

fn southbound(x: f64) -> Polyline {
    Polyline::new(vec![Vec2::new(x, ROAD_END), Vec2::new(x, -ROAD_END)]).expect("valid route")
}

/// A straight 14 m wide road running north, walled on both sides and at the ends.
fn straight_road(routes: BTreeMap<String, Polyline>) -> MapGeometry {
    let (w, e) = (ROAD_HALF_WIDTH, ROAD_END);
    MapGeometry {
        walls: vec![
            Segment::new(Vec2::new(-w, -e), Vec2::new(-w, e)),
            Segment::new(Vec2::new(w, -e), Vec2::new(w, e)),
            Segment::new(Vec2::new(-w, e), Vec2::new(w, e)),
            Segment::new(Vec2::new(-w, -e), Vec2::new(w, -e)),
        ],
        routes,
        goal_region: OrientedRect::from_bounds(Vec2::new(-w, 40.0), Vec2::new(w, 46.0)),
        bounds_min: Vec2::new(-w, -e),
        bounds_max: Vec2::new(w, e),
    }
}

fn spec(name: &str, route: &str, start_s: f64, start_speed: f64, limits: VehicleLimits) -> VehicleSpec {
    VehicleSpec {
        name: name.into(),
        route: route.into(),
        limits,
        start_s,
        start_offset: 0.0,
        start_speed,
        goal_s: 2.0 * ROAD_END,
    }
}

fn fast_limits(v_max: f64) -> VehicleLimits {
    VehicleLimits {
        v_max,
        a_max: 2.0,
        ..VehicleLimits::default()
    }
}

fn scripted(scene: Scene, policy: &str, controller: Arc<dyn Controller>, step_budget: usize) -> CaseFixture {
    let scenario = Scenario {
        policy_assignment: vec![policy.into()],
        initial_state: scene.nominal_state(),
        failure: FailurePredicate::default(),
        end: EndPredicate {
            goal_reached: true,
            step_budget,
        },
    };
    let mut policies = BTreeMap::new();
    policies.insert(policy.to_string(), controller);
    CaseFixture {
        scene,
        scenario,
        policies,
        params: PlannerParams::default(),
    }
}

pub fn stopped_leader() -> CaseFixture {
    let f = planner_idm::fixtures::stopped_leader();
    CaseFixture {
        scene: f.scene,
        scenario: f.scenario,
        policies: f.policies,
        params: PlannerParams::default(),
    }
}

/// Lateral offset of the chasing car's lane from the ego's.
pub const SWERVE_OFFSET: f64 = 1.45;
pub const SWERVE_CHASER_SPEED: f64 = 3.0;

pub fn swerve_only() -> CaseFixture {
    let mut routes = BTreeMap::new();
    routes.insert("ego".to_string(), northbound(-1.75));
    routes.insert("chaser".to_string(), northbound(-1.75 + SWERVE_OFFSET));
    let scene = Scene {
        id: SWERVE_ONLY.into(),
        map: straight_road(routes),
        ego: spec("ego", "ego", 30.0, 2.0, VehicleLimits::default()),
        others: vec![spec("chaser", "chaser", 20.0, SWERVE_CHASER_SPEED, fast_limits(SWERVE_CHASER_SPEED))],
    };
    scripted(
        scene,
        "chaser",
        Arc::new(Cruise {
            speed: SWERVE_CHASER_SPEED,
        }),
        160,
    )
}

pub const RAM_SPEED: f64 = 4.0;
/// Initial distance between the two front bumpers, m.
pub const RAM_GAP: f64 = 0.3;

pub fn zero_gap_ram() -> CaseFixture {
    let mut routes = BTreeMap::new();
    routes.insert("ego".to_string(), northbound(-1.75));
    routes.insert("rammer".to_string(), southbound(-1.75));
    let ego_s = 40.0;
    let length = VehicleLimits::default().length;
    let rammer_s = 2.0 * ROAD_END - (ego_s + length + RAM_GAP);
    let scene = Scene {
        id: ZERO_GAP_RAM.into(),
        map: straight_road(routes),
        ego: spec("ego", "ego", ego_s, 0.0, VehicleLimits::default()),
        others: vec![spec("rammer", "rammer", rammer_s, RAM_SPEED, fast_limits(RAM_SPEED))],
    };
    scripted(scene, "rammer", Arc::new(Cruise { speed: RAM_SPEED }), 160)
}

pub fn all() -> Vec<CaseFixture> {
    vec![stopped_leader(), swerve_only(), zero_gap_ram()]
}
