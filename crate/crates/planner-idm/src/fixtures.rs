//! Frozen regression fixture for the attention-fan weakness: a leading
//! vehicle stops halfway through a tight left turn, its center drifts out of
//! the narrow fan the planner assigns to non-approaching vehicles, and the
//! planner drives into its rear.

use std::collections::BTreeMap;
use std::sync::Arc;

use sim_core::scenes::{intersection_map, NORTH};
use sim_core::tracking::pure_pursuit;
use sim_core::{Action, Context, Controller, EndPredicate, FailurePredicate, Scenario, Scene, VehicleLimits, VehicleSpec};

/// Scripted leader: tracks its route at `cruise` m/s, slows to `crawl` m/s
/// during steps `[slow_from, slow_until)` and then drives on.
#[derive(Debug, Clone, Copy)]
pub struct StopAndGo {
    pub cruise: f64,
    pub crawl: f64,
    pub slow_from: usize,
    pub slow_until: usize,
}

impl Controller for StopAndGo {
    fn act(&self, ctx: &Context<'_>, slot: usize, _seed: u64) -> Action {
        let me = &ctx.state.vehicles[slot];
        let limits = ctx.scene.limits(slot);
        let k = ctx.state.step_index;
        let target = if (self.slow_from..self.slow_until).contains(&k) {
            self.crawl
        } else {
            self.cruise
        };
        let alpha = ((target - me.v) / ctx.dt).clamp(limits.a_min, limits.a_max);
        Action::new(alpha, pure_pursuit(me, ctx.scene.route(slot), 3.0, 0.0, limits))
    }
}

pub const LEADER_POLICY: &str = "stop-and-go";

pub struct Fixture {
    pub scene: Scene,
    pub scenario: Scenario,
    pub policies: BTreeMap<String, Arc<dyn Controller>>,
}

pub fn stopped_leader_scene() -> Scene {
    let spec = |name: &str, route: &str, s: f64, v: f64, goal: f64| VehicleSpec {
        name: name.into(),
        route: route.into(),
        limits: VehicleLimits::default(),
        start_s: s,
        start_offset: 0.0,
        start_speed: v,
        goal_s: goal,
    };
    Scene {
        id: "stopped-leader".into(),
        map: intersection_map(),
        ego: spec("ego", "north", 12.0, 1.0, 43.0),
        others: vec![spec("car1", "north-left", 19.0, 1.0, 54.0)],
    }
}

pub fn stopped_leader() -> Fixture {
    let scene = stopped_leader_scene();
    let scenario = Scenario {
        policy_assignment: vec![LEADER_POLICY.into()],
        initial_state: scene.nominal_state(),
        failure: FailurePredicate::default(),
        end: EndPredicate::default(),
    };
    let mut policies: BTreeMap<String, Arc<dyn Controller>> = BTreeMap::new();
    policies.insert(
        LEADER_POLICY.into(),
        Arc::new(StopAndGo {
            cruise: 1.2,
            crawl: 0.3,
            slow_from: 45,
            slow_until: 150,
        }),
    );
    debug_assert!((scene.nominal_state().ego().h - NORTH).abs() < 1e-12);
    Fixture {
        scene,
        scenario,
        policies,
    }
}
