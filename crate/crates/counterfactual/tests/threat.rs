use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use counterfactual::toy::{GridWorld, Move};
use counterfactual::{estimate_threat, Horizon, SimEnv, ThreatModel};
use proptest::prelude::*;
use sim_core::{
    Action, Controller, EndPredicate, FailurePredicate, Scenario, Scene, SimConfig, SimState, VehicleState,
};

fn model(rollouts: usize, horizon: usize) -> ThreatModel {
    ThreatModel {
        rollouts,
        horizon: Horizon::Steps(horizon),
        ..ThreatModel::default()
    }
}

const TOY_HORIZON: usize = 4;

#[test]
fn toy_world_estimates_lie_within_three_sigma_of_enumeration() {
    let world = GridWorld::default();
    let mut checked = 0;
    for n in [8, 64, 512] {
        let m = model(n, TOY_HORIZON);
        for cell in world.cells() {
            for action in Move::ALL {
                let exact = world.exact_threat(cell, action, m.horizon);
                let est = estimate_threat(&world, &cell, action, &m, 0x5eed);
                let sigma = (exact * (1.0 - exact) / n as f64).sqrt();
                assert!(
                    (est - exact).abs() <= 3.0 * sigma + 1e-12,
                    "cell {cell:?} action {action:?} n {n}: estimate {est}, exact {exact}, sigma {sigma}"
                );
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 3 * 6 * 5);
}

#[test]
fn toy_world_enumeration_has_nontrivial_values() {
    let world = GridWorld::default();
    let h = Horizon::Steps(TOY_HORIZON);
    assert_eq!(world.exact_threat((0, 1), Move::East, h), 1.0);
    assert_eq!(world.exact_threat((2, 1), Move::North, h), 0.0);
    let p = world.exact_threat((0, 0), Move::Stay, h);
    assert!(p > 0.2 && p < 0.8, "{p}");
}

fn spread(values: &[f64]) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

#[test]
fn standard_error_shrinks_with_root_rollouts() {
    let world = GridWorld::default();
    let (cell, action) = ((0, 0), Move::Stay);
    let exact = world.exact_threat(cell, action, Horizon::Steps(TOY_HORIZON));
    let se: Vec<f64> = [8, 64, 512]
        .iter()
        .map(|&n| {
            let m = model(n, TOY_HORIZON);
            let estimates: Vec<f64> = (0..300u64)
                .map(|s| estimate_threat(&world, &cell, action, &m, s))
                .collect();
            spread(&estimates)
        })
        .collect();
    for (w, n) in se.windows(2).zip([8.0f64, 64.0]) {
        let ratio = w[0] / w[1];
        let expected = 8f64.sqrt();
        assert!(
            ratio > expected / 2.0 && ratio < expected * 2.0,
            "standard errors {se:?} at rollouts {n} and {}",
            n * 8.0
        );
    }
    let analytic = (exact * (1.0 - exact) / 8.0).sqrt();
    assert!((se[0] / analytic - 1.0).abs() < 0.5, "se {} vs binomial {analytic}", se[0]);
}

#[test]
fn estimates_are_seed_deterministic() {
    let world = GridWorld::default();
    let m = model(64, TOY_HORIZON);
    let a = estimate_threat(&world, &(0, 0), Move::North, &m, 9);
    let b = estimate_threat(&world, &(0, 0), Move::North, &m, 9);
    assert_eq!(a.to_bits(), b.to_bits());
}

proptest! {
    #[test]
    fn estimates_are_probabilities(x in 0i32..3, y in 0i32..3, a in 0usize..5, n in 1usize..40, h in 1usize..8, seed: u64) {
        let world = GridWorld::default();
        let p = estimate_threat(&world, &(x, y), Move::ALL[a], &model(n, h), seed);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((p * n as f64 - (p * n as f64).round()).abs() < 1e-9);
    }
}

fn open_road() -> Scene {
    let mut scene = counterfactual::fixtures::zero_gap_ram().scene;
    scene.others.clear();
    scene
}

fn lone_scenario(state: SimState) -> Scenario {
    Scenario {
        policy_assignment: vec![],
        initial_state: state,
        failure: FailurePredicate::default(),
        end: EndPredicate {
            goal_reached: false,
            step_budget: 300,
        },
    }
}

#[test]
fn unreachable_failure_has_zero_threat() {
    let scene = open_road();
    let none: BTreeMap<String, Arc<dyn Controller>> = BTreeMap::new();
    let state = SimState::new(0, vec![VehicleState::new(0.0, 0.0, 1.0, FRAC_PI_2)]);
    let scenario = lone_scenario(state.clone());
    let env = SimEnv::new(&scene, &none, SimConfig::default(), &scenario).unwrap();
    let m = ThreatModel::default();
    let Horizon::Steps(h) = m.horizon else { unreachable!() };
    let reach = h as f64 * 0.1 * scene.ego.limits.v_max + scene.ego.limits.bounding_radius();
    let wall_distance = scene
        .map
        .walls
        .iter()
        .map(|w| w.closest_point(state.ego().position()).0.distance(state.ego().position()))
        .fold(f64::INFINITY, f64::min);
    assert!(wall_distance > reach, "fixture must keep walls out of reach");
    for seed in 0..20 {
        for a in [Action::new(1.0, 0.6), Action::new(-1.0, -0.6), Action::IDLE] {
            assert_eq!(estimate_threat(&env, &state, a, &m, seed), 0.0);
        }
    }
}

#[test]
fn immediate_wall_contact_has_unit_threat() {
    let scene = open_road();
    let none: BTreeMap<String, Arc<dyn Controller>> = BTreeMap::new();
    let length = scene.ego.limits.length;
    // Front bumper 0.05 m short of the north end wall, driving at it at full speed.
    let state = SimState::new(0, vec![VehicleState::new(-1.75, 60.0 - length / 2.0 - 0.05, 2.0, FRAC_PI_2)]);
    let scenario = lone_scenario(state.clone());
    let env = SimEnv::new(&scene, &none, SimConfig::default(), &scenario).unwrap();
    for seed in 0..20 {
        for a in [Action::new(1.0, 0.0), Action::new(-1.0, 0.6), Action::new(0.0, -0.6)] {
            assert_eq!(estimate_threat(&env, &state, a, &ThreatModel::default(), seed), 1.0);
        }
    }
}

#[test]
fn zero_rollouts_or_horizon_are_rejected() {
    assert!(model(0, 5).validate().is_err());
    assert!(model(1, 0).validate().is_err());
    assert!(ThreatModel::default().validate().is_ok());
}
