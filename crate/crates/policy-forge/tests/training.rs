mod common;

use policy_forge::evaluate::rollout_all;
use policy_forge::*;
use proptest::prelude::*;
use sim_core::*;

fn quick() -> TrainConfig {
    TrainConfig {
        population: 4,
        iterations: 2,
        episodes: 2,
        step_budget: 120,
        ..TrainConfig::default()
    }
}

#[test]
fn zero_iterations_returns_the_initial_policy() {
    let scene = common::straight_road(&[]);
    let cfg = TrainConfig { iterations: 0, ..quick() };
    let p = train_policy(&scene, "east", &cfg, 11).unwrap();
    let again = train_policy(&scene, "east", &cfg, 11).unwrap();
    assert_eq!(p, again);
    assert_eq!(p.kind, PolicyKind::Network);
    assert_eq!(p.route.as_deref(), Some("east"));
    assert_eq!(&p.params[..4], &cfg.initial_style.to_array());
    // The output layer starts at zero, so the policy acts exactly like its style prior.
    let scripted = Policy::scripted("prior", cfg.initial_style);
    let inits = common::held_out(&scene, 3, 5);
    let a = rollout_all(&p, &scene, &inits, 100, 1).unwrap();
    let b = rollout_all(&scripted, &scene, &inits, 100, 1).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.states, y.states);
    }
}

#[test]
fn degenerate_reward_keeps_the_first_candidate() {
    let scene = common::straight_road(&[]);
    let cfg = TrainConfig {
        rewards: RewardWeights {
            progress: 0.0,
            collision: 0.0,
            wall: 0.0,
        },
        ..quick()
    };
    let untouched = train_policy(&scene, "east", &TrainConfig { iterations: 0, ..cfg.clone() }, 3).unwrap();
    let trained = train_policy(&scene, "east", &cfg, 3).unwrap();
    assert_eq!(trained.params, untouched.params);
    for opt in [Optimizer::Cem, Optimizer::Es] {
        let t = train_policy(&scene, "east", &TrainConfig { optimizer: opt, ..cfg.clone() }, 3).unwrap();
        assert_eq!(t.params, untouched.params, "{opt:?}");
    }
}

#[test]
fn training_is_deterministic() {
    let scene = scenes::crossing();
    for opt in [Optimizer::Cem, Optimizer::Es] {
        let cfg = TrainConfig { optimizer: opt, ..quick() };
        let a = train_policy(&scene, &scene.ego.route, &cfg, 42).unwrap();
        let b = train_policy(&scene, &scene.ego.route, &cfg, 42).unwrap();
        let bits = |p: &Policy| p.params.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b), "{opt:?}");
        let c = train_policy(&scene, &scene.ego.route, &cfg, 43).unwrap();
        assert_ne!(bits(&a), bits(&c), "{opt:?}");
    }
}

#[test]
fn best_of_run_never_scores_below_the_initial_policy() {
    let scene = scenes::right_turn();
    let cfg = quick();
    let init = train_policy(&scene, &scene.ego.route, &TrainConfig { iterations: 0, ..cfg.clone() }, 9).unwrap();
    let trained = train_policy(&scene, &scene.ego.route, &cfg, 9).unwrap();
    let inits = generate_perturbations(&scene, &cfg.perturbation, cfg.episodes, cfg.perturbation_seed).unwrap();
    let seed = sim_core::seed::mix(9, 1);
    let r0 = train::mean_reward(&init, &scene, &inits, &cfg, seed).unwrap();
    let r1 = train::mean_reward(&trained, &scene, &inits, &cfg, seed).unwrap();
    assert!(r1 >= r0, "{r1} < {r0}");
}

#[test]
fn invalid_configurations_are_rejected() {
    let scene = common::straight_road(&[]);
    let bad = [
        TrainConfig { population: 1, ..quick() },
        TrainConfig {
            rewards: RewardWeights {
                progress: 1.0,
                collision: 0.5,
                wall: -1.0,
            },
            ..quick()
        },
        TrainConfig {
            rewards: RewardWeights {
                progress: -1.0,
                collision: -1.0,
                wall: -1.0,
            },
            ..quick()
        },
        TrainConfig { episodes: 0, ..quick() },
        TrainConfig { elite_fraction: 0.0, ..quick() },
    ];
    for cfg in bad {
        assert!(matches!(
            train_policy(&scene, "east", &cfg, 0),
            Err(ForgeError::InvalidConfig(_))
        ));
    }
    assert!(train_policy(&scene, "nowhere", &quick(), 0).is_err());
}

#[test]
fn collisions_are_penalized_for_both_vehicles() {
    let scene = common::straight_road(&[16.5]);
    let throttle = Policy::constant("throttle", 1.0, 0.0);
    let mut init = scene.nominal_state();
    init.vehicles[0].v = 2.0;
    init.vehicles[1].v = 0.0;
    let w = |collision: f64| RewardWeights {
        progress: 1.0,
        collision,
        wall: -1.0,
    };
    let free = train::episode_reward(&throttle, &scene, &init, &w(0.0), 200, 0.1, 0);
    let hit = train::episode_reward(&throttle, &scene, &init, &w(-2.0), 200, 0.1, 0);
    assert!(free > 0.0 && free < 1.0, "{free}");
    assert!((hit - free + 2.0).abs() < 1e-12, "{hit} vs {free}");

    // Same vehicles without the closing speed: nobody collides and both finish.
    let mut calm = init.clone();
    calm.vehicles[0].v = 0.0;
    let r = train::episode_reward(&throttle, &scene, &calm, &w(-2.0), 200, 0.1, 0);
    assert!((r - 1.0).abs() < 1e-12, "{r}");
}

#[test]
fn trained_single_vehicle_policy_reaches_the_goal() {
    let scene = common::straight_road(&[]);
    let cfg = TrainConfig {
        initial_style: Style { cruise: 1.8, offset: 0.3, horizon: 3.0, margin: 0.3 },
        ..TrainConfig::default()
    };
    let p = train_policy(&scene, "east", &cfg, 2024).unwrap();
    let held_out = common::held_out(&scene, 100, 0xface);
    let report = evaluate_success_rate(&p, &scene, &held_out, 300, 1).unwrap();
    println!("single-vehicle straight road success {}", report.rate);
    assert!(report.rate >= 0.95, "{}", report.rate);
}

fn swapped(scene: &Scene) -> Scene {
    let mut s = scene.clone();
    s.others.swap(0, 1);
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    /// Every vehicle acts from its own observation with shared weights, so
    /// exchanging two vehicles exchanges their trajectories.
    #[test]
    fn swapping_vehicles_mirrors_behavior(pattern in 0u64..1000, weights_seed in 0u64..1000) {
        use rand::SeedableRng;
        let scene = scenes::right_turn();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(weights_seed);
        let mut policy = Policy::network("p", Style::default(), &mut rng);
        // Non-zero output layer so the network itself contributes.
        for (i, x) in policy.params.iter_mut().enumerate().skip(4) {
            if *x == 0.0 {
                *x = 0.01 * ((i * 7919 % 13) as f64 - 6.0);
            }
        }
        let init = generate_perturbations(&scene, &PerturbationSpec::default(), 1, pattern).unwrap().remove(0);
        let mut init_sw = init.clone();
        init_sw.vehicles.swap(1, 2);
        let scene_sw = swapped(&scene);
        let a = rollout_all(&policy, &scene, std::slice::from_ref(&init), 200, 5).unwrap().remove(0);
        let b = rollout_all(&policy, &scene_sw, std::slice::from_ref(&init_sw), 200, 5).unwrap().remove(0);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.states.iter().zip(&b.states) {
            prop_assert_eq!(x.vehicles[0], y.vehicles[0]);
            prop_assert_eq!(x.vehicles[1], y.vehicles[2]);
            prop_assert_eq!(x.vehicles[2], y.vehicles[1]);
        }
    }
}
