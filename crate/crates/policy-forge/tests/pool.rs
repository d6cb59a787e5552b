use policy_forge::*;
use sim_core::scenes;

fn tiny() -> PoolConfig {
    PoolConfig {
        families: 4,
        anchor_variants: 3,
        eval_count: 12,
        train: TrainConfig {
            population: 4,
            iterations: 1,
            episodes: 2,
            ..TrainConfig::default()
        },
        ..PoolConfig::default()
    }
}

#[test]
fn pool_is_deterministic_and_sets_behave() {
    let scene = scenes::crossing();
    let a = build_pool(&scene, &tiny(), 5).unwrap();
    let b = build_pool(&scene, &tiny(), 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.policies.len(), 7);
    assert!(a.success.iter().all(|s| (0.0..=1.0).contains(s)));
    for i in 0..7 {
        assert_eq!(a.diversity.get(i, i), 0.0);
        for j in 0..7 {
            assert_eq!(a.diversity.get(i, j), a.diversity.get(j, i));
        }
    }

    let anchor = a.anchor(0.9).expect("a qualifying policy");
    let anchor_id = a.policies[anchor].id.clone();
    let less = a.select_less_diverse("less", &anchor_id, 3, 0.9).unwrap();
    assert_eq!(less.policies[0].id, anchor_id);
    let diverse = a.select_diverse("diverse", 3, 0.9).unwrap();
    assert!(diverse.score() > less.score(), "{} vs {}", diverse.score(), less.score());
    assert!(diverse.min_success() >= 0.9 && less.min_success() >= 0.9);
    assert!(matches!(
        a.select_less_diverse("x", "missing", 2, 0.9),
        Err(ForgeError::UnknownPolicy(_))
    ));
}

#[test]
fn evaluation_seed_must_differ_from_training() {
    let mut cfg = tiny();
    cfg.eval_seed = cfg.train.perturbation_seed;
    assert!(matches!(
        build_pool(&scenes::crossing(), &cfg, 1),
        Err(ForgeError::InvalidConfig(_))
    ));
}
