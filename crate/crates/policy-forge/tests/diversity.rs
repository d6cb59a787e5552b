mod common;

use policy_forge::diversity::{diversity_matrix, path_distance};
use policy_forge::*;
use proptest::prelude::*;
use sim_core::*;

fn line(n: usize, y: f64) -> Vec<Vec2> {
    (0..n).map(|i| Vec2::new(0.2 * i as f64, y)).collect()
}

#[test]
fn trajectory_distance_cases() {
    assert_eq!(path_distance(&line(50, 0.0), &line(50, 0.0)).unwrap(), 0.0);
    assert!((path_distance(&line(50, 0.0), &line(50, 1.0)).unwrap() - 1.0).abs() < 1e-12);
    // The longer run is truncated to the shorter one.
    let mut long = line(50, 2.0);
    long[35].y = 100.0;
    assert!((path_distance(&line(30, 0.0), &long).unwrap() - 2.0).abs() < 1e-12);
    assert!(matches!(path_distance(&[], &line(3, 0.0)), Err(ForgeError::EmptyTrajectory)));
}

#[test]
fn trajectory_distance_on_real_runs() {
    let scene = common::straight_road(&[]);
    let inits = common::held_out(&scene, 1, 4);
    let a = evaluate::rollout_all(&Policy::scripted("a", Style::default()), &scene, &inits, 100, 0).unwrap();
    assert_eq!(trajectory_distance(&a[0], &a[0], 0).unwrap(), 0.0);
}

#[test]
fn constant_offset_pair_scores_exactly_one() {
    let ids = vec!["a".to_string(), "b".to_string()];
    let scenarios = 7;
    let paths = vec![
        (0..scenarios).map(|s| line(40 + s, 0.0)).collect::<Vec<_>>(),
        (0..scenarios).map(|s| line(50 + s, 1.0)).collect::<Vec<_>>(),
    ];
    let ok = vec![vec![true; scenarios]; 2];
    let m = diversity_matrix(&ids, &paths, &ok).unwrap();
    assert!((m.score() - 1.0).abs() < 1e-12);
    assert_eq!(m.get(0, 1), m.get(1, 0));
    assert_eq!(m.get(0, 0), 0.0);
    assert!(m.empty_pairs.is_empty());
}

#[test]
fn only_common_successes_count() {
    let ids = vec!["a".to_string(), "b".to_string(), "c".to_string()];
    let paths = vec![
        vec![line(10, 0.0), line(10, 0.0)],
        vec![line(10, 1.0), line(10, 5.0)],
        vec![line(10, 3.0), line(10, 3.0)],
    ];
    let flags = vec![vec![true, true], vec![true, false], vec![false, true]];
    let m = diversity_matrix(&ids, &paths, &flags).unwrap();
    assert!((m.get(0, 1) - 1.0).abs() < 1e-12);
    assert!((m.get(0, 2) - 3.0).abs() < 1e-12);
    // b and c never succeed on the same scenario: zero and flagged.
    assert_eq!(m.get(1, 2), 0.0);
    assert_eq!(m.empty_pairs, vec![(1, 2)]);
    assert!((m.score() - (2.0 * 1.0 + 2.0 * 3.0) / 6.0).abs() < 1e-12);
}

#[test]
fn identical_policies_have_zero_diversity() {
    let scene = scenes::crossing();
    let inits = common::held_out(&scene, 6, 8);
    let a = Policy::scripted("a", Style::default());
    let b = Policy::scripted("b", Style::default());
    let m = interpolicy_diversity(&[a.clone(), b], &scene, &inits, 300, 0).unwrap();
    assert_eq!(m.score(), 0.0);
    assert!(m.empty_pairs.is_empty());
    assert!(matches!(
        interpolicy_diversity(&[a], &scene, &inits, 300, 0),
        Err(ForgeError::TooFewPolicies { .. })
    ));
}

#[test]
fn different_styles_are_diverse() {
    let scene = scenes::right_turn();
    let inits = common::held_out(&scene, 6, 8);
    let left = Policy::scripted("left", Style { offset: 0.6, ..Style::default() });
    let right = Policy::scripted("right", Style { offset: -0.6, ..Style::default() });
    let m = interpolicy_diversity(&[left, right], &scene, &inits, 300, 0).unwrap();
    assert!(m.score() > 0.3, "{}", m.score());
}

proptest! {
    #[test]
    fn matrix_is_symmetric_with_zero_diagonal(
        offsets in proptest::collection::vec(-3.0f64..3.0, 2..6),
        lens in proptest::collection::vec(1usize..20, 3),
        mask in proptest::collection::vec(proptest::bool::ANY, 18),
    ) {
        let n = offsets.len();
        let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let paths: Vec<Vec<Vec<Vec2>>> = offsets
            .iter()
            .enumerate()
            .map(|(i, y)| lens.iter().map(|l| line(l + i, *y)).collect())
            .collect();
        let flags: Vec<Vec<bool>> = (0..n).map(|i| (0..3).map(|s| mask[i * 3 + s]).collect()).collect();
        let m = diversity_matrix(&ids, &paths, &flags).unwrap();
        for i in 0..n {
            prop_assert_eq!(m.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
                prop_assert!(m.get(i, j) >= 0.0);
                if i != j && offsets[i] == offsets[j] {
                    prop_assert_eq!(m.get(i, j), 0.0);
                }
            }
        }
    }
}
