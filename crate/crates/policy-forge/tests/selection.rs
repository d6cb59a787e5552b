use policy_forge::diversity::{subset_score, DiversityMatrix};
use policy_forge::select::{default_anchor, select_diverse, select_less_diverse};
use policy_forge::ForgeError;
use proptest::prelude::*;

fn from_points(points: &[(f64, f64)]) -> DiversityMatrix {
    let n = points.len();
    DiversityMatrix {
        ids: (0..n).map(|i| format!("p{i:02}")).collect(),
        values: points
            .iter()
            .map(|a| points.iter().map(|b| (a.0 - b.0).hypot(a.1 - b.1)).collect())
            .collect(),
        empty_pairs: vec![],
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

fn exhaustive_best(m: &DiversityMatrix, pool: &[usize], k: usize) -> f64 {
    combinations(pool.len(), k)
        .into_iter()
        .map(|c| subset_score(&m.values, &c.iter().map(|&i| pool[i]).collect::<Vec<_>>()))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

#[test]
fn greedy_matches_exhaustive_search_on_fixture() {
    let m = from_points(&[(0.0, 0.0), (10.0, 0.0), (5.0, 8.0), (5.0, 2.0), (4.0, 1.0), (6.0, 1.0)]);
    let success = [1.0; 6];
    let sel = select_diverse(&m, &success, 3, 0.9).unwrap();
    let best = combinations(6, 3)
        .into_iter()
        .max_by(|a, b| subset_score(&m.values, a).total_cmp(&subset_score(&m.values, b)))
        .unwrap();
    assert_eq!(sorted(sel.members.clone()), sorted(best.clone()));
    assert_eq!(sel.members[..2], [0, 1]);
    assert!((sel.score - subset_score(&m.values, &best)).abs() < 1e-12);
}

#[test]
fn greedy_respects_min_success() {
    let m = from_points(&[(0.0, 0.0), (10.0, 0.0), (5.0, 8.0), (5.0, 2.0)]);
    let success = [0.95, 0.5, 0.9, 1.0];
    let sel = select_diverse(&m, &success, 3, 0.9).unwrap();
    assert_eq!(sorted(sel.members), vec![0, 2, 3]);
    assert!(matches!(
        select_diverse(&m, &[0.1; 4], 1, 0.9),
        Err(ForgeError::TooFewPolicies { need: 1, have: 0 })
    ));
    assert!(matches!(select_diverse(&m, &success, 4, 0.9), Err(ForgeError::TooFewPolicies { .. })));
    assert!(select_diverse(&m, &success, 0, 0.9).is_err());
}

#[test]
fn k_equal_to_qualifying_count_takes_everything() {
    let m = from_points(&[(0.0, 0.0), (1.0, 0.0), (0.0, 3.0), (2.0, 2.0), (9.0, 9.0)]);
    let success = [1.0, 1.0, 0.2, 0.95, 0.9];
    let sel = select_diverse(&m, &success, 4, 0.9).unwrap();
    assert_eq!(sorted(sel.members), vec![0, 1, 3, 4]);
}

#[test]
fn seed_pair_ties_go_to_lowest_ids() {
    // Unit square: both diagonals are the longest pair.
    let m = from_points(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    let sel = select_diverse(&m, &[1.0; 4], 2, 0.9).unwrap();
    assert_eq!(sel.members, vec![0, 2]);
    let one = select_diverse(&m, &[1.0; 4], 1, 0.9).unwrap();
    assert_eq!(one.members, vec![0]);
    assert_eq!(one.score, 0.0);
}

#[test]
fn duplicate_would_win_the_plain_greedy_step() {
    // a-b far apart, c close to both; a' duplicates a. Summed distance to {a, b}
    // is 10 for a' but 2 for c, yet the duplicate adds nothing diverse.
    let mut m = from_points(&[(0.0, 0.0), (10.0, 0.0), (5.0, 0.1), (0.0, 0.0)]);
    m.ids[3] = "p00-copy".into();
    let sel = select_diverse(&m, &[1.0; 4], 3, 0.9).unwrap();
    assert_eq!(sorted(sel.members), vec![0, 1, 2]);
    // With nothing else left the duplicate is taken.
    let all = select_diverse(&m, &[1.0; 4], 4, 0.9).unwrap();
    assert_eq!(sorted(all.members), vec![0, 1, 2, 3]);
}

#[test]
fn less_diverse_cases() {
    let m = from_points(&[(0.0, 0.0), (0.1, 0.0), (5.0, 0.0), (1.0, 1.0), (3.0, 0.0), (0.5, 0.0)]);
    let success = [1.0; 6];
    let one = select_less_diverse(&m, &success, 2, 1, 0.9).unwrap();
    assert_eq!(one.members, vec![2]);
    let two = select_less_diverse(&m, &success, 0, 2, 0.9).unwrap();
    assert_eq!(two.members, vec![0, 1]);
    // Brute force: the k-1 others minimizing the summed distance to the anchor.
    for anchor in 0..6 {
        let sel = select_less_diverse(&m, &success, anchor, 3, 0.9).unwrap();
        let others: Vec<usize> = (0..6).filter(|&i| i != anchor).collect();
        let best = combinations(5, 2)
            .into_iter()
            .map(|c| c.iter().map(|&i| m.get(anchor, others[i])).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let got: f64 = sel.members[1..].iter().map(|&i| m.get(anchor, i)).sum();
        assert_eq!(sel.members[0], anchor);
        assert!((got - best).abs() < 1e-12);
    }
    let mut weak = success;
    weak[0] = 0.5;
    assert!(select_less_diverse(&m, &weak, 0, 2, 0.9).is_err());
    assert!(select_less_diverse(&m, &weak, 1, 6, 0.9).is_err());
}

#[test]
fn anchor_is_best_qualifying_lowest_id() {
    let ids: Vec<String> = ["c", "a", "b", "d"].iter().map(|s| s.to_string()).collect();
    assert_eq!(default_anchor(&ids, &[0.95, 0.97, 0.97, 0.5], 0.9), Some(1));
    assert_eq!(default_anchor(&ids, &[0.1; 4], 0.9), None);
}

#[test]
fn greedy_can_miss_the_optimum() {
    let m = from_points(&[(0.0, 2.967), (9.057, 1.407), (6.076, 9.059), (9.141, 5.342)]);
    let sel = select_diverse(&m, &[1.0; 4], 3, 0.9).unwrap();
    let best = exhaustive_best(&m, &[0, 1, 2, 3], 3);
    assert!(sel.score < 0.9 * best, "{} vs {}", sel.score, best);
    assert!(sel.score >= 0.5 * best);
}

fn points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0), 4..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]
    /// Greedy max-sum dispersion is a 2-approximation on metric distances.
    #[test]
    fn greedy_is_within_half_of_optimal_on_small_pools(pts in points(8), k in 2usize..=4) {
        let m = from_points(&pts);
        let n = pts.len();
        let k = k.min(n);
        let sel = select_diverse(&m, &vec![1.0; n], k, 0.9).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let best = exhaustive_best(&m, &all, k);
        prop_assert!(sel.score >= 0.5 * best - 1e-12, "{} vs {}", sel.score, best);
    }

    #[test]
    fn adding_a_duplicate_never_raises_the_greedy_score(
        pts in points(7),
        pick in 0usize..7,
        k in 2usize..=4,
        copy_first in proptest::bool::ANY,
    ) {
        let n = pts.len();
        let k = k.min(n);
        let base = from_points(&pts);
        let mut with = pts.clone();
        with.push(pts[pick % n]);
        let mut dup = from_points(&with);
        dup.ids[n] = if copy_first { "a-copy".into() } else { "zz-copy".into() };
        let s0 = select_diverse(&base, &vec![1.0; n], k, 0.9).unwrap().score;
        let s1 = select_diverse(&dup, &vec![1.0; n + 1], k, 0.9).unwrap().score;
        prop_assert!(s1 <= s0 + 1e-12, "{} > {}", s1, s0);
    }
}
