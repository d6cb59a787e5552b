//! Trajectory distance and the inter-policy diversity score.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sim_core::{Trajectory, Vec2};

use crate::ForgeError;

/// Mean Euclidean distance between two position sequences over their common
/// prefix (the longer one is truncated).
pub fn path_distance(a: &[Vec2], b: &[Vec2]) -> Result<f64, ForgeError> {
    let n = a.len().min(b.len());
    if n == 0 {
        return Err(ForgeError::EmptyTrajectory);
    }
    Ok(a.iter().zip(b).map(|(p, q)| p.distance(*q)).sum::<f64>() / n as f64)
}

pub fn positions(t: &Trajectory, slot: usize) -> Vec<Vec2> {
    t.states.iter().map(|s| s.vehicles[slot].position()).collect()
}

/// Distance between the paths of vehicle `slot` in two runs of the same scenario.
pub fn trajectory_distance(a: &Trajectory, b: &Trajectory, slot: usize) -> Result<f64, ForgeError> {
    path_distance(&positions(a, slot), &positions(b, slot))
}

/// Pairwise diversity of a policy set: symmetric, zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityMatrix {
    pub ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
    /// Pairs `(i, j)`, `i < j`, that share no success scenario; their value is 0.
    pub empty_pairs: Vec<(usize, usize)>,
}

impl DiversityMatrix {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Mean over ordered pairs of distinct members.
    pub fn score(&self) -> f64 {
        let all: Vec<usize> = (0..self.len()).collect();
        subset_score(&self.values, &all)
    }

    /// Restriction to `members`, in that order.
    pub fn submatrix(&self, members: &[usize]) -> DiversityMatrix {
        let pos = |i: usize| members.iter().position(|m| *m == i);
        let mut empty_pairs: Vec<(usize, usize)> = self
            .empty_pairs
            .iter()
            .filter_map(|&(i, j)| {
                let (a, b) = (pos(i)?, pos(j)?);
                Some((a.min(b), a.max(b)))
            })
            .collect();
        empty_pairs.sort_unstable();
        DiversityMatrix {
            ids: members.iter().map(|&i| self.ids[i].clone()).collect(),
            values: members
                .iter()
                .map(|&i| members.iter().map(|&j| self.values[i][j]).collect())
                .collect(),
            empty_pairs,
        }
    }

    pub fn is_flagged(&self, i: usize, j: usize) -> bool {
        self.empty_pairs.contains(&(i.min(j), i.max(j)))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for id in &self.ids {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for (id, row) in self.ids.iter().zip(&self.values) {
            out.push_str(id);
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Mean of `values[i][j]` over ordered pairs of distinct members; 0 below two members.
pub fn subset_score(values: &[Vec<f64>], members: &[usize]) -> f64 {
    let k = members.len();
    if k < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for &i in members {
        for &j in members {
            if i != j {
                sum += values[i][j];
            }
        }
    }
    sum / (k * (k - 1)) as f64
}

/// Diversity of one ordered pair from per-scenario paths and success flags:
/// the mean path distance over scenarios both policies succeed on. `None`
/// when they share no success scenario.
pub fn pair_diversity(
    paths_a: &[Vec<Vec2>],
    success_a: &[bool],
    paths_b: &[Vec<Vec2>],
    success_b: &[bool],
) -> Result<Option<f64>, ForgeError> {
    let mut sum = 0.0;
    let mut common = 0usize;
    for s in 0..paths_a.len().min(paths_b.len()) {
        if success_a[s] && success_b[s] {
            sum += path_distance(&paths_a[s], &paths_b[s])?;
            common += 1;
        }
    }
    Ok((common > 0).then(|| sum / common as f64))
}

/// Pairwise diversity from per-policy, per-scenario paths of the tracked slot
/// and success flags. Ordered pairs are evaluated in parallel; the result
/// does not depend on the evaluation order.
pub fn diversity_matrix(
    ids: &[String],
    paths: &[Vec<Vec<Vec2>>],
    successes: &[Vec<bool>],
) -> Result<DiversityMatrix, ForgeError> {
    let n = ids.len();
    if n < 2 {
        return Err(ForgeError::TooFewPolicies { need: 2, have: n });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
        .collect();
    let results: Vec<Option<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| pair_diversity(&paths[i], &successes[i], &paths[j], &successes[j]))
        .collect::<Result<_, _>>()?;
    let mut values = vec![vec![0.0; n]; n];
    let mut empty_pairs = Vec::new();
    for (&(i, j), r) in pairs.iter().zip(results) {
        match r {
            Some(v) => values[i][j] = v,
            None if i < j => {
                log::warn!("policies `{}` and `{}` share no success scenario", ids[i], ids[j]);
                empty_pairs.push((i, j));
            }
            None => {}
        }
    }
    Ok(DiversityMatrix {
        ids: ids.to_vec(),
        values,
        empty_pairs,
    })
}
