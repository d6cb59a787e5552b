//! Diverse and less-diverse subset selection over a pairwise diversity matrix.

use serde::{Deserialize, Serialize};

use crate::diversity::{subset_score, DiversityMatrix};
use crate::ForgeError;

/// Selected members (pool indices, in selection order) and their score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub members: Vec<usize>,
    pub score: f64,
}

fn qualifying(success: &[f64], min_success: f64) -> Vec<usize> {
    (0..success.len()).filter(|&i| success[i] >= min_success).collect()
}

fn check_k(k: usize, have: usize) -> Result<(), ForgeError> {
    if k == 0 {
        return Err(ForgeError::InvalidConfig("subset size must be positive".into()));
    }
    if have < k {
        return Err(ForgeError::TooFewPolicies { need: k, have });
    }
    Ok(())
}

/// Greedy surrogate for diverse selection. Seeds with the most distant
/// qualifying pair, then repeatedly adds the candidate with the largest summed
/// distance to the members so far. Ties go to the lowest id. A candidate at
/// zero measured distance from a member is a behavioral duplicate and is only
/// taken once nothing else is left.
pub fn select_diverse(
    matrix: &DiversityMatrix,
    success: &[f64],
    k: usize,
    min_success: f64,
) -> Result<Selection, ForgeError> {
    let pool = qualifying(success, min_success);
    check_k(k, pool.len())?;
    let id = |i: usize| matrix.ids[i].as_str();
    let d = |i: usize, j: usize| matrix.get(i, j);

    let mut members: Vec<usize> = Vec::with_capacity(k);
    if k == 1 {
        members.push(*pool.iter().min_by_key(|&&i| id(i)).expect("non-empty"));
    } else {
        let mut seed: Option<(usize, usize)> = None;
        for (x, &i) in pool.iter().enumerate() {
            for &j in &pool[x + 1..] {
                let (a, b) = if id(i) <= id(j) { (i, j) } else { (j, i) };
                let better = match seed {
                    None => true,
                    Some((p, q)) => d(a, b) > d(p, q) || (d(a, b) == d(p, q) && (id(a), id(b)) < (id(p), id(q))),
                };
                if better {
                    seed = Some((a, b));
                }
            }
        }
        let (a, b) = seed.expect("at least two qualifying");
        members.extend([a, b]);
    }
    while members.len() < k {
        let duplicate = |c: usize| members.iter().any(|&m| d(c, m) == 0.0 && !matrix.is_flagged(c, m));
        let rest: Vec<usize> = pool.iter().copied().filter(|c| !members.contains(c)).collect();
        let fresh: Vec<usize> = rest.iter().copied().filter(|&c| !duplicate(c)).collect();
        let candidates = if fresh.is_empty() { &rest } else { &fresh };
        let gain = |c: usize| members.iter().map(|&m| d(c, m)).sum::<f64>();
        let next = candidates
            .iter()
            .copied()
            .reduce(|best, c| {
                let (gc, gb) = (gain(c), gain(best));
                if gc > gb || (gc == gb && id(c) < id(best)) {
                    c
                } else {
                    best
                }
            })
            .expect("enough qualifying");
        members.push(next);
    }
    let score = subset_score(&matrix.values, &members);
    Ok(Selection { members, score })
}

/// The anchor plus the `k - 1` qualifying policies closest to it; ties go to
/// the lowest id.
pub fn select_less_diverse(
    matrix: &DiversityMatrix,
    success: &[f64],
    anchor: usize,
    k: usize,
    min_success: f64,
) -> Result<Selection, ForgeError> {
    if anchor >= matrix.len() || success[anchor] < min_success {
        return Err(ForgeError::InvalidConfig(format!(
            "anchor `{}` does not qualify",
            matrix.ids.get(anchor).map_or("?", |s| s.as_str())
        )));
    }
    let pool = qualifying(success, min_success);
    check_k(k, pool.len())?;
    let mut rest: Vec<usize> = pool.into_iter().filter(|&i| i != anchor).collect();
    rest.sort_by(|&a, &b| {
        matrix
            .get(anchor, a)
            .total_cmp(&matrix.get(anchor, b))
            .then_with(|| matrix.ids[a].cmp(&matrix.ids[b]))
    });
    let mut members = vec![anchor];
    members.extend(rest.into_iter().take(k - 1));
    let score = subset_score(&matrix.values, &members);
    Ok(Selection { members, score })
}

/// Highest-success qualifying policy, ties by lowest id.
pub fn default_anchor(ids: &[String], success: &[f64], min_success: f64) -> Option<usize> {
    (0..ids.len())
        .filter(|&i| success[i] >= min_success)
        .reduce(|best, i| {
            if success[i] > success[best] || (success[i] == success[best] && ids[i] < ids[best]) {
                i
            } else {
                best
            }
        })
}
