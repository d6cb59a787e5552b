//! Collision-state feature vectors and their principal-component projection.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::collision::{CollisionRecord, Participant};
use crate::AnalysisError;

pub const FEATURE_DIM: usize = 10;

/// Column layout of a feature vector: the collision location followed by
/// speed, heading, acceleration and steering of the ego and then the other
/// vehicle. The ego heading is absolute; the other's is the collision angle.
/// Angles are in degrees.
pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "x",
    "y",
    "ego_speed",
    "ego_heading_deg",
    "ego_accel",
    "ego_steer",
    "other_speed",
    "other_angle_deg",
    "other_accel",
    "other_steer",
];

pub type FeatureVector = [f64; FEATURE_DIM];

/// Features of a vehicle-vehicle collision; wall collisions have none.
pub fn feature_vector(record: &CollisionRecord) -> Option<FeatureVector> {
    let other: Participant = record.other?;
    let ego = record.ego;
    Some([
        record.location.0,
        record.location.1,
        ego.state.v,
        crate::collision::wrap_degrees(ego.state.h.to_degrees()),
        ego.action.alpha,
        ego.action.phi,
        other.state.v,
        record.angle?,
        other.action.alpha,
        other.action.phi,
    ])
}

/// Principal components of the column-standardized feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub means: Vec<f64>,
    /// Column standard deviations; zero-variance columns keep 1 so they standardize to 0.
    pub scales: Vec<f64>,
    /// Eigenvalues of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Loadings, one column per component, in eigenvalue order.
    pub loadings: DMatrix<f64>,
}

impl Pca {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self, AnalysisError> {
        if rows.len() < 2 {
            return Err(AnalysisError::TooFewRecords(rows.len()));
        }
        let n = rows.len();
        let p = rows[0].len();
        let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
        let means: Vec<f64> = (0..p).map(|j| x.column(j).mean()).collect();
        let scales: Vec<f64> = (0..p)
            .map(|j| {
                let var = x.column(j).iter().map(|v| (v - means[j]).powi(2)).sum::<f64>() / (n - 1) as f64;
                if var > 1e-24 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let z = standardize(&x, &means, &scales);
        let cov = z.transpose() * &z / (n - 1) as f64;
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
        let mut loadings = DMatrix::zeros(p, p);
        for (c, &k) in order.iter().enumerate() {
            let mut v = eig.eigenvectors.column(k).clone_owned();
            let pivot = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if pivot < 0.0 {
                v = -v;
            }
            loadings.set_column(c, &v);
        }
        Ok(Self {
            means,
            scales,
            eigenvalues,
            loadings,
        })
    }

    pub fn standardized(&self, rows: &[Vec<f64>]) -> DMatrix<f64> {
        let x = DMatrix::from_fn(rows.len(), self.means.len(), |i, j| rows[i][j]);
        standardize(&x, &self.means, &self.scales)
    }

    /// Scores on the first `k` components.
    pub fn project(&self, rows: &[Vec<f64>], k: usize) -> DMatrix<f64> {
        self.standardized(rows) * self.loadings.columns(0, k)
    }
}

fn standardize(x: &DMatrix<f64>, means: &[f64], scales: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| (x[(i, j)] - means[j]) / scales[j])
}

/// Writes the feature matrix and, with at least two rows, the 2D projection.
/// Returns whether the projection was written.
pub fn export_features(records: &[CollisionRecord], features_csv: &Path, projection_csv: &Path) -> Result<bool, AnalysisError> {
    let rows: Vec<(&CollisionRecord, Vec<f64>)> = records
        .iter()
        .filter_map(|r| feature_vector(r).map(|f| (r, f.to_vec())))
        .collect();
    let mut w = csv::Writer::from_path(features_csv)?;
    let mut header = vec!["case_id", "label", "partner"];
    header.extend(FEATURE_NAMES);
    w.write_record(&header)?;
    for (r, f) in &rows {
        let mut line = vec![r.case_id.clone(), r.label.to_string(), r.partner.label()];
        line.extend(f.iter().map(|v| v.to_string()));
        w.write_record(&line)?;
    }
    w.flush()?;
    if rows.len() < 2 {
        return Ok(false);
    }
    let matrix: Vec<Vec<f64>> = rows.iter().map(|(_, f)| f.clone()).collect();
    let pca = Pca::fit(&matrix)?;
    let scores = pca.project(&matrix, 2);
    let mut w = csv::Writer::from_path(projection_csv)?;
    w.write_record(["case_id", "label", "partner", "pc1", "pc2"])?;
    for (i, (r, _)) in rows.iter().enumerate() {
        w.write_record([
            r.case_id.clone(),
            r.label.to_string(),
            r.partner.label(),
            scores[(i, 0)].to_string(),
            scores[(i, 1)].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(true)
}
