//! Turns campaign directories into histograms, tables and feature files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use analysis::summary::{write_failure_table, write_partner_table, SetKey};
use analysis::svg::{histogram_svg, scatter_svg, write_svg};
use analysis::{
    export_features, histogram, read_verdicts, summarize_collision_partners, summarize_failures, CollisionRecord,
    Histogram, HistogramSpec, NEAR_MISS,
};
use sim_core::io::load_trajectory;

use crate::campaign::{load_runs, CampaignMeta};
use crate::classify::VERDICTS_FILE;
use crate::error::{HarnessError, Result};
use crate::fsutil::write_atomic;

pub const FAILURE_TABLE: &str = "failure_types.csv";
pub const PARTNER_TABLE: &str = "collision_partners.csv";
pub const MIN_TTC_TABLE: &str = "min_ttc_summary.csv";
pub const ANGLE_HISTOGRAM: &str = "angle_histogram.csv";
pub const MIN_TTC_HISTOGRAM: &str = "min_ttc_histogram.csv";
pub const COLLISIONS: &str = "collisions.csv";
pub const FEATURES: &str = "features.csv";
pub const PROJECTION: &str = "projection.csv";

/// Per-campaign counts behind the min-TTC summary table.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TtcCounts {
    pub runs: usize,
    pub collisions: usize,
    pub near_misses: usize,
    pub no_contact: usize,
}

#[derive(Debug, Clone, Default)]
pub struct AnalysisReport {
    pub written: Vec<PathBuf>,
    /// Campaigns whose PCA projection was skipped for lack of records.
    pub projection_skipped: Vec<String>,
    pub angle_histograms: BTreeMap<SetKey, Histogram>,
    pub min_ttc_histograms: BTreeMap<SetKey, Histogram>,
    pub ttc: BTreeMap<SetKey, TtcCounts>,
}

/// Campaign directories below `<out>/campaigns`, sorted.
pub fn discover_campaigns(out: &Path) -> Result<Vec<PathBuf>> {
    let root = out.join("campaigns");
    let entries = match std::fs::read_dir(&root) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(HarnessError::io(&root)(e)),
    };
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(crate::campaign::META_FILE).is_file())
        .collect();
    dirs.sort();
    Ok(dirs)
}

fn write_collisions(path: &Path, records: &[CollisionRecord]) -> Result<()> {
    let mut text = String::from("case_id,label,partner,angle_deg,x,y\n");
    for r in records {
        let angle = r.angle.map(|a| a.to_string()).unwrap_or_default();
        text += &format!(
            "{},{},{},{angle},{},{}\n",
            r.case_id,
            r.label,
            r.partner.label(),
            r.location.0,
            r.location.1
        );
    }
    write_atomic(path, text)
}

fn write_ttc_table(path: &Path, table: &BTreeMap<SetKey, TtcCounts>) -> Result<()> {
    let mut text = format!("scene,policy_set,runs,collisions,near_misses_le_{NEAR_MISS}s,no_contact\n");
    for ((scene, set), c) in table {
        text += &format!("{scene},{set},{},{},{},{}\n", c.runs, c.collisions, c.near_misses, c.no_contact);
    }
    write_atomic(path, text)
}

/// Analyses every campaign in `campaigns`, writing per-campaign files under
/// `<out>/<scene>-<set>/` and cross-campaign tables directly under `out`.
pub fn analyze(campaigns: &[PathBuf], out: &Path) -> Result<AnalysisReport> {
    if campaigns.is_empty() {
        return Err(HarnessError::Invalid("no campaigns to analyse; run `crashsieve run` first".into()));
    }
    let mut report = AnalysisReport::default();
    let mut all_verdicts = Vec::new();
    let mut partners: BTreeMap<SetKey, BTreeMap<String, usize>> = BTreeMap::new();

    for dir in campaigns {
        let meta = CampaignMeta::load(dir)?;
        let key: SetKey = (meta.scene.id.clone(), meta.policy_set.clone());
        let runs = load_runs(dir)?;
        let verdict_path = dir.join(VERDICTS_FILE);
        if !verdict_path.is_file() {
            return Err(HarnessError::Invalid(format!(
                "{} has no verdicts; run `crashsieve classify` first",
                dir.display()
            )));
        }
        let verdicts = read_verdicts(&verdict_path)?;
        let sub = out.join(format!("{}-{}", key.0, key.1));

        let by_case: BTreeMap<String, &crate::records::RunRecord> = runs
            .iter()
            .map(|r| (crate::classify::case_id(&meta.policy_set, r), r))
            .collect();
        let mut collisions = Vec::new();
        for v in &verdicts {
            let run = by_case.get(&v.case_id).ok_or_else(|| {
                HarnessError::corrupt(&verdict_path, format!("verdict `{}` matches no run", v.case_id))
            })?;
            let rel = run.trajectory.as_ref().ok_or_else(|| {
                HarnessError::corrupt(&verdict_path, format!("run of `{}` kept no trajectory", v.case_id))
            })?;
            let (trajectory, _) = load_trajectory(&dir.join(rel))?;
            if let Some(c) = CollisionRecord::from_trajectory(&v.case_id, v.label, &trajectory, &meta.scene) {
                collisions.push(c);
            }
        }

        let angles: Vec<f64> = collisions.iter().filter_map(|c| c.angle).collect();
        let angle_hist = histogram(&angles, HistogramSpec::ANGLE)?;
        let ttc_values: Vec<f64> = runs.iter().map(|r| r.min_ttc_value()).collect();
        let ttc_hist = histogram(&ttc_values, HistogramSpec::MIN_TTC)?;
        let title = format!("{} / {}", key.0, key.1);

        for (name, h, label) in [
            (ANGLE_HISTOGRAM, &angle_hist, "collision angle [deg]"),
            (MIN_TTC_HISTOGRAM, &ttc_hist, "min-TTC [s]"),
        ] {
            let csv = sub.join(name);
            std::fs::create_dir_all(&sub).map_err(HarnessError::io(&sub))?;
            h.write_csv(&csv)?;
            let svg = csv.with_extension("svg");
            write_svg(&svg, &histogram_svg(h, &format!("{title}: {label}")))?;
            report.written.extend([csv, svg]);
        }

        let collisions_csv = sub.join(COLLISIONS);
        write_collisions(&collisions_csv, &collisions)?;
        report.written.push(collisions_csv);

        let (features, projection) = (sub.join(FEATURES), sub.join(PROJECTION));
        report.written.push(features.clone());
        if export_features(&collisions, &features, &projection)? {
            let points = projection_points(&projection)?;
            let svg = projection.with_extension("svg");
            write_svg(&svg, &scatter_svg(&points, &format!("{title}: PCA of collision states")))?;
            report.written.extend([projection, svg]);
        } else {
            report.projection_skipped.push(title.clone());
        }

        let ttc = TtcCounts {
            runs: runs.len(),
            collisions: runs.iter().filter(|r| r.terminal.is_failure()).count(),
            near_misses: ttc_values.iter().filter(|&&t| t > 0.0 && t <= NEAR_MISS).count(),
            no_contact: ttc_values.iter().filter(|t| t.is_infinite()).count(),
        };
        partners.insert(key.clone(), summarize_collision_partners(&collisions));
        report.ttc.insert(key.clone(), ttc);
        report.angle_histograms.insert(key.clone(), angle_hist);
        report.min_ttc_histograms.insert(key, ttc_hist);
        all_verdicts.extend(verdicts);
    }

    let failure_table = out.join(FAILURE_TABLE);
    let mut failures = summarize_failures(&all_verdicts);
    for key in report.ttc.keys() {
        failures.entry(key.clone()).or_default();
    }
    write_failure_table(&failure_table, &failures)?;
    let partner_table = out.join(PARTNER_TABLE);
    write_partner_table(&partner_table, &partners)?;
    let ttc_table = out.join(MIN_TTC_TABLE);
    write_ttc_table(&ttc_table, &report.ttc)?;
    report.written.extend([failure_table, partner_table, ttc_table]);
    Ok(report)
}

/// (pc1, pc2, label) rows of a projection file.
fn projection_points(path: &Path) -> Result<Vec<(f64, f64, String)>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| HarnessError::corrupt(path, e))?;
    reader
        .records()
        .map(|row| {
            let row = row.map_err(|e| HarnessError::corrupt(path, e))?;
            let num = |k: usize| row[k].parse::<f64>().map_err(|e| HarnessError::corrupt(path, e));
            Ok((num(3)?, num(4)?, row[1].to_string()))
        })
        .collect()
}
