//! Fixed-range histograms with edge clipping.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub bins: usize,
    pub lo: f64,
    pub hi: f64,
}

impl HistogramSpec {
    /// Collision angles: 80 bins over `[-180, 180)` degrees.
    pub const ANGLE: HistogramSpec = HistogramSpec {
        bins: 80,
        lo: -180.0,
        hi: 180.0,
    };
    /// Min-TTC: 100 bins over `[0, 10]` seconds.
    pub const MIN_TTC: HistogramSpec = HistogramSpec {
        bins: 100,
        lo: 0.0,
        hi: 10.0,
    };

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.bins == 0 || !self.lo.is_finite() || !self.hi.is_finite() || self.lo >= self.hi {
            return Err(AnalysisError::InvalidSpec(format!("{self:?}")));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + bin as f64 * w, self.lo + (bin + 1) as f64 * w)
    }

    pub fn center(&self, bin: usize) -> f64 {
        let (a, b) = self.edges(bin);
        0.5 * (a + b)
    }

    /// Bin of a finite value; values outside the range land in the edge bins.
    pub fn bin_of(&self, x: f64) -> usize {
        let k = ((x - self.lo) / self.width()).floor();
        if k < 0.0 {
            0
        } else {
            (k as usize).min(self.bins - 1)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub spec: HistogramSpec,
    pub counts: Vec<usize>,
    /// Non-finite values (the +inf "no contact" sentinel), not binned.
    pub excluded: usize,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.excluded
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), AnalysisError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["bin", "lo", "hi", "count"])?;
        for (k, c) in self.counts.iter().enumerate() {
            let (a, b) = self.spec.edges(k);
            w.write_record([k.to_string(), a.to_string(), b.to_string(), c.to_string()])?;
        }
        w.write_record(["excluded", "", "", &self.excluded.to_string()])?;
        w.flush()?;
        Ok(())
    }
}

pub fn histogram(values: &[f64], spec: HistogramSpec) -> Result<Histogram, AnalysisError> {
    spec.validate()?;
    let mut counts = vec![0; spec.bins];
    let mut excluded = 0;
    for &x in values {
        if x.is_finite() {
            counts[spec.bin_of(x)] += 1;
        } else {
            excluded += 1;
        }
    }
    Ok(Histogram { spec, counts, excluded })
}
