use analysis::{histogram, AnalysisError, HistogramSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn empty_values_give_zero_bins() {
    for spec in [HistogramSpec::ANGLE, HistogramSpec::MIN_TTC] {
        let h = histogram(&[], spec).unwrap();
        assert_eq!(h.counts.len(), spec.bins);
        assert!(h.counts.iter().all(|&c| c == 0));
        assert_eq!(h.total(), 0);
    }
}

#[test]
fn one_value_per_bin_center() {
    for spec in [HistogramSpec::ANGLE, HistogramSpec::MIN_TTC] {
        let centers: Vec<f64> = (0..spec.bins).map(|k| spec.center(k)).collect();
        let h = histogram(&centers, spec).unwrap();
        assert!(h.counts.iter().all(|&c| c == 1), "{spec:?}");
    }
}

#[test]
fn out_of_range_values_clip_and_infinities_are_excluded() {
    let spec = HistogramSpec::MIN_TTC;
    let h = histogram(&[-1.0, 0.0, 10.0, 25.0, f64::INFINITY, f64::NAN, 4.99], spec).unwrap();
    assert_eq!(h.counts[0], 2);
    assert_eq!(h.counts[99], 2);
    assert_eq!(h.counts[49], 1);
    assert_eq!(h.excluded, 2);
    assert_eq!(h.total(), 7);
    let angle = histogram(&[-180.0, 179.999], HistogramSpec::ANGLE).unwrap();
    assert_eq!((angle.counts[0], angle.counts[79]), (1, 1));
}

#[test]
fn uniform_samples_fill_bins_evenly() {
    let spec = HistogramSpec::ANGLE;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 10_000;
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(-180.0..180.0)).collect();
    let h = histogram(&values, spec).unwrap();
    let p = 1.0 / spec.bins as f64;
    let mean = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    for (k, &c) in h.counts.iter().enumerate() {
        assert!((c as f64 - mean).abs() <= 5.0 * sd, "bin {k}: {c}");
    }
    assert_eq!(h.total(), n);
}

#[test]
fn csv_totals_match_the_record_count() {
    let dir = tempfile::tempdir().unwrap();
    let values = [0.5, 1.5, f64::INFINITY, 9.9, 3.0];
    let h = histogram(&values, HistogramSpec::MIN_TTC).unwrap();
    let path = dir.path().join("min_ttc.csv");
    h.write_csv(&path).unwrap();
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 101);
    let total: usize = rows.iter().map(|r| r[3].parse::<usize>().unwrap()).sum();
    assert_eq!(total, values.len());
    assert_eq!(&rows[100][0], "excluded");
    assert_eq!(&rows[100][3], "1");
}

#[test]
fn invalid_specs_are_rejected() {
    for spec in [
        HistogramSpec { bins: 0, lo: 0.0, hi: 1.0 },
        HistogramSpec { bins: 4, lo: 1.0, hi: 1.0 },
        HistogramSpec { bins: 4, lo: 0.0, hi: f64::NAN },
    ] {
        assert!(matches!(histogram(&[0.5], spec), Err(AnalysisError::InvalidSpec(_))));
    }
}

#[test]
fn svg_renderings_are_well_formed() {
    let h = histogram(&[-10.0, 5.0, 5.0], HistogramSpec::ANGLE).unwrap();
    let bars = analysis::svg::histogram_svg(&h, "angle");
    assert!(bars.starts_with("<svg") && bars.trim_end().ends_with("</svg>"));
    assert_eq!(bars.matches("fill=\"steelblue\"").count(), 80);
    let points = vec![(0.0, 1.0, "A-P".to_string()), (2.0, -1.0, "U".to_string())];
    let scatter = analysis::svg::scatter_svg(&points, "pca");
    assert_eq!(scatter.matches("<circle").count(), 2);
    assert!(analysis::svg::scatter_svg(&[], "empty").contains("</svg>"));
}
