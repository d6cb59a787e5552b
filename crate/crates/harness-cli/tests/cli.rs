use std::path::Path;

use harness_cli::cli::run;

fn crashsieve(out: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["crashsieve", "--out", out.to_str().unwrap()];
    argv.extend_from_slice(args);
    run(argv)
}

#[test]
fn validate_shipped_scenes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(crashsieve(dir.path(), &["validate", "right-turn"]), 0);
    assert_eq!(crashsieve(dir.path(), &["validate", "crossing"]), 0);
    assert_eq!(crashsieve(dir.path(), &["validate", "no-such-scene"]), 1);
}

#[test]
fn validate_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"scene": "crossing", "manifest": "m.json", "patterns": 30}"#).unwrap();
    assert_eq!(crashsieve(dir.path(), &["validate", good.to_str().unwrap()]), 0);
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"scene": "crossing", "pattern": 30}"#).unwrap();
    assert_eq!(crashsieve(dir.path(), &["validate", unknown.to_str().unwrap()]), 1);
    let zero = dir.path().join("zero.json");
    std::fs::write(&zero, r#"{"scene": "crossing", "manifest": "m.json", "patterns": 0}"#).unwrap();
    assert_eq!(crashsieve(dir.path(), &["validate", zero.to_str().unwrap()]), 1);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(crashsieve(dir.path(), &["frobnicate"]), 1);
    assert_eq!(crashsieve(dir.path(), &["run", "--no-such-flag"]), 1);
    assert_eq!(crashsieve(dir.path(), &[]), 1);
    assert_eq!(crashsieve(dir.path(), &["--help"]), 0);
}

#[test]
fn run_without_manifest_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(crashsieve(dir.path(), &["run", "--scene", "right-turn", "--patterns", "2"]), 1);
    assert!(!dir.path().join("campaigns").exists());
}

#[test]
fn classify_and_analyze_need_campaigns() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(crashsieve(dir.path(), &["analyze"]), 1);
    let missing = dir.path().join("nope");
    assert_eq!(crashsieve(dir.path(), &["classify", "--campaign", missing.to_str().unwrap()]), 1);
}

#[test]
fn replay_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(crashsieve(dir.path(), &["replay", "missing.jsonl"]), 1);
    let garbage = dir.path().join("garbage.jsonl");
    std::fs::write(&garbage, "{not json\n").unwrap();
    assert_eq!(crashsieve(dir.path(), &["replay", garbage.to_str().unwrap()]), 2);
}

#[test]
fn end_to_end_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let seeded = |args: &[&str]| {
        let mut a = vec!["--seed", "4", "--jobs", "2"];
        a.extend_from_slice(args);
        crashsieve(out, &a)
    };
    assert_eq!(seeded(&["train", "--scene", "right-turn", "--tiny"]), 0);
    assert_eq!(seeded(&["select", "--scene", "right-turn", "--k", "4", "--min-success", "0"]), 0);
    for set in ["diverse", "less-diverse"] {
        assert_eq!(seeded(&["run", "--scene", "right-turn", "--set", set, "--patterns", "4"]), 0);
    }
    assert_eq!(seeded(&["classify"]), 0);
    assert_eq!(seeded(&["analyze"]), 0);

    let policies = out.join("policies/right-turn");
    for f in ["pool.manifest.json", "diverse.manifest.json", "less-diverse.manifest.json"] {
        assert!(policies.join(f).is_file(), "{f}");
    }
    for set in ["diverse", "less-diverse"] {
        let camp = out.join(format!("campaigns/right-turn-{set}"));
        for f in ["campaign.json", "runs.jsonl", "verdicts.jsonl", "classify.json"] {
            assert!(camp.join(f).is_file(), "{set}/{f}");
        }
        let runs = harness_cli::campaign::load_runs(&camp).unwrap();
        assert_eq!(runs.len(), 16);
        let fails = runs.iter().filter(|r| r.terminal.is_failure()).count();
        assert_eq!(analysis::read_verdicts(&camp.join("verdicts.jsonl")).unwrap().len(), fails);
        if let Some(rel) = runs.iter().find_map(|r| r.trajectory.clone()) {
            assert_eq!(crashsieve(out, &["replay", camp.join(rel).to_str().unwrap()]), 0);
        }

        let analysis = out.join(format!("analysis/right-turn-{set}"));
        for f in [
            "angle_histogram.csv",
            "angle_histogram.svg",
            "min_ttc_histogram.csv",
            "min_ttc_histogram.svg",
            "collisions.csv",
            "features.csv",
        ] {
            assert!(analysis.join(f).is_file(), "{set}/{f}");
        }
    }
    for f in ["failure_types.csv", "collision_partners.csv", "min_ttc_summary.csv"] {
        assert!(out.join("analysis").join(f).is_file(), "{f}");
    }
}
