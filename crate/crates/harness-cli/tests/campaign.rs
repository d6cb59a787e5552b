mod common;

use std::fs;

use common::{config, set_manifest, sorted_outcomes};
use harness_cli::campaign::{load_runs, test_seed, FAILURES_DIR, RUNS_FILE};
use harness_cli::records::RecordLog;
use harness_cli::{run_campaign, HarnessError, RunRecord};

#[test]
fn every_pattern_meets_every_member() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(set_manifest(&dir.path().join("set"), 2), 2);
    let camp = dir.path().join("camp");
    let report = run_campaign(&cfg, &camp, 1).unwrap();
    assert_eq!((report.total, report.executed, report.skipped), (4, 4, 0));

    let runs = load_runs(&camp).unwrap();
    assert_eq!(runs.len(), 4);
    let ids = harness_cli::records::ids(&runs);
    assert_eq!(ids.len(), 4);
    for r in &runs {
        assert_eq!(r.seed, test_seed(cfg.seed, &r.scenario_id, &r.policy_id));
        assert_eq!(r.trajectory.is_some(), r.terminal.is_failure());
        if let Some(rel) = &r.trajectory {
            assert!(rel.starts_with(FAILURES_DIR));
            assert!(camp.join(rel).is_file());
        }
    }
}

#[test]
fn thread_count_does_not_change_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(set_manifest(&dir.path().join("set"), 4), 6);
    run_campaign(&cfg, &dir.path().join("one"), 1).unwrap();
    run_campaign(&cfg, &dir.path().join("eight"), 8).unwrap();
    let one = load_runs(&dir.path().join("one")).unwrap();
    let eight = load_runs(&dir.path().join("eight")).unwrap();
    assert_eq!(one.len(), 24);
    assert_eq!(sorted_outcomes(&one), sorted_outcomes(&eight));
}

#[test]
fn interrupted_campaign_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(set_manifest(&dir.path().join("set"), 4), 5);
    let camp = dir.path().join("camp");
    run_campaign(&cfg, &camp, 2).unwrap();
    let full = sorted_outcomes(&load_runs(&camp).unwrap());

    // Keep 7 whole lines and half of the 8th, as a crash mid-append would.
    let path = camp.join(RUNS_FILE);
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut cut = lines[..7].join("\n") + "\n";
    cut.push_str(&lines[7][..lines[7].len() / 2]);
    fs::write(&path, cut).unwrap();

    let report = run_campaign(&cfg, &camp, 2).unwrap();
    assert_eq!((report.skipped, report.executed, report.dropped), (7, 13, 1));
    assert_eq!(sorted_outcomes(&load_runs(&camp).unwrap()), full);
}

#[test]
fn tampered_record_is_detected_and_redone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(set_manifest(&dir.path().join("set"), 2), 3);
    let camp = dir.path().join("camp");
    run_campaign(&cfg, &camp, 1).unwrap();
    let full = sorted_outcomes(&load_runs(&camp).unwrap());

    let path = camp.join(RUNS_FILE);
    let text = fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("\"steps\":", "\"steps\":1", 1);
    assert_ne!(tampered, text);
    fs::write(&path, tampered).unwrap();
    assert!(matches!(load_runs(&camp), Err(HarnessError::Corrupt { .. })));

    let report = run_campaign(&cfg, &camp, 1).unwrap();
    assert_eq!((report.dropped, report.executed), (1, 1));
    assert_eq!(sorted_outcomes(&load_runs(&camp).unwrap()), full);
}

#[test]
fn completed_campaign_reruns_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(set_manifest(&dir.path().join("set"), 2), 2);
    let camp = dir.path().join("camp");
    run_campaign(&cfg, &camp, 1).unwrap();
    let before = fs::read(camp.join(RUNS_FILE)).unwrap();
    let report = run_campaign(&cfg, &camp, 1).unwrap();
    assert_eq!((report.executed, report.skipped), (0, 4));
    assert_eq!(fs::read(camp.join(RUNS_FILE)).unwrap(), before);
}

#[test]
fn changed_configuration_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(set_manifest(&dir.path().join("set"), 2), 2);
    let camp = dir.path().join("camp");
    run_campaign(&cfg, &camp, 1).unwrap();
    let other = harness_cli::CampaignConfig { seed: 99, ..cfg.clone() };
    let err = run_campaign(&other, &camp, 1).unwrap_err();
    assert!(matches!(err, HarnessError::Invalid(_)));
    assert_eq!(err.exit_code(), 1);

    let mut settings_only = cfg.clone();
    settings_only.classify.search_budget = 10;
    run_campaign(&settings_only, &camp, 1).unwrap();
}

#[test]
fn missing_manifest_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path().join("nowhere.manifest.json"), 2);
    let err = run_campaign(&cfg, &dir.path().join("camp"), 1).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("crashsieve train"), "{err}");
}

#[test]
fn mixed_policies_pair_distinct_members() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(set_manifest(&dir.path().join("set"), 3), 2);
    cfg.mix_policies = true;
    let camp = dir.path().join("camp");
    run_campaign(&cfg, &camp, 1).unwrap();
    let runs = load_runs(&camp).unwrap();
    assert_eq!(runs.len(), 6);
    assert!(runs.iter().all(|r| r.policy_id.split('+').count() == 2));
}

#[test]
fn record_log_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let log = RecordLog::new(dir.path().join("log.jsonl"));
    let record = RunRecord {
        scenario_id: "s".into(),
        policy_id: "p".into(),
        seed: 9,
        terminal: sim_core::TerminalStatus::Timeout,
        steps: 300,
        min_ttc: None,
        trajectory: None,
        duration_ms: 4,
    };
    log.append(std::slice::from_ref(&record)).unwrap();
    log.append(std::slice::from_ref(&record)).unwrap();
    let loaded = log.load::<RunRecord>().unwrap();
    assert_eq!(loaded.records, vec![record.clone(), record]);
    assert!(loaded.clean && loaded.dropped == 0);
}
