use std::fs;

use lmcf_core::diagnostics::Verdict;
use lmcf_core::io::read_trajectory;
use lmcf_core::scenario::{bundled, run_scenario, run_scenarios, Scenario, ScenarioError};

const SHORT_CIRCLE: &str = r#"
schema_version = 1
id = "short_circle"
stride = 0.01

[flow]
target_spacing = 0.05
max_time = 0.1

[[profiles]]
kind = "circle"
center = [2.0, 0.0]
radius = 0.5

[[diagnostics]]
check = "density_monotonicity"
horizon = 0.2
"#;

#[test]
fn artifacts_follow_the_layout() {
    let out = tempfile::tempdir().unwrap();
    let s = Scenario::from_toml(SHORT_CIRCLE).unwrap();
    let r = run_scenario(&s, out.path());
    assert!(r.ok, "{r:?}");
    let dir = out.path().join("short_circle");
    for sub in ["snapshots", "series", "reports", "render"] {
        assert!(dir.join(sub).is_dir(), "{sub}");
    }
    assert!(dir.join("events.jsonl").exists());
    assert!(!dir.join("error.json").exists());
    assert!(dir.join("reports/check_00_density_monotonicity.json").exists());
    assert!(dir.join("series/check_00_density_monotonicity.csv").exists());
    assert!(dir.join("render/snapshot_000000.svg").exists());
    let traj = read_trajectory(&dir.join("snapshots")).unwrap();
    assert!((traj.snapshots.last().unwrap().t - 0.1).abs() < 1e-12);
    assert_eq!(r.checks[0].verdict, Verdict::Pass);
}

#[test]
fn runtime_failure_keeps_partial_artifacts() {
    // valid parameters, but a loop this large does not fit inside the extent
    let text = SHORT_CIRCLE.replace(
        "kind = \"circle\"\ncenter = [2.0, 0.0]\nradius = 0.5",
        "kind = \"sigma\"\nloop_area = 200.0\nextent = 10.0",
    );
    let s = Scenario::from_toml(&text).unwrap();
    let out = tempfile::tempdir().unwrap();
    let r = run_scenario(&s, out.path());
    assert!(!r.ok);
    let err: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("short_circle/error.json")).unwrap()).unwrap();
    assert!(err["error"].as_str().unwrap().contains("profiles[0]"), "{err}");
    assert!(out.path().join("short_circle/reports/exit_report.json").exists());
}

#[test]
fn duplicate_ids_refused() {
    let s = Scenario::from_toml(SHORT_CIRCLE).unwrap();
    let out = tempfile::tempdir().unwrap();
    assert!(matches!(
        run_scenarios(&[s.clone(), s], out.path(), 2),
        Err(ScenarioError::Invalid { .. })
    ));
}

#[test]
fn pool_matches_sequential() {
    let mut a = Scenario::from_toml(SHORT_CIRCLE).unwrap();
    let mut b = a.clone();
    a.id = "a".into();
    b.id = "b".into();
    b.profiles = bundled("stationary_ray").unwrap().profiles;
    let pooled = tempfile::tempdir().unwrap();
    let reports = run_scenarios(&[a.clone(), b], pooled.path(), 2).unwrap();
    assert!(reports.iter().all(|r| r.ok));
    let single = tempfile::tempdir().unwrap();
    run_scenario(&a, single.path());
    let events = |root: &std::path::Path| fs::read(root.join("a/events.jsonl")).unwrap();
    let csv = |root: &std::path::Path| fs::read(root.join("a/snapshots/snapshot_000003.csv")).unwrap();
    assert_eq!(events(pooled.path()), events(single.path()));
    assert_eq!(csv(pooled.path()), csv(single.path()));
}

#[test]
fn circle_collapse_scenario() {
    let out = tempfile::tempdir().unwrap();
    let r = run_scenario(&bundled("circle_collapse").unwrap(), out.path());
    assert!(r.ok, "{r:?}");
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(out.path().join("circle_collapse/reports/check_00_collapse_time.json")).unwrap(),
    )
    .unwrap();
    assert!(report["details"]["relative_error"].as_f64().unwrap() < 5e-3);
}

#[test]
fn expander_scenario_is_self_similar() {
    let out = tempfile::tempdir().unwrap();
    let r = run_scenario(&bundled("expander").unwrap(), out.path());
    assert!(r.ok, "{r:?}");
    assert!(r.checks.iter().any(|c| c.check == "self_similarity" && c.verdict == Verdict::Pass));
}

#[test]
fn sigma_scenario_has_one_surgery_and_a_full_turn_jump() {
    let out = tempfile::tempdir().unwrap();
    let r = run_scenario(&bundled("figure4_sigma").unwrap(), out.path());
    assert!(r.ok, "{r:?}");
    let dir = out.path().join("figure4_sigma");
    let events = fs::read_to_string(dir.join("events.jsonl")).unwrap();
    assert_eq!(events.lines().filter(|l| l.contains("\"kind\":\"surgery\"")).count(), 1);
    let jump: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("reports/check_01_angle_jump.json")).unwrap()).unwrap();
    let m = jump["details"]["jumps"][0]["magnitude"].as_f64().unwrap();
    assert!((m - std::f64::consts::TAU).abs() < 0.1);
    // pre-event snapshot is drawn with its loop
    let pre = fs::read_dir(dir.join("render"))
        .unwrap()
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .filter(|svg| svg.contains("class=\"loop\""))
        .count();
    assert!(pre >= 1);
}
