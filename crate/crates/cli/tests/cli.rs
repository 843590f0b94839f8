use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmcf-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("LMCF_LAB_OUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_bundled_scenario() {
    let out = tempfile::tempdir().unwrap();
    let o = lab(&["simulate", "--bundled", "stationary_ray"], out.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("PASS stationary_ray"));
    assert!(out.path().join("stationary_ray/events.jsonl").exists());
}

#[test]
fn failing_verdict_exits_one() {
    let out = tempfile::tempdir().unwrap();
    let cfg = out.path().join("tight.toml");
    // the circle collapses at 0.25, not 0.2
    fs::write(
        &cfg,
        "schema_version = 1\nid = \"tight\"\nstride = 0.01\n[flow]\ntarget_spacing = 0.05\nmax_time = 0.3\n\
         [[profiles]]\nkind = \"circle\"\nradius = 1.0\n\
         [[diagnostics]]\ncheck = \"collapse_time\"\nexpected = 0.2\n",
    )
    .unwrap();
    let o = lab(&["simulate", cfg.to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("collapse_time=FAIL"));
}

#[test]
fn invalid_config_exits_two_with_the_key() {
    let out = tempfile::tempdir().unwrap();
    let cfg = out.path().join("bad.toml");
    fs::write(
        &cfg,
        "schema_version = 1\nid = \"bad\"\nstride = 0.1\n[flow]\ntarget_spacing = 0.1\nmax_time = 1.0\ncfl_factor = 0.9\n\
         [[profiles]]\nkind = \"ray\"\nangle = 1.0\nlength = 3.0\n",
    )
    .unwrap();
    let o = lab(&["simulate", cfg.to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("flow") && err.contains("cfl_factor"), "{err}");
    assert!(!out.path().join("bad").exists());
}

#[test]
fn profile_density_render_and_diagnose() {
    let out = tempfile::tempdir().unwrap();
    let o = lab(&["profile", "ray", "--set", "angle=0.7", "--set", "length=40", "--spacing", "0.05"], out.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curve = out.path().join("profile_ray/curve_0.csv");
    assert!(curve.exists() && out.path().join("profile_ray/validation.json").exists());

    let o = lab(&["density", curve.to_str().unwrap(), "--y", "0,0,0,0", "--l", "0.5"], out.path());
    assert!(o.status.success());
    let d: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((d["value"].as_f64().unwrap() - 1.0).abs() < 1e-4);

    let o = lab(&["simulate", "--bundled", "off_origin_circle"], out.path());
    assert!(o.status.success());
    let run = out.path().join("off_origin_circle");
    let o = lab(
        &["diagnose", run.to_str().unwrap(), "--check", "loop_area_law", "--set", "tolerance=0.02"],
        out.path(),
    );
    assert!(o.status.success(), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["verdict"], "PASS");
    let o = lab(
        &["diagnose", run.to_str().unwrap(), "--check", "collapse_time", "--set", "expected=0.4"],
        out.path(),
    );
    assert_eq!(o.status.code(), Some(1));

    let snap = run.join("snapshots/snapshot_000000.csv");
    let svg = out.path().join("s.svg");
    let o = lab(&["render", snap.to_str().unwrap(), "--output", svg.to_str().unwrap()], out.path());
    assert!(o.status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.contains(" Z\"") && text.contains("class=\"origin\""));
}

#[test]
fn env_var_sets_output_root() {
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_lmcf-lab"))
        .args(["simulate", "--bundled", "stationary_ray"])
        .env("LMCF_LAB_OUT", out.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(out.path().join("stationary_ray/reports/exit_report.json").exists());
}

#[test]
fn canonical_emission_reparses() {
    let out = tempfile::tempdir().unwrap();
    let o = lab(&["simulate", "--bundled", "figure4_sigma", "--emit-canonical"], out.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("cone_param = 0.05"));
    let cfg = out.path().join("canon.toml");
    fs::write(&cfg, &text).unwrap();
    let again = lab(&["simulate", cfg.to_str().unwrap(), "--emit-canonical"], out.path());
    assert_eq!(stdout(&again), text);
}
