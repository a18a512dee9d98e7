use std::path::Path;
use std::process::{Command, Output};

fn ggm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn space_grid_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ggm(&["space", "--grid", "64", "--check", "all"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["c_d"].as_f64().unwrap() <= 3.0);
}

#[test]
fn space_source_is_required_and_dim_needs_grid() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ggm(&["space", "--dim", "2"], dir.path()).status.code(), Some(2));
    assert_eq!(ggm(&["space", "--circle", "8", "--dim", "2"], dir.path()).status.code(), Some(2));
    assert_eq!(ggm(&["space", "--grid", "8", "--circle", "8"], dir.path()).status.code(), Some(2));
    assert_eq!(ggm(&["space", "--grid", "6", "--dim", "2"], dir.path()).status.code(), Some(0));
}

#[test]
fn malformed_space_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"n\": 2,\n \"dist\": [[0, 1]\n").unwrap();
    let out = ggm(&["space", "--space", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn triangle_violation_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tri.json"),
        r#"{"n":3,"dist":[[0,1,5],[1,0,1],[5,1,0]],"weight":[1,1,1],"ct":1,"cs":1}"#,
    )
    .unwrap();
    let out = ggm(&["space", "--space", "tri.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["pass"], false);
    assert!(v["violation"].as_str().unwrap().contains("d(0,2)"));
}

#[test]
fn norm_records() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("f.json"), "[1, 0, 0]").unwrap();
    let out = ggm(&["norm", "--grid", "3", "--f", "f.json", "--norm", "morrey", "--p", "1", "--lambda", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["norm"], "morrey");
    assert!((v["value"].as_f64().unwrap() - 3f64.powf(-0.5)).abs() < 1e-12);
    assert_eq!(v["argmax"]["center"], 0);
    assert_eq!(v["argmax"]["radius_rank"], 0);

    std::fs::write(dir.path().join("zero.csv"), "value\n0\n0\n0\n0\n").unwrap();
    let out = ggm(
        &["norm", "--circle", "4", "--f", "zero.csv", "--norm", "grand_morrey", "--p", "2", "--lambda", "0.25", "--theta", "1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["value"], 0.0);

    let out = ggm(&["norm", "--grid", "3", "--f", "f.json", "--norm", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = ggm(&["norm", "--grid", "4", "--f", "f.json", "--norm", "lp", "--p", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2), "length mismatch is an input error");
}

#[test]
fn op_records() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("f.json"), "[0, 1]").unwrap();
    let out = ggm(&["op", "--grid", "2", "--f", "f.json", "--op", "potential", "--alpha", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["op"], "potential");
    assert!((v["values"][0].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);

    let out = ggm(&["op", "--grid", "2", "--f", "f.json", "--op", "maximal", "--format", "csv"], dir.path());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "index,value\n0,0.5\n1,1\n");

    std::fs::write(dir.path().join("b.json"), "[3, 3]").unwrap();
    let out = ggm(
        &["op", "--grid", "2", "--f", "f.json", "--op", "commutator", "--b", "b.json", "--inner", "potential", "--alpha", "0.5"],
        dir.path(),
    );
    let v = json(&out);
    assert!(v["values"].as_array().unwrap().iter().all(|x| x.as_f64().unwrap().abs() < 1e-12));
}

#[test]
fn verify_exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.json"), r#"{"checks": []}"#).unwrap();
    let out = ggm(&["verify", "--config", "empty.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no checks selected"));

    std::fs::write(dir.path().join("typo.json"), r#"{"chekcs": ["eta_identity"]}"#).unwrap();
    assert_eq!(ggm(&["verify", "--config", "typo.json"], dir.path()).status.code(), Some(2));

    std::fs::write(dir.path().join("eta.json"), r#"{"checks": ["eta_identity", "aux_values"]}"#).unwrap();
    let out = ggm(&["verify", "--config", "eta.json", "--out", "reports"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out).as_array().unwrap().len(), 3);
    assert!(dir.path().join("reports/reports.json").exists());
    let csv = std::fs::read_to_string(dir.path().join("reports/summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    // An impossible tolerance makes the same check fail.
    std::fs::write(
        dir.path().join("strict.json"),
        r#"{"checks": ["aux_values"], "tolerances": {"psi_slope": 0.0}}"#,
    )
    .unwrap();
    assert_eq!(ggm(&["verify", "--config", "strict.json"], dir.path()).status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = ggm(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verify"));
}
