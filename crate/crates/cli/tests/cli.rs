//! End-to-end tests of the `relaycap` binary: exit codes, output formats
//! and determinism of the emitted artifacts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relaycap"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn point_cutset_without_relay_power() {
    let out = run(&[
        "point", "--p1", "1", "--p2", "0", "--q", "1", "--n2", "1", "--n3", "1", "--bounds",
        "cutset",
    ]);
    let v = stdout_json(&out);
    let value = v["bounds"]["cutset"]["value_bits"].as_f64().unwrap();
    assert!((value - 0.5).abs() < 1e-9);
}

#[test]
fn point_rejects_empty_bounds_with_exit_2() {
    let out = run(&[
        "point", "--p1", "1", "--p2", "1", "--q", "1", "--n2", "1", "--n3", "1", "--bounds", "",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no bounds requested"));
}

#[test]
fn point_rejects_unknown_bound_and_csv_format() {
    let out = run(&[
        "point", "--p1", "1", "--p2", "1", "--q", "1", "--n2", "1", "--n3", "1", "--bounds", "nope",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "point", "--p1", "1", "--p2", "1", "--q", "1", "--n2", "1", "--n3", "1", "--bounds",
        "cutset", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_channel_parameter_is_input_error() {
    let out = run(&["point", "--p1", "1", "--bounds", "cutset"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing channel parameter"));
}

#[test]
fn sweep_is_byte_deterministic() {
    let args = [
        "sweep",
        "--axis",
        "snr_db",
        "--from",
        "-10",
        "--to",
        "10",
        "--points",
        "5",
        "--p1",
        "10",
        "--p2-db",
        "5",
        "--q-db",
        "30",
        "--n3",
        "10",
        "--bounds",
        "thm4,cutset,asymptotes",
        "--grid",
        "41",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "axis_value,bound_name,value_bits,term1,term2,argmax1,argmax2,argmax3,error"
    );
    assert_eq!(text.lines().count(), 1 + 5 * 5);
}

#[test]
fn sweep_json_format_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.json");
    let out = run(&[
        "sweep",
        "--axis",
        "q",
        "--from",
        "1",
        "--to",
        "2",
        "--points",
        "2",
        "--p1",
        "1",
        "--p2",
        "1",
        "--n2",
        "1",
        "--n3",
        "1",
        "--bounds",
        "thm4",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
        "--grid",
        "21",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
}

#[test]
fn db_flags_match_linear_flags() {
    let linear = run(&[
        "point",
        "--p1",
        "10",
        "--p2",
        "3.1622776601683795",
        "--q",
        "1000",
        "--n2",
        "10",
        "--n3",
        "10",
        "--bounds",
        "thm4",
    ]);
    let db = run(&[
        "point", "--p1-db", "10", "--p2-db", "5", "--q-db", "30", "--n2-db", "10", "--n3-db", "10",
        "--bounds", "thm4",
    ]);
    let a = stdout_json(&linear)["bounds"]["thm4"]["value_bits"]
        .as_f64()
        .unwrap();
    let b = stdout_json(&db)["bounds"]["thm4"]["value_bits"]
        .as_f64()
        .unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn config_file_supplies_channel_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"channel": {"p1": 1.0, "p2_db": 0.0, "q": 1.0, "n2": 1.0, "n3": 1.0}}"#,
    )
    .unwrap();
    let out = run(&[
        "point",
        "--config",
        cfg.to_str().unwrap(),
        "--bounds",
        "cutset",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["channel"]["p2"].as_f64().unwrap(), 1.0);
    // flag overrides the config value
    let out = run(&[
        "point",
        "--config",
        cfg.to_str().unwrap(),
        "--p2",
        "0",
        "--bounds",
        "cutset",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["channel"]["p2"].as_f64().unwrap(), 0.0);
    // contradictory config is invalid input
    std::fs::write(
        &cfg,
        r#"{"channel": {"p1": 1.0, "p1_db": 0.0, "p2": 1.0, "q": 1.0, "n2": 1.0, "n3": 1.0}}"#,
    )
    .unwrap();
    let out = run(&[
        "point",
        "--config",
        cfg.to_str().unwrap(),
        "--bounds",
        "cutset",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dm_eval_fixture_rates() {
    let fixture = fixtures().join("thm2_noiseless_binary.json");
    let out = run(&[
        "dm",
        "eval",
        "--theorem",
        "2",
        "--input",
        fixture.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert!((v["rate_bits"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let fixture = fixtures().join("thm1_classic_df.json");
    let out = run(&[
        "dm",
        "eval",
        "--theorem",
        "1",
        "--input",
        fixture.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert!(v["rate_bits"].is_null());
    assert!(!v["feasible"].as_bool().unwrap());
}

#[test]
fn dm_eval_rejects_bad_theorem_and_missing_file() {
    let fixture = fixtures().join("thm2_noiseless_binary.json");
    let out = run(&[
        "dm",
        "eval",
        "--theorem",
        "3",
        "--input",
        fixture.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "dm",
        "eval",
        "--theorem",
        "2",
        "--input",
        "/no/such/file.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dm_search_finds_noiseless_optimum() {
    let fixture = fixtures().join("thm2_channel_noiseless.json");
    let out = run(&[
        "dm",
        "search",
        "--theorem",
        "2",
        "--channel",
        fixture.to_str().unwrap(),
        "--sizes",
        "u=2,ur=2,x=2",
        "--restarts",
        "4",
        "--seed",
        "0",
    ]);
    let v = stdout_json(&out);
    assert!(v["best_rate_bits"].as_f64().unwrap() >= 1.0 - 1e-6);
    // theorem 1 has no search
    let out = run(&[
        "dm",
        "search",
        "--theorem",
        "1",
        "--channel",
        fixture.to_str().unwrap(),
        "--sizes",
        "u=2,ur=2,x=2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_targets() {
    let dir = tempfile::tempdir().unwrap();
    let thm5 = dir.path().join("thm5.json");
    std::fs::write(
        &thm5,
        r#"{"channel": {"p1": 1.0, "p2": 1.0, "q": 1.0, "n2": 1.0, "n3": 1.0},
           "beta": 0.8, "gamma": 0.4, "alpha": 0.3}"#,
    )
    .unwrap();
    let out = run(&[
        "validate",
        "--target",
        "thm5",
        "--params",
        thm5.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert!(v["max_abs_diff"].as_f64().unwrap() < 1e-9);

    let thm4 = dir.path().join("thm4.json");
    std::fs::write(
        &thm4,
        r#"{"channel": {"p1": 1.0, "p2": 1.0, "q": 1.0, "n2": 1.0, "n3": 1.0}, "gamma": 0.5}"#,
    )
    .unwrap();
    let out = run(&[
        "validate",
        "--target",
        "thm4",
        "--params",
        thm4.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert!(v["max_abs_diff"].as_f64().unwrap() < 1e-10);

    let samp = dir.path().join("samp.json");
    std::fs::write(
        &samp,
        r#"{"names": ["a", "b"], "cov": [[1.0, 0.3], [0.3, 1.0]]}"#,
    )
    .unwrap();
    let out = run(&[
        "validate",
        "--target",
        "sampling",
        "--params",
        samp.to_str().unwrap(),
        "--samples",
        "20000",
        "--seed",
        "1",
    ]);
    let v = stdout_json(&out);
    assert!(v["max_abs_deviation"].as_f64().unwrap() < 0.05);

    let out = run(&[
        "validate",
        "--target",
        "bogus",
        "--params",
        samp.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evaluator_failure_maps_to_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let thm5 = dir.path().join("thm5.json");
    // alpha far outside the feasible interval: evaluation refuses
    std::fs::write(
        &thm5,
        r#"{"channel": {"p1": 1.0, "p2": 1.0, "q": 1.0, "n2": 1.0, "n3": 1.0},
           "beta": 0.8, "gamma": 0.4, "alpha": 7.9}"#,
    )
    .unwrap();
    let out = run(&[
        "validate",
        "--target",
        "thm5",
        "--params",
        thm5.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("feasible"));
}
