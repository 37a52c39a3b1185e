//! End-to-end tests of the `lpp` binary: flag parsing, config-file
//! precedence, exit codes, artifact shape, and byte-level reproducibility.

use std::fs;
use std::process::{Command, Output};

use lpp::graph::{GraphWindow, WindowInstance};
use lpp::passage::{geodesic, GeodesicReport};

fn lpp_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lpp"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = lpp_cmd().args(args).output().expect("spawn lpp");
    assert!(
        out.status.success(),
        "lpp {args:?} failed with {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("artifact is JSON")
}

#[test]
fn geometric_grid_expands_to_the_documented_sequence() {
    let out = run_ok(&[
        "scaling",
        "--dist",
        "const:v=1",
        "--p",
        "1",
        "--n-grid",
        "100:10000:x2",
        "--trials",
        "2",
        "--seed",
        "7",
    ]);
    let artifact = stdout_json(&out);
    assert_eq!(
        artifact["config"]["n_grid"],
        serde_json::json!([100, 200, 400, 800, 1600, 3200, 6400])
    );
    assert_eq!(artifact["tool"]["name"], "lpp");
}

#[test]
fn flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{ "dist": "exp:rate=1", "p": 1.0, "n_grid": [20, 40], "trials": 100, "seed": 3 }"#,
    )
    .unwrap();
    let out = run_ok(&[
        "slln",
        "--config",
        config.to_str().unwrap(),
        "--trials",
        "6",
    ]);
    let artifact = stdout_json(&out);
    assert_eq!(artifact["config"]["trials"], 6);
    assert_eq!(artifact["config"]["seed"], 3);
}

#[test]
fn unknown_config_keys_are_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{ "trils": 5 }"#).unwrap();
    let out = lpp_cmd()
        .args(["slln", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("trils"), "stderr: {stderr}");
}

#[test]
fn missing_required_key_is_a_usage_error() {
    let out = lpp_cmd()
        .args(["slln", "--dist", "exp:rate=1", "--p", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("n_grid"), "stderr: {stderr}");
}

#[test]
fn moment_gate_refusal_exits_3() {
    let out = lpp_cmd()
        .args([
            "clt",
            "--dist",
            "pareto:s=2.5",
            "--p",
            "1",
            "--n",
            "60",
            "--trials",
            "3",
            "--seed",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("third moment"), "stderr: {stderr}");
}

#[test]
fn gen_materialize_enumerates_all_candidate_edges() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instance.json");
    run_ok(&[
        "gen",
        "--n",
        "5",
        "--dist",
        "const:v=1",
        "--p",
        "1",
        "--seed",
        "0",
        "--materialize",
        "--output",
        path.to_str().unwrap(),
    ]);
    let artifact: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let edges = artifact["instance"]["edges"].as_array().unwrap();
    // All C(6, 2) vertex pairs carry an edge at p = 1.
    assert_eq!(edges.len(), 15);
    assert_eq!(artifact["config"]["materialize"], true);
}

#[test]
fn passage_on_saved_instance_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instance.json");
    run_ok(&[
        "gen",
        "--n",
        "8",
        "--dist",
        "exp:rate=1",
        "--p",
        "0.7",
        "--seed",
        "9",
        "--materialize",
        "--output",
        path.to_str().unwrap(),
    ]);

    let out = run_ok(&["passage", "--instance", path.to_str().unwrap()]);
    let artifact = stdout_json(&out);
    let cli_report: GeodesicReport =
        serde_json::from_value(artifact["report"].clone()).unwrap();

    let saved: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let instance: WindowInstance =
        serde_json::from_value(saved["instance"].clone()).unwrap();
    let window = GraphWindow::from_instance(instance).unwrap();
    let expected = geodesic(&window, 0, 8);
    assert_eq!(cli_report, expected);
}

#[test]
fn rerun_is_byte_identical_and_worker_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, workers: &str| -> Vec<u8> {
        let path = dir.path().join(name);
        let out = lpp_cmd()
            .env("LPP_WORKERS", workers)
            .args([
                "compare",
                "--s",
                "1.5",
                "--p",
                "1",
                "--n-grid",
                "20,40",
                "--trials",
                "10",
                "--k",
                "50",
                "--seed",
                "11",
                "--output",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        fs::read(&path).unwrap()
    };
    let first = write("a.json", "1");
    let second = write("b.json", "1");
    let quad = write("c.json", "4");
    assert_eq!(first, second);
    assert_eq!(first, quad);
}

#[test]
fn csv_projection_has_comment_header_and_rows() {
    let out = run_ok(&[
        "slln",
        "--dist",
        "const:v=1",
        "--p",
        "1",
        "--n-grid",
        "10,20",
        "--trials",
        "3",
        "--seed",
        "2",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# lpp "));
    assert!(lines.next().unwrap().starts_with("# config:"));
    assert_eq!(lines.next(), Some("n,stat,mean,lo,hi"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn csv_is_rejected_where_no_projection_exists() {
    let out = lpp_cmd()
        .args([
            "gen",
            "--n",
            "3",
            "--dist",
            "const:v=1",
            "--p",
            "1",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn renewals_auto_c_is_echoed_with_its_range() {
    let out = run_ok(&[
        "renewals",
        "--dist",
        "uniform:a=1,b=3",
        "--p",
        "1",
        "--n",
        "200",
        "--seed",
        "5",
    ]);
    let artifact = stdout_json(&out);
    // uniform(1, 3) at p = 1: admissible range (1, 2), midpoint 1.5.
    assert_eq!(artifact["config"]["c"], 1.5);
    assert_eq!(artifact["config"]["c_auto"], true);
    assert_eq!(artifact["report"]["c_range"]["low"], 1.0);
    assert_eq!(artifact["report"]["c_range"]["high"], 2.0);
    assert_eq!(artifact["config"]["horizon"], 10);
}

#[test]
fn continuum_reports_increment_within_bound() {
    let out = run_ok(&["continuum", "--s", "1.5", "--k", "400", "--seed", "3"]);
    let artifact = stdout_json(&out);
    let report = &artifact["report"];
    assert!(report["wk"].as_f64().unwrap() >= report["wk_half"].as_f64().unwrap());
    assert_eq!(report["bound_holds"], true);
}

#[test]
fn invalid_worker_env_is_a_usage_error() {
    let out = lpp_cmd()
        .env("LPP_WORKERS", "zero")
        .args(["continuum", "--s", "1.5", "--k", "10", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
