//! End-to-end checks of the binary: output formats, exit-code discipline,
//! environment-variable handling and the enumeration cache.

use std::path::Path;
use std::process::{Command, Output};

fn disterex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disterex"))
        .args(args)
        .env_remove("DISTEREX_TOL")
        .env_remove("DISTEREX_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn write_graph(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn construct_dot_has_one_node_line_per_vertex() {
    let out = disterex(&[
        "construct",
        "--family",
        "t1",
        "--n",
        "9",
        "--k",
        "3",
        "--format",
        "dot",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("graph g {"));
    let nodes = text
        .lines()
        .filter(|l| l.trim_end().ends_with(';') && !l.contains("--"))
        .count();
    let edges = text.lines().filter(|l| l.contains("--")).count();
    assert_eq!(nodes, 9);
    assert_eq!(edges, 8);
}

#[test]
fn construct_t2_without_pendants_is_the_path() {
    let out = disterex(&["construct", "--family", "t2", "--n", "5", "--k", "2"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["n"], 5);
    assert_eq!(
        json["edges"],
        serde_json::json!([[0, 1], [1, 2], [2, 3], [3, 4]])
    );
}

#[test]
fn construct_rejects_bad_parameters() {
    let out = disterex(&["construct", "--family", "t1", "--n", "6", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = disterex(&["construct", "--family", "t1", "--n", "6"]);
    assert_eq!(out.status.code(), Some(2));
    let out = disterex(&["construct", "--family", "nope", "--n", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("star.json");
    let out = disterex(&[
        "construct",
        "--family",
        "star",
        "--n",
        "5",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(json["n"], 5);
}

#[test]
fn rho_reports_certified_values() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write_graph(dir.path(), "p3.json", r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
    let out = disterex(&["rho", &p3]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("rho: 2.7320508076"), "{text}");
    assert!(text.contains("bounds: ["));
    assert!(text.contains("perron: ["));
    assert!(text.contains("iterations:"));

    let k13 = write_graph(
        dir.path(),
        "k13.json",
        r#"{"n":4,"edges":[[0,1],[0,2],[0,3]]}"#,
    );
    let out = disterex(&["rho", &k13]);
    assert!(stdout(&out).contains("rho: 4.6457513111"));
}

#[test]
fn rho_single_vertex_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let k1 = write_graph(dir.path(), "k1.json", r#"{"n":1,"edges":[]}"#);
    let out = disterex(&["rho", &k1]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("rho: 0.0000000000"));
}

#[test]
fn rho_rejects_disconnected_input_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_graph(dir.path(), "bad.json", r#"{"n":4,"edges":[[0,1],[2,3]]}"#);
    let out = disterex(&["rho", &bad]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("not connected"), "{stderr}");
}

#[test]
fn rho_rejects_missing_and_malformed_files_with_exit_3() {
    let out = disterex(&["rho", "/nonexistent/graph.json"]);
    assert_eq!(out.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let junk = write_graph(dir.path(), "junk.json", "not json");
    let out = disterex(&["rho", &junk]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn enumerate_counts() {
    let out = disterex(&["enumerate", "--n", "10", "--count-only"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "106");

    let out = disterex(&["enumerate", "--n", "6", "--d", "3", "--count-only"]);
    assert_eq!(stdout(&out).trim(), "2");

    let out = disterex(&["enumerate", "--n", "6", "--d", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumerate_listing_is_sorted_json_lines() {
    let out = disterex(&["enumerate", "--n", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["n"], 5);
    }
}

#[test]
fn enumerate_uses_the_cache_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cache_flag = dir.path().to_str().unwrap();
    let out = disterex(&[
        "enumerate",
        "--n",
        "7",
        "--d",
        "3",
        "--count-only",
        "--cache-dir",
        cache_flag,
    ]);
    assert!(out.status.success());
    assert!(dir.path().join("trees/n7/d3.json").is_file());

    // second run answers from the cache and agrees
    let again = disterex(&[
        "enumerate",
        "--n",
        "7",
        "--d",
        "3",
        "--count-only",
        "--cache-dir",
        cache_flag,
    ]);
    assert_eq!(stdout(&out), stdout(&again));
}

#[test]
fn cache_dir_environment_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_disterex"))
        .args(["enumerate", "--n", "6", "--d", "4", "--count-only"])
        .env("DISTEREX_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("trees/n6/d4.json").is_file());
}

#[test]
fn verify_single_instances_pass() {
    let out = disterex(&["verify", "lemma2.3", "--k", "3", "--n", "12"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("result: PASS"));

    let out = disterex(&["verify", "lemma2.4", "--k", "2", "--n", "7"]);
    assert!(out.status.success());
}

#[test]
fn verify_rejects_bad_parameters_with_exit_2() {
    let out = disterex(&["verify", "theorem", "--n-max", "40"]);
    assert_eq!(out.status.code(), Some(2));
    let out = disterex(&["verify", "lemma9.9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = disterex(&["verify", "lemma2.3", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = disterex(&["verify", "lemma2.1", "--csv", "/tmp/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_theorem_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let csv = dir.path().join("summary.csv");
    let out = disterex(&[
        "verify",
        "theorem",
        "--n-max",
        "8",
        "--report",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("result: PASS"), "{text}");

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["scope"], "theorem");
    assert_eq!(json["failures"], serde_json::json!([]));
    assert!(json.get("wall_time_ms").is_none());

    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("n,d,class_size,min_rho,runner_up_rho,gap,minimizer_code"));
    // classes for n = 4..8: (n-2) rows each
    assert_eq!(csv_text.lines().count(), 1 + 2 + 3 + 4 + 5 + 6);
}

#[test]
fn tolerance_flag_reaches_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let p4 = write_graph(
        dir.path(),
        "p4.json",
        r#"{"n":4,"edges":[[0,1],[1,2],[2,3]]}"#,
    );
    let loose = disterex(&["rho", &p4, "--tol", "1e-3"]);
    let tight = disterex(&["rho", &p4, "--tol", "1e-12"]);
    assert!(loose.status.success() && tight.status.success());
    let its = |o: &Output| -> usize {
        stdout(o)
            .lines()
            .find(|l| l.starts_with("iterations:"))
            .and_then(|l| l.split(": ").nth(1))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(its(&loose) < its(&tight));
}
