use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qws(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qws")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn analyze_complete_graph_grover() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "k4.json", r#"{"standard": {"kind": "complete", "n": 4}}"#);
    let coins = write(dir.path(), "grover.json", r#"{"kind": "grover"}"#);
    let report = dir.path().join("report.json");
    let out = qws(&["analyze", "--graph", &graph, "--coins", &coins, "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["ledger"]["m_plus"], 1);
    assert_eq!(json["ledger"]["m_minus"], 0);
    assert_eq!(json["ledger"]["dim_L"], 7);
    assert_eq!(json["seed"], 0);
    assert_eq!(json["pass"], true);
}

#[test]
fn analyze_cycle_has_eight_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "c4.json", r#"{"n": 4, "edges": [[0,1],[1,2],[2,3],[3,0]]}"#);
    let coins = write(dir.path(), "grover.json", r#"{"kind": "grover"}"#);
    let out = qws(&["analyze", "--graph", &graph, "--coins", &coins]);
    assert_eq!(code(&out), 0);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["total_eigenvalues"], 8);
    let t_total: u64 = json["t_spectrum"].as_array().unwrap().iter().map(|e| e["mult"].as_u64().unwrap()).sum();
    assert_eq!(t_total, 4);
}

#[test]
fn analyze_rejects_corrupted_coin() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "edge.json", r#"{"n": 2, "edges": [[0,1],[0,1]]}"#);
    // Second matrix is not unitary.
    let coins = write(
        dir.path(),
        "bad.json",
        r#"{"kind": "custom", "p": 1,
            "matrices": [[[[0,0],[1,0]],[[1,0],[0,0]]], [[[0.5,0],[1,0]],[[1,0],[0,0]]]]}"#,
    );
    let out = qws(&["analyze", "--graph", &graph, "--coins", &coins]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("SpectrumViolation"));
}

#[test]
fn analyze_rejects_wrong_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "c4.json", r#"{"standard": {"kind": "cycle", "n": 4}}"#);
    let coins = write(dir.path(), "grover.json", r#"{"kind": "grover", "kappa": [0, 1]}"#);
    let out = qws(&["analyze", "--graph", &graph, "--coins", &coins]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("SpectrumViolation"));
}

#[test]
fn analyze_torus_moving_shift() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(
        dir.path(),
        "torus.json",
        r#"{"standard": {"kind": "torus", "dim": 2, "size": 3}, "shift": {"kind": "moving"}}"#,
    );
    // Certificate of the rewritten coins sigma Gr(4): kappa = -1, p = d - 1.
    let coins = write(dir.path(), "grover.json", r#"{"kind": "grover", "kappa": [-1, 0], "kappa_prime": [1, 0], "p": 1}"#);
    let out = qws(&["analyze", "--graph", &graph, "--coins", &coins]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_input_is_io_error() {
    let out = qws(&["analyze", "--graph", "/nonexistent/g.json", "--coins", "/nonexistent/c.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn lattice_case_ii_d3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bands.csv");
    let out = qws(&["lattice", "--d", "3", "--grid", "4", "--convention", "case_ii", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 65);
    assert_eq!(lines[0].split(',').count(), 3 + 4 + 6 + 3);
}

#[test]
fn lattice_output_is_deterministic() {
    let args = ["lattice", "--d", "2", "--grid", "6", "--convention", "case_i"];
    let a = qws(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_qws")).args(args).env("QWS_THREADS", "1").output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn lattice_rejects_d1_case_i() {
    let out = qws(&["lattice", "--d", "1", "--grid", "4", "--convention", "case_i"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn lattice_rejects_large_grid() {
    let out = qws(&["lattice", "--d", "2", "--grid", "65"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn lattice_zero_row_is_exceptional() {
    let out = qws(&["lattice", "--d", "2", "--grid", "2", "--convention", "case_ii"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    assert_eq!(row[col("k_1")].parse::<f64>().unwrap(), 0.0);
    assert_eq!(row[col("m_minus")], "2");
    assert_eq!(row[col("exceptional")], "true");
}

#[test]
fn verify_default_and_seed_sweep() {
    for seed in 0..10 {
        let out = qws(&["verify", "--seed", &seed.to_string()]);
        assert_eq!(code(&out), 0, "seed {seed}: {}", String::from_utf8_lossy(&out.stdout));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with(&format!("# qws verify seed={seed}")));
        assert!(!text.contains("FAIL"));
    }
}

#[test]
fn verify_corrupt_k_fails_boundary_checks_only() {
    let out = qws(&["verify", "--fault", "corrupt-K"]);
    assert_eq!(code(&out), 3);
    let text = String::from_utf8(out.stdout).unwrap();
    let failed: Vec<&str> = text.lines().filter(|l| l.ends_with("FAIL")).collect();
    assert_eq!(failed.len(), 3);
    assert!(failed[0].starts_with("boundary isometry"));
    assert!(failed[1].starts_with("discriminant K*SK"));
    assert!(failed[2].starts_with("coin factorization"));
}

#[test]
fn charpoly_command() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "k5.json", r#"{"standard": {"kind": "complete", "n": 5}}"#);
    let coins = write(dir.path(), "grover.json", r#"{"kind": "grover"}"#);
    let out = qws(&["charpoly", "--graph", &graph, "--coins", &coins, "--seed", "11"]);
    assert_eq!(code(&out), 0);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["seed"], 11);
    assert!(json["max_relative_deviation"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn nonpositive_tolerance_rejected() {
    let out = qws(&["verify", "--tol", "-1"]);
    assert_eq!(code(&out), 2);
}
