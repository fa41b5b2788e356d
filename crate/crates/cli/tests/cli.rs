//! End-to-end CLI behavior: exit codes, file outputs, generator round
//! trips and byte-level determinism.

use std::path::Path;
use std::process::Command;

fn harmap() -> Command {
    Command::new(env!("CARGO_BIN_EXE_harmap"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const PATH_CONFIG: &str = r#"
[graph]
kind = "path"
n = 5
eps = 1.5

[target]
kind = "euclidean"
dim = 1

[boundary]
kind = "explicit"
vertices = [0, 4]
values = [{ euclidean = [0.0] }, { euclidean = [1.0] }]

[tolerances]
tol = 1e-11
seed = 0
"#;

#[test]
fn solve_writes_reports_matching_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("problem.toml");
    write(&config, PATH_CONFIG);
    let out = dir.path().join("out");
    let status = harmap()
        .args(["solve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let solution: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("solution.json")).unwrap()).unwrap();
    let values = solution["values"].as_array().unwrap();
    let expected = [0.0, 2.0 / 9.0, 0.5, 7.0 / 9.0, 1.0];
    for (value, expected) in values.iter().zip(expected) {
        let got = value["euclidean"][0].as_f64().unwrap();
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["task"], "solve");
    assert!(summary["conventions"]
        .as_str()
        .unwrap()
        .contains("no global 1/2"));
    assert!(out.join("energy_density.csv").exists());
    assert!(out.join("solve_report.json").exists());
}

#[test]
fn malformed_config_fails_with_field_message() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("broken.toml");
    write(
        &config,
        "[graph]\nkind = \"path\"\nn = 5\neps = 1.5\nbogus_field = 3\n[target]\nkind = \"euclidean\"\ndim = 1\n",
    );
    let output = harmap()
        .args(["solve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("bogus_field"), "stderr: {stderr}");
}

#[test]
fn numeric_failure_exits_with_diagnostic_payload() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("badeps.toml");
    // eps below the nearest-neighbor distance: empty punctured balls
    write(
        &config,
        PATH_CONFIG.replace("eps = 1.5", "eps = 0.5").as_str(),
    );
    let output = harmap()
        .args(["solve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    let payload: serde_json::Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert!(payload["error"].as_str().unwrap().contains("punctured"));
}

#[test]
fn missing_boundary_section_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("nobound.toml");
    write(
        &config,
        "[graph]\nkind = \"path\"\nn = 5\neps = 1.5\n[target]\nkind = \"euclidean\"\ndim = 1\n",
    );
    let output = harmap()
        .args(["solve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("[boundary]"));
}

#[test]
fn gen_graph_roundtrips_through_file_configs() {
    let dir = tempfile::tempdir().unwrap();
    let gen_out = dir.path().join("graph");
    let status = harmap()
        .args([
            "gen-graph",
            "--kind",
            "grid",
            "--n",
            "3",
            "--m",
            "3",
            "--out",
        ])
        .arg(&gen_out)
        .status()
        .unwrap();
    assert!(status.success());

    let config = dir.path().join("file.toml");
    write(
        &config,
        r#"
[graph]
kind = "file"
edges_file = "graph/edges.txt"
measure_file = "graph/measure.txt"
eps = 1.1

[target]
kind = "euclidean"
dim = 1

[boundary]
kind = "explicit"
vertices = [0, 8]
values = [{ euclidean = [0.0] }, { euclidean = [1.0] }]
"#,
    );
    let status = harmap()
        .args(["solve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn flow_writes_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("problem.toml");
    write(
        &config,
        &format!("{PATH_CONFIG}\n[task]\nh = 0.1\nsteps = 50\nconstrained = true\n"),
    );
    let out = dir.path().join("out");
    let status = harmap()
        .args(["flow", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("step,time,energy,displacement\n"));
    assert!(csv.lines().count() > 2);
}

#[test]
fn seed_override_changes_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("problem.toml");
    write(&config, PATH_CONFIG);
    let out = dir.path().join("out");
    let status = harmap()
        .args(["solve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .args(["--seed", "42"])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 42);
}
