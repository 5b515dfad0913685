use std::process::Command;

use graphprobe::serialize::{enumerate_specs, Ablation};
use serde_json::{json, Value};

fn graphprobe(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_graphprobe")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

#[test]
fn encode_solve_and_run_with_mocks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = json!({
        "run_id": "cli",
        "models": [{"name": "oracle", "endpoint": "mock://oracle"}, {"name": "mean", "endpoint": "mock://mean_baseline"}],
        "tasks": ["triangles", "graph_energy"],
        "encodings": "replication",
        "relabel_seeds": [0, 1],
        "dataset": {"source": "synthetic", "instances_per_task": 3},
        "output": out,
    });
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    let cfg = path.to_str().unwrap();

    let solved = graphprobe(&["solve", "--config", cfg]);
    assert!(solved.status.success());
    let lines: Vec<Value> =
        String::from_utf8(solved.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l["truth"].is_number() && l["graph"]["edges"].is_array()));

    let corpus = dir.path().join("corpus");
    assert!(graphprobe(&["encode", "--config", cfg, "--out", corpus.to_str().unwrap()]).status.success());
    let manifest = std::fs::read_to_string(corpus.join("manifest.jsonl")).unwrap();
    let first: Value = serde_json::from_str(manifest.lines().next().unwrap()).unwrap();
    let prompt = std::fs::read_to_string(corpus.join(first["file"].as_str().unwrap())).unwrap();
    assert!(prompt.contains("\n\nQuestion: "));
    assert_eq!(manifest.lines().count(), 6 * 2 * enumerate_specs(Ablation::Replication).len());

    let run = graphprobe(&["run", "--config", cfg]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let table = String::from_utf8(run.stdout).unwrap();
    assert!(table.starts_with("task") && table.contains("oracle/"), "{table}");
    for suffix in ["records.jsonl", "report.jsonl", "summary.json", "accuracy.csv", "errors.txt", "config.json"] {
        assert!(out.join(format!("cli.{suffix}")).exists(), "{suffix}");
    }
}

#[test]
fn bad_config_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"models": [], "output": "x", "unexpected": 1}"#).unwrap();
    let out = graphprobe(&["run", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unexpected"));
}
