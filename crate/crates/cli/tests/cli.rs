mod common;

use common::{invalid_configs, splitkit, write_config, MINIMAL, SEEDED, SLOW};
use tempfile::tempdir;

const HEADER: &str = "k,fpr_sq,objective,dist_ref,gamma_k,lambda_k,elapsed_s";

#[test]
fn converged_run_exits_zero_and_writes_outputs() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", MINIMAL);
    let out = splitkit(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty() && rows.len() <= 1000);
    // record_timing is off, so the elapsed column stays empty
    assert!(rows.iter().all(|r| r.ends_with(',')));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["result"]["status"], "converged");
    let dist = summary["result"]["dist_ref"].as_f64().unwrap();
    assert!(dist <= 1e-8, "dist_ref {dist}");
}

#[test]
fn iteration_cap_exits_two() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "slow.json", SLOW);
    let out = splitkit(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 201);
}

#[test]
fn flags_override_config() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", MINIMAL);
    let out = splitkit(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--max-iter",
        "3",
        "--tol",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 4);
}

#[test]
fn missing_gamma_names_field() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", &MINIMAL.replace("\"gamma\": 1.0, ", ""));
    let out = splitkit(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver.gamma"));
    assert!(!dir.path().join("trace.csv").exists());
}

#[test]
fn unreadable_config_exits_one() {
    let out = splitkit(&["run", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn divergence_exits_three() {
    let dir = tempdir().unwrap();
    // primal-dual steps far beyond the stable range on an unconstrained quadratic
    let text = r#"{
      "problem": {"kind": "three_objective", "params": {"f": {"type": "zero"}, "g": {"type": "zero"}, "target": [1.0]}},
      "solver": {"gamma": 50.0, "variant": "primal_dual", "sigma": 50.0, "max_iter": 100000, "tol": 1e-10}
    }"#;
    let cfg = write_config(dir.path(), "blowup.json", text);
    let out = splitkit(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn same_seed_same_trace() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "seeded.json", SEEDED);
    let mut traces = Vec::new();
    for (sub, seed) in [("a", "42"), ("b", "42"), ("c", "43")] {
        let out_dir = dir.path().join(sub);
        let out = splitkit(&[
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert!(matches!(out.status.code(), Some(0 | 2)));
        traces.push(std::fs::read(out_dir.join("trace.csv")).unwrap());
    }
    assert_eq!(traces[0], traces[1]);
    assert_ne!(traces[0], traces[2]);
}

#[test]
fn validate_accepts_shipped_configs() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let out = splitkit(&["validate", path.to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&out.stdout)
        );
        seen += 1;
    }
    assert!(seen >= 8);
}

#[test]
fn validate_rejects_every_invalid_config() {
    let dir = tempdir().unwrap();
    for (i, (label, text)) in invalid_configs().iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.json"), text);
        let out = splitkit(&["validate", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{label} was accepted");
    }
}

#[test]
fn validate_reports_boundary_message() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "edge.json",
        &MINIMAL.replace("\"gamma\": 1.0", "\"gamma\": 2.0"),
    );
    let out = splitkit(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("gamma must be < 2·beta·epsilon"));
}
