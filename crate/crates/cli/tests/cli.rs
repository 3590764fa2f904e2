use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_centralspin")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL: &str = r#"{"name": "small", "model": {"variant": "collective_no_zeeman", "n_ring": 2},
    "probe": "ring_z_stretched", "time": {"kind": "sensing", "rule": "global_qfi"},
    "sweep": {"axis": "N", "values": [4, 8, 12, 16, 20]}, "methods": ["analytic", "fd_state"]}"#;

#[test]
fn version_names_schema() {
    let out = bin(&["--version"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("centralspin 0.1.0"));
    assert!(text.contains("schema 1"));
}

#[test]
fn run_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = bin(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("meta.json").exists());
    let csv = out_dir.join("small.csv");
    let first = fs::read(&csv).unwrap();

    let again = bin(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--threads", "1"]);
    assert!(again.status.success());
    assert_eq!(fs::read(&csv).unwrap(), first);

    let fit = bin(&["fit", "--input", csv.to_str().unwrap(), "--form", "quad", "--method", "analytic"]);
    assert!(fit.status.success(), "{}", String::from_utf8_lossy(&fit.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fit.stdout).unwrap();
    assert_eq!(report["form"], "linear_plus_quadratic");
    let (a, b) = (report["a"].as_f64().unwrap(), report["b"].as_f64().unwrap());
    assert!((a / b - 4.0).abs() < 1e-8);

    let ambiguous = bin(&["fit", "--input", csv.to_str().unwrap(), "--form", "power_law"]);
    assert_eq!(ambiguous.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = out_dir.to_str().unwrap();

    let bad = write_config(dir.path(), &SMALL.replace("\"analytic\"", "\"nonsense\""));
    assert_eq!(bin(&["run", "--config", &bad, "--out", out]).status.code(), Some(2));
    assert_eq!(bin(&["preset", "fig9", "--out", out]).status.code(), Some(2));
    assert_eq!(bin(&["run"]).status.code(), Some(2));

    let big = write_config(
        dir.path(),
        r#"{"name": "big", "model": {"variant": "ising_ring_central", "n_ring": 20},
        "probe": "ring_z_stretched", "time": {"kind": "fixed", "value": 1.0},
        "sweep": {"axis": "h", "values": [1.0]}, "methods": ["generator_exact"]}"#,
    );
    assert_eq!(bin(&["run", "--config", &big, "--out", out]).status.code(), Some(3));
}
