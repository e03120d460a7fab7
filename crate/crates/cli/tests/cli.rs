use std::process::{Command, Output};

fn qtm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtm")).args(args).output().expect("binary runs")
}

fn value(out: &Output, key: &str) -> f64 {
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().find(|l| l.starts_with(&format!("{key}="))).expect("key present");
    line[key.len() + 1..].parse().unwrap()
}

const SWEEP: &str = r#"
t_h = 1.0
u = 100
gamma_c = 1e-3
gamma_h = 0.1
t_c = 0.01
gamma_det = 1.0
lam = 100.0
feedback = "general"

[axis_x]
param = "g"
scale = "log"
min = 1e-5
max = 1e-2
count = 5

[axis_y]
param = "t_h"
scale = "log"
min = 0.1
max = 10.0
count = 3
"#;

#[test]
fn steady_ideal_optimum() {
    let out = qtm(&["steady", "g=0.3535533905932738", "gamma_c=1", "gamma_h=2e6", "t_h=1", "feedback=ideal"]);
    assert!(out.status.success());
    assert!((value(&out, "concurrence") - 0.5f64.sqrt()).abs() < 1e-3);
    assert!((value(&out, "q_dot_c") + value(&out, "q_dot_h")).abs() < 1e-12);
}

#[test]
fn steady_rejects_bad_input() {
    assert_eq!(qtm(&["steady", "t_c=2", "t_h=1"]).status.code(), Some(2));
    assert_eq!(qtm(&["steady", "bogus=1"]).status.code(), Some(2));
    assert_eq!(qtm(&["steady", "--config", "/nonexistent.toml"]).status.code(), Some(2));
}

#[test]
fn sweep_writes_csv_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(&cfg, SWEEP).unwrap();
    let a = dir.path().join("a.csv");
    let out = qtm(&["sweep", "-c", cfg.to_str().unwrap(), "-o", a.to_str().unwrap(), "workers=1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = qtm(&["sweep", "-c", cfg.to_str().unwrap(), "workers=3"]);
    let file = std::fs::read(&a).unwrap();
    assert_eq!(file, stdout.stdout);
    let text = String::from_utf8(file).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x_value,y_value,concurrence,chsh,fidelity,q_dot_c,error");
    assert_eq!(lines.count(), 15);
}

#[test]
fn sweep_requires_axes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("point.toml");
    std::fs::write(&cfg, "g = 0.1\nt_h = 1.0\n").unwrap();
    assert_eq!(qtm(&["sweep", "-c", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn qfpme_point_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("p.csv");
    let out = qtm(&[
        "qfpme", "--points", "201", "--dump", dump.to_str().unwrap(),
        "g=3.5e-4", "gamma_c=1e-3", "gamma_h=0.1", "t_h=1", "gamma_det=1", "lam=100", "feedback=general",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((value(&out, "total_trace") - 1.0).abs() < 1e-9);
    assert!(value(&out, "trace_distance_reduced") < 1e-2);
    let rows = std::fs::read_to_string(&dump).unwrap().lines().count();
    assert_eq!(rows, 202);
    // projective limit has no detector coordinate
    assert_eq!(qtm(&["qfpme", "t_h=1", "g=0.1"]).status.code(), Some(2));
}

#[test]
fn validate_reports_and_exit_codes() {
    let out = qtm(&["validate", "oracles"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).lines().last().unwrap().starts_with("PASS oracles"));
    assert_eq!(qtm(&["validate", "nope"]).status.code(), Some(2));
}
