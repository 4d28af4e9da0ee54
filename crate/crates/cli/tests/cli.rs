use std::path::PathBuf;
use std::process::{Command, Output};

fn verdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verdec")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = verdec(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("verdec-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn field(line: &str, i: usize) -> f64 {
    line.split(',').nth(i).unwrap().parse().unwrap()
}

#[test]
fn simulate_writes_csv_and_json() {
    let dir = scratch("simulate");
    let cfg = dir.join("config.json");
    std::fs::write(
        &cfg,
        r#"{"ensembles":[{"j":3,"k":6,"n":120}],"sparsity":[0,10],"decoders":["lm1","lm2nb"],"trials":4,"base_seed":3}"#,
    )
    .unwrap();
    let csv = dir.join("out.csv");
    let args = ["simulate", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap(), "--threads", "2"];
    stdout(&args);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "decoder,j,k,n,m,num_nonzero,trials,successes,mean_iters,fv_count");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("lm1,3,6,120,60,0,4,4,"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json["config"]["base_seed"], 3);

    stdout(&args);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), text);
    let piped = stdout(&["simulate", "--config", cfg.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(piped, text);
    let reseeded = stdout(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "4"]);
    assert_eq!(reseeded.lines().count(), 5);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn de_thresholds() {
    let text = stdout(&["de", "--ensemble", "3,6", "--family", "bec", "--family", "lm2mb"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,j,k,threshold");
    assert!(lines[1].starts_with("bec,3,6,"));
    assert!((field(lines[1], 3) - 0.4294).abs() < 0.001);
    assert!((field(lines[2], 3) - 0.2101).abs() < 0.001);
}

#[test]
fn scaling_ratios() {
    let text = stdout(&["scaling", "--ensemble", "3,64", "--family", "bec"]);
    let line = text.lines().nth(1).unwrap();
    assert!((field(line, 5) - 1.0).abs() < 0.05, "{line}");
}

#[test]
fn threshold_constants() {
    let text = stdout(&["threshold", "--ensemble", "3,6", "--family", "bec", "--family", "lm1"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,j,alpha_bar,interior_optimum,gamma0");
    assert!((field(lines[1], 2) - 0.8184).abs() < 1e-4);
    assert!((field(lines[2], 2) - 1.87321).abs() < 1e-4);
    assert!(field(lines[2], 4) > 0.0);
}

#[test]
fn stopping_curves() {
    let dir = scratch("stopping");
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, r#"{"mode":"stopping","ensembles":[{"j":3,"k":6,"n":6}],"grid_points":5}"#).unwrap();
    let text = stdout(&["stopping", "--config", cfg.to_str().unwrap(), "--family", "bec"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 5 + 1);
    let ratio: f64 = lines[6].rsplit('=').next().unwrap().parse().unwrap();
    assert!((ratio - 0.018).abs() < 0.001);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn infobound_row() {
    let text = stdout(&["infobound", "--ensemble", "3,6"]);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("3,"));
}

#[test]
fn bad_inputs_fail() {
    assert!(!verdec(&["simulate"]).status.success());
    assert!(!verdec(&["de", "--ensemble", "3"]).status.success());
    assert!(!verdec(&["de", "--family", "nope"]).status.success());
    assert!(!verdec(&["de", "--config", "/nonexistent/verdec.json"]).status.success());
    assert!(!verdec(&["frobnicate"]).status.success());
}
