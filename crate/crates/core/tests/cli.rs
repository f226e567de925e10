use std::path::Path;
use std::process::{Command, Output};

use febe::blockenc::Manifest;
use febe::circuit::parse_text;
use tempfile::TempDir;

fn febe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_febe")).args(args).env_remove("FEBE_JOBS").output().expect("binary runs")
}

fn febe_env(args: &[&str], jobs: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_febe")).args(args).env("FEBE_JOBS", jobs).output().expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn ok(out: &Output) {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn hubbard_manifest(dir: &TempDir) -> String {
    let spec = path(dir, "h.json");
    let man = path(dir, "m.json");
    ok(&febe(&["gen", "--model", "hubbard", "--n", "4", "-o", &spec]));
    ok(&febe(&["encode", "-i", &spec, "--class", "eta-one-body", "--eta", "2", "--m-b", "5", "--lambda", "auto", "-o", &man]));
    man
}

#[test]
fn gen_encode_verify_pipeline() {
    let dir = TempDir::new().unwrap();
    let man = hubbard_manifest(&dir);
    let out = febe(&["verify", "-i", &man]);
    ok(&out);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["columns_checked"], 6);
}

#[test]
fn estimate_select_swap() {
    let out = febe(&["estimate", "--class", "select-swap", "--L", "16", "--lambda", "4", "--m-b", "1"]);
    ok(&out);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["t"], 48.0);
    assert_eq!(v["lambda"], 4);
}

#[test]
fn estimate_encoder_class() {
    let out = febe(&["estimate", "--class", "ti", "--n", "8", "--m-b", "4"]);
    ok(&out);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["alpha"], 64.0);
    assert!(v["counted"]["t_count"].as_u64().unwrap() > 0);
    assert!(v["reconcile"]["ratio_t"].as_f64().unwrap() > 0.0);
}

#[test]
fn tampered_manifest_fails_verification() {
    let dir = TempDir::new().unwrap();
    let man = hubbard_manifest(&dir);
    let mut m: Manifest = serde_json::from_str(&std::fs::read_to_string(&man).unwrap()).unwrap();
    let k = m.table.words.iter().position(|&w| w != 0).unwrap();
    m.table.words[k] ^= 0b10;
    std::fs::write(&man, serde_json::to_string(&m).unwrap()).unwrap();
    let out = febe(&["verify", "-i", &man]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn garbled_manifest_exits_one() {
    let dir = TempDir::new().unwrap();
    let man = hubbard_manifest(&dir);
    let text = std::fs::read_to_string(&man).unwrap().replace("\"alpha\": 16.0", "\"alpha\": 15.0");
    std::fs::write(&man, text).unwrap();
    assert_eq!(febe(&["verify", "-i", &man]).status.code(), Some(1));
}

#[test]
fn flag_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "h.json");
    ok(&febe(&["gen", "--model", "hubbard", "--n", "4", "-o", &spec]));
    let cases: Vec<Vec<&str>> = vec![
        vec!["encode", "-i", &spec, "--class", "one-body", "--lambda", "3"],
        vec!["encode", "-i", &spec, "--class", "three-body"],
        vec!["encode", "-i", &spec],
        vec!["encode", "-i", &spec, "--class", "eta-one-body"],
        vec!["encode", "-i", &spec, "--class", "ti", "--boundary", "mobius"],
        vec!["estimate", "--class", "select-swap"],
        vec!["sweep", "--classes", "eta-one-body", "--n", "4"],
        vec!["gen", "--model", "random", "--n", "4"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = febe(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn jobs_env_overrides_flag() {
    let args = ["estimate", "--class", "select-swap", "--L", "16", "--m-b", "1", "--jobs", "1"];
    ok(&febe_env(&args, "2"));
    assert_eq!(febe_env(&args, "zero").status.code(), Some(2));
    assert_eq!(febe(&["--jobs", "0", "estimate", "--class", "select-swap", "--L", "16"]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "s.json");
    let once = |name: &str| {
        let man = path(&dir, name);
        ok(&febe(&["gen", "--model", "random", "--class", "one-body", "--n", "4", "--seed", "9", "-o", &spec]));
        ok(&febe(&["encode", "-i", &spec, "--class", "one-body", "-o", &man]));
        std::fs::read(man).unwrap()
    };
    assert_eq!(once("a.json"), once("b.json"));
    let sweep = || febe(&["sweep", "--classes", "number,one-body", "--n", "4", "--lambda", "auto,2"]).stdout;
    assert_eq!(sweep(), sweep());
}

#[test]
fn sweep_csv_shape() {
    let out = febe(&["sweep", "--classes", "one-body,number,eta-one-body", "--n", "4", "--eta", "2"]);
    ok(&out);
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.len(), 14);
    assert_eq!(&headers[0], "class");
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[13] == "true"));
}

#[test]
fn export_lowered_circuit() {
    let dir = TempDir::new().unwrap();
    let man = hubbard_manifest(&dir);
    let qasm = path(&dir, "c.qasm");
    ok(&febe(&["export", "-i", &man, "-o", &qasm, "--cost-model", "7t"]));
    let text = std::fs::read_to_string(&qasm).unwrap();
    assert!(text.starts_with("OPENQASM 2.0;"));
    let c = parse_text(&text).unwrap();
    assert!(c.gates.iter().any(|g| g.is_t()));
    assert!(Path::new(&qasm).exists());
}

#[test]
fn encode_writes_circuit_file() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "s.json");
    let circ = path(&dir, "c.qasm");
    ok(&febe(&["gen", "--model", "random", "--class", "nn", "--M", "1", "--n", "4", "-o", &spec]));
    let out = febe(&["encode", "-i", &spec, "--class", "nn", "--M", "1", "--circuit", &circ]);
    ok(&out);
    let m: Manifest = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(m.alpha, 8.0);
    assert!(std::fs::read_to_string(circ).unwrap().contains("qreg q["));
}

#[test]
fn in_process_run_reports_codes() {
    assert_eq!(febe::cli::run(["febe", "estimate", "--class", "select-swap", "--L", "8", "--m-b", "2", "-o", "/dev/null"]), 0);
    assert_eq!(febe::cli::run(["febe", "estimate", "--class", "nope", "--L", "8"]), 2);
}
