use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn oligo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oligo")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).expect("file written")).expect("valid JSON")
}

#[test]
fn encode_decode_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let (s, e, d, cert) = (dir.path().join("s.json"), dir.path().join("e.json"), dir.path().join("d.json"), dir.path().join("c.json"));
    std::fs::write(&s, r#"{"signature":[{"name":"E","arity":2}],"size":2,"relations":{"E":[[0,1]]}}"#).unwrap();

    let out = oligo(&["encode", "--in", path(&s), "--out", path(&e), "--cert", path(&cert)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let encoded = read_json(&e);
    assert_eq!(encoded["size"], 4);
    assert_eq!(read_json(&cert)["command"], "encode");

    let out = oligo(&["decode", "--in", path(&e), "--arities", "2", "--out", path(&d)]);
    assert_eq!(out.status.code(), Some(0));
    let decoded = read_json(&d);
    assert_eq!(decoded["size"], 2);
    assert_eq!(decoded["relations"]["R_2"], serde_json::json!([[0, 1]]));

    let out = oligo(&["replay", path(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("replay matches"));
}

#[test]
fn tampered_certificate_does_not_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("gadget.json");
    let out = oligo(&["gadget-check", "--out", path(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&cert).unwrap();
    std::fs::write(&cert, text.replacen("\"polymorphisms\": 4", "\"polymorphisms\": 5", 1)).unwrap();
    let out = oligo(&["replay", path(&cert)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("MISMATCH"));
}

#[test]
fn certificates_go_to_stdout_without_out() {
    let out = oligo(&["split", "--group", "Q8", "--center", "[0, 4]"]);
    assert_eq!(out.status.code(), Some(0));
    let cert: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["schema"], "oligo-certificate/1");
    assert_eq!(cert["verdict"], true);
}

#[test]
fn nested_and_flat_forms_agree() {
    let flat = oligo(&["iso-check"]);
    let nested = oligo(&["clones", "iso-check"]);
    assert_eq!(flat.status.code(), Some(0));
    assert_eq!(flat.stdout, nested.stdout);
}

#[test]
fn invalid_configuration_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"grade": 0}"#).unwrap();
    let out = oligo(&["--config", path(&config), "gadget-check"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grade must be positive"));
}

#[test]
fn groups_suite_writes_one_certificate_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = oligo(&["suite", "groups", "--out", path(dir.path()), "--threads", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["groups.chain.json", "groups.split.json"]);
}
