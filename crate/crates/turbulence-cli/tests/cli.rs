use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn turb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turb")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("turb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn present_with_oracle() {
    let out = turb(&["present", &fixture("kron-h"), "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["command"], "present");
    assert_eq!(r["pass"], true);
    assert_eq!(r["results"]["vertex_count"], 4);
    assert_eq!(r["results"]["ray_count"], 1);
    assert_eq!(r["results"]["oracle_matches"], true);
    assert_eq!(r["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn triangulating_a_chart_with_bands_fails() {
    let out = turb(&["triangulate", &fixture("bowtie")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
    assert_eq!(turb(&["triangulate", &fixture("square")]).status.code(), Some(0));
}

#[test]
fn decompose_bowtie_flow() {
    let out = turb(&["decompose", &fixture("bowtie"), "--flow", "e=1,f=2,g=2,h=1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["coefficients"], serde_json::json!({"e h": "1", "f g": "2"}));
    let bad = turb(&["decompose", &fixture("bowtie"), "--flow", "e=1,f=2,g=2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn truncated_stdin_is_a_usage_error() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_turb"))
        .args(["validate", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(br#"{"name": "x", "vertices": ["#).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("byte"), "{err}");
}

#[test]
fn output_is_deterministic() {
    for args in [["present", "bowtie"], ["envelope", "moves"], ["classify", "kron-alt"]] {
        let a = turb(&[args[0], &fixture(args[1])]);
        let b = turb(&[args[0], &fixture(args[1])]);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn text_format() {
    let out = turb(&["--format", "text", "classify", &fixture("square")]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.lines().any(|l| l == "gentle: true"), "{s}");
    assert!(s.lines().any(|l| l.starts_with("sha256 ")));
}

#[test]
fn envelope_round_trips() {
    let out = turb(&["envelope", &fixture("moves")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn convert_writes_the_artifact() {
    let path = tmp("square.signed.json");
    let out = turb(&["convert", &fixture("square"), "--to", "signed", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["checks"]["flow_polytope_matches"], true);
    let back = turb(&["convert", path.to_str().unwrap(), "--from", "signed", "--to", "chart"]);
    assert_eq!(back.status.code(), Some(0));
    assert_eq!(json(&back)["results"]["checks"]["flow_polytope_matches"], true);

    let dg = turb(&["convert", &fixture("dag-square"), "--from", "digraph", "--to", "algebra"]);
    assert_eq!(dg.status.code(), Some(0));
    let checks = &json(&dg)["results"]["checks"];
    assert_eq!(checks["flow_polytope_matches"], true);
    assert_eq!(checks["round_trip_isomorphic"], true);

    assert_eq!(turb(&["convert", &fixture("trapezoid-a"), "--to", "algebra"]).status.code(), Some(1));
    assert_eq!(turb(&["convert", &fixture("bowtie"), "--to", "signed"]).status.code(), Some(1));
    assert_eq!(turb(&["convert", &fixture("square"), "--to", "digraph"]).status.code(), Some(2));
}

#[test]
fn render_to_file() {
    let path = tmp("kron.obj");
    let out = turb(&["render", &fixture("kron-h"), "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["format"], "obj");
    let obj = std::fs::read_to_string(&path).unwrap();
    assert!(obj.lines().any(|l| l.starts_with("v ")));
    assert_eq!(turb(&["render", &fixture("contract-left")]).status.code(), Some(1));
    let svg = turb(&["render", &fixture("square")]);
    assert!(String::from_utf8_lossy(&svg.stdout).contains("<svg"));
}

#[test]
fn digraph_input_is_not_a_chart() {
    assert_eq!(turb(&["classify", &fixture("dag-square")]).status.code(), Some(2));
    assert_eq!(turb(&["classify", "/nonexistent/chart.json"]).status.code(), Some(2));
}
