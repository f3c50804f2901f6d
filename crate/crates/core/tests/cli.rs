use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;

const FIG1: &str = "9(3(2(1,·),7(5(4,6),8)),10)";
const FIG2: &str = "9(7(5(3(2(1,·),4),6),8),10)";

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_chainrot"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).expect("valid JSON")
}

#[test]
fn validate_and_reparse_every_form() {
    let v = json(&["validate", "--tree", FIG1]);
    assert_eq!(v["valid"], true);
    assert_eq!(v["bits"], "111100011100100100100");
    let bits = v["bits"].as_str().unwrap();
    let again = json(&["validate", "--input", "bits", "--tree", bits]);
    assert_eq!(again["literal"], FIG1);

    let tree_json = serde_json::json!({
        "n": v["n"], "root": v["root"], "left": v["left"], "right": v["right"]
    })
    .to_string();
    assert_eq!(json(&["validate", "--tree", &tree_json])["literal"], FIG1);

    let dir = std::env::temp_dir().join(format!("chainrot-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.txt");
    std::fs::write(&path, FIG1).unwrap();
    let at = format!("@{}", path.display());
    assert_eq!(json(&["validate", "--tree", &at])["root"], 9);
}

#[test]
fn chains_report_counts() {
    let v = json(&["chains", "--tree", FIG1]);
    assert_eq!((v["L"].as_u64(), v["R"].as_u64()), (Some(5), Some(6)));
    assert_eq!(v["left"].as_array().unwrap().len(), 5);
}

#[test]
fn bounds_with_exact() {
    let v = json(&["bounds", "--s", FIG1, "--t", FIG2, "--exact"]);
    assert_eq!(v["exact"], 1);
    assert!(v["lower"].as_u64().unwrap() <= 1);
    assert!(v["upper"].as_u64().unwrap() >= 1);
}

#[test]
fn transform_then_check_round_trip() {
    let (code, script, _) = run(&["--format", "text", "transform", "--s", FIG1, "--t", FIG2]);
    assert_eq!(code, 0);
    let mut child = Command::new(env!("CARGO_BIN_EXE_chainrot"))
        .args(["transform", "--check", "--script", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], true);

    // a script that ends somewhere else is rejected
    let (code, _, err) = run(&["transform", "--check", "--script", &script, "--t", FIG1]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn exact_and_caps() {
    let v = json(&["exact", "--s", FIG1, "--t", FIG2, "--moves", "crot"]);
    assert_eq!(v["distance"], 1);
    assert_eq!(v["moves"].as_array().unwrap().len(), 1);

    let lc = json(&["generate", "--family", "chain-left", "--n", "13"]);
    let rc = json(&["generate", "--family", "chain-right", "--n", "13"]);
    let (code, _, err) = run(&[
        "exact",
        "--s",
        lc["literal"].as_str().unwrap(),
        "--t",
        rc["literal"].as_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("742900"), "{err}");
}

#[test]
fn decompose_reports_pairs() {
    let v = json(&["decompose", "--s", FIG1, "--t", "9(3(2(1,·),5(4,7(6,8))),10)"]);
    let e = v["e"].as_u64().unwrap() as usize;
    assert_eq!(v["equivalent_edges"].as_array().unwrap().len(), e);
    assert_eq!(v["split"].as_array().unwrap().len(), e + 1);
}

#[test]
fn generate_families() {
    let v = json(&["generate", "--family", "figure4", "--n", "7", "--c", "3"]);
    assert_eq!((v["lower"].as_u64(), v["upper"].as_u64()), (Some(4), Some(4)));
    let r = json(&["generate", "--family", "random", "--n", "9", "--seed", "5", "--count", "3"]);
    assert_eq!(r.as_array().unwrap().len(), 3);
    let k = json(&["generate", "--family", "rank", "--n", "3", "--rank", "0"]);
    assert_eq!(k["literal"], "1(·,2(·,3))");
    assert_eq!(run(&["generate", "--family", "figure4", "--n", "4", "--c", "4"]).0, 1);
}

#[test]
fn audit_and_diameter() {
    let v = json(&["--threads", "2", "audit", "--n", "5"]);
    assert_eq!(v["violation_count"], 0);
    assert_eq!(v["pairs"], 42 * 42);
    let d = json(&["diameter", "--n", "6", "--moves", "rot"]);
    assert_eq!(d["diameter"], 7);
    let (code, dot, _) = run(&["--format", "dot", "diameter", "--n", "4"]);
    assert_eq!(code, 0);
    assert!(dot.starts_with("graph"));
    assert_eq!(run(&["--format", "dot", "audit", "--n", "8"]).0, 1);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["nonsense"]).0, 2);
    assert_eq!(run(&["chains"]).0, 2);
    assert_eq!(run(&["--format", "dot", "chains", "--tree", FIG1]).0, 2);
    assert_eq!(run(&["validate", "--tree", "2(1,1)"]).0, 1);
}
