use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;

fn polyheight(args: &[&str], stdin: &str) -> (i32, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_polyheight"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn exit_codes() {
    let (code, out) = polyheight(&["integrate"], r#"{"polytope": "CL-triangle", "polynomial": "x^2+y^2"}"#);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"], "9/2");

    let (code, _) = polyheight(&["height"], r#"{"g": 1, "polytope": "[-1,1]", "gram": [["-1"]]}"#);
    assert_eq!(code, 1);
    let (code, out) = polyheight(&["height"], r#"{"g": 1, "polytope": "[-1,1]"}"#);
    assert_eq!(code, 2);
    assert!(out.contains("/payload/gram"));
    let (code, _) = polyheight(&["height"], "not json");
    assert_eq!(code, 2);
    let (code, _) = polyheight(&["bogus"], "{}");
    assert_eq!(code, 2);
}

#[test]
fn files_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("req.json");
    let output = dir.path().join("resp.json");
    std::fs::write(&input, r#"{"command": "minima", "payload": {"g": 1, "polytope": "[-1,1]", "gram": [["1"]]}}"#).unwrap();
    let (code, stdout) = polyheight(
        &["minima", "--input", input.to_str().unwrap(), "--output", output.to_str().unwrap(), "--convention", "printed"],
        "",
    );
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["result"]["convention"], "printed");
}

#[test]
fn verify_with_seed_flag_is_reproducible() {
    let req = r#"{"suite": "legendre"}"#;
    let (c1, a) = polyheight(&["verify", "--seed", "5"], req);
    let (c2, b) = polyheight(&["verify", "--seed", "5"], req);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["result"]["seed"], "5");
    assert_eq!(v["result"]["suites"][0]["status"], "pass");
}
