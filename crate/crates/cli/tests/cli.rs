//! End-to-end tests of the qslope binary: worked examples, output schemas,
//! exit codes, batch mode.

use std::process::Command;

fn qslope(args: &[&str]) -> (String, String, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_qslope"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code(),
    )
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s.trim()).unwrap_or_else(|e| panic!("bad json {s:?}: {e}"))
}

#[test]
fn newton_worked_example() {
    let (out, _, code) = qslope(&["newton", "q*z*s^2-(1+z)*s+1"]);
    assert_eq!(code, Some(0));
    assert_eq!(json(&out), serde_json::json!({"slopes": [[0,1],[-1,1]]}));
    let (out, _, _) = qslope(&["newton", "z*s^2-(1+z)*s+1"]);
    assert_eq!(json(&out), serde_json::json!({"slopes": [[0,1],[-1,1]]}));
}

#[test]
fn bg_worked_example() {
    let (out, _, code) = qslope(&["bg", "q*z*s^2-(1+z)*s+1"]);
    assert_eq!(code, Some(0));
    let v = json(&out);
    assert_eq!(v["factors"], serde_json::json!(["s - 1", "z*s - 1"]));
    assert_eq!(v["slopes"], serde_json::json!([0, -1]));
}

#[test]
fn solve_trivial() {
    let (out, _, code) = qslope(&["solve", "s-1"]);
    assert_eq!(code, Some(0));
    let v = json(&out);
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    let comp = &sols[0][0];
    assert_eq!(comp["cbar"], "1");
    assert_eq!(comp["theta"], 0);
    assert_eq!(comp["series"], serde_json::json!([[0, "1"]]));
}

#[test]
fn filtrate_schema() {
    let (out, _, code) = qslope(&["filtrate", "q*z*s^2-(1+z)*s+1"]);
    assert_eq!(code, Some(0));
    let v = json(&out);
    assert_eq!(v["filtration"]["breaks"], serde_json::json!([0, -1]));
    assert_eq!(v["filtration"]["ranks"], serde_json::json!([1, 2]));
    assert_eq!(
        v["filtration"]["quotients"],
        serde_json::json!(["s - 1", "z*s - 1"])
    );
    assert_eq!(v["split_evidence"], "non-split");
}

#[test]
fn exit_codes() {
    // 2: parse error
    let (_, _, code) = qslope(&["newton", "s + #"]);
    assert_eq!(code, Some(2));
    // 4: irrational exponent (char X² − 2 at slope 0)
    let (_, _, code) = qslope(&["solve", "s^2-2"]);
    assert_eq!(code, Some(4));
    // 4: unavailable ramification root
    let (_, _, code) = qslope(&["--q", "2", "--ramify", "2", "newton", "s-z"]);
    assert_eq!(code, Some(4));
    // 5: convergent-mode refusal (factor a non-first slope)
    let (_, _, code) = qslope(&["factor", "q*z*s^2-(1+z)*s+1", "--slope", "0"]);
    assert_eq!(code, Some(5));
    // same command succeeds in formal mode
    let (_, _, code) = qslope(&[
        "--mode",
        "formal",
        "factor",
        "q*z*s^2-(1+z)*s+1",
        "--slope",
        "0",
    ]);
    assert_eq!(code, Some(0));
}

#[test]
fn ramify_scales_slopes() {
    let (out, _, code) = qslope(&["--ramify", "2", "newton", "s-z"]);
    assert_eq!(code, Some(0));
    assert_eq!(json(&out), serde_json::json!({"slopes": [[2,1]]}));
}

#[test]
fn fractional_slope_rendered_as_string() {
    let (out, _, _) = qslope(&["newton", "s^2+z*s+z"]);
    let v = json(&out);
    assert_eq!(v["slopes"][0][0], "1/2");
}

#[test]
fn svg_output() {
    let (out, _, code) = qslope(&["newton", "q*z*s^2-(1+z)*s+1", "--out", "svg"]);
    assert_eq!(code, Some(0));
    assert!(out.starts_with("<svg"));
    assert!(out.contains("polyline"));
}

#[test]
fn prec_env_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_qslope"))
        .env("QSLOPE_PREC", "8")
        .args(["solve", "(1-z)*s-1"])
        .output()
        .unwrap();
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    assert_eq!(v["solutions"][0][0]["prec"], 8);
}

#[test]
fn batch_mode_ordered() {
    let dir = std::env::temp_dir().join("qslope-batch-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ops.txt");
    std::fs::write(&path, "s-1\nz*s-1\n# comment\ns-z\n").unwrap();
    let (out, _, code) = qslope(&["newton", "--batch", path.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    let lines: Vec<&str> = out.trim().lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(json(lines[0]), serde_json::json!({"slopes": [[0,1]]}));
    assert_eq!(json(lines[1]), serde_json::json!({"slopes": [[-1,1]]}));
    assert_eq!(json(lines[2]), serde_json::json!({"slopes": [[1,1]]}));
}

#[test]
fn deterministic_reruns() {
    let (a, _, _) = qslope(&["solve", "q*z*s^2-(1+z)*s+1"]);
    let (b, _, _) = qslope(&["solve", "q*z*s^2-(1+z)*s+1"]);
    assert_eq!(a, b);
}
