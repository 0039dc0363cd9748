use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_son-expm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    serde_json::from_value(v["R"].clone()).unwrap()
}

#[test]
fn exp_rotation_by_pi() {
    let doc = json(&run(&["exp", "--n", "3", "--v", "0,0,3.141592653589793"]));
    let r = matrix(&doc);
    assert!((r[0][0] - 1.0).abs() < 1e-15);
    assert!((r[1][1] + 1.0).abs() < 1e-15 && (r[2][2] + 1.0).abs() < 1e-15);
    assert_eq!(doc["method"], "closed");
    assert_eq!(doc["degenerate"], false);
}

#[test]
fn exp_methods_agree() {
    let v = "0.3,-1.2,0.8,2.0,-0.4,0.9,1.1,-0.7,0.2,0.5,-1.5,0.6,0.1,0.0,0.4";
    let mats: Vec<Vec<Vec<f64>>> = ["closed", "taylor", "companion"]
        .iter()
        .map(|m| matrix(&json(&run(&["exp", "--n", "6", "--v", v, "--method", m]))))
        .collect();
    for other in &mats[1..] {
        let d: f64 = mats[0].iter().flatten().zip(other.iter().flatten()).map(|(a, b)| (a - b).powi(2)).sum();
        assert!(d.sqrt() <= 1e-9);
    }
}

#[test]
fn exp_zero_is_identity() {
    let doc = json(&run(&["exp", "--n", "4", "--v", "0,0,0,0,0,0"]));
    let r = matrix(&doc);
    for (i, row) in r.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            assert_eq!(*x, if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["exp", "--n", "2", "--v", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["exp", "--n", "12", "--v", "1"]).status.code(), Some(2));
    assert_eq!(run_with_stdin(&["exp", "--input", "-"], "{not json").status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["sample", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "--n", "4", "--repetitions", "5"]).status.code(), Some(2));
    // the zero vector has no normalized invariants
    assert_eq!(run(&["invariants", "--n", "4", "--v", "0,0,0,0,0,0"]).status.code(), Some(3));
}

#[test]
fn sample_is_deterministic_and_sphere_fixes_norm() {
    let a = run(&["sample", "--n", "5", "--count", "20", "--seed", "9"]);
    let b = run(&["sample", "--n", "5", "--count", "20", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let out = run(&["sample", "--n", "7", "--count", "50", "--mode", "sphere", "--radius", "3.141592653589793"]);
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let doc: Value = serde_json::from_str(line).unwrap();
        let v: Vec<f64> = serde_json::from_value(doc["v"].clone()).unwrap();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - std::f64::consts::PI).abs() <= 1e-12);
    }
}

#[test]
fn sampled_stream_piped_into_invariants() {
    let samples = run(&["sample", "--n", "6", "--count", "2000", "--seed", "4"]);
    let out = run_with_stdin(&["invariants", "--input", "-"], &String::from_utf8(samples.stdout).unwrap());
    assert!(out.status.success());
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2000);
    assert!(lines.iter().all(|d| d["in_region"] == true));
}

#[test]
fn roots_and_angles() {
    let doc = json(&run(&["roots", "--n", "4", "--v", "1,0,0,0,0,1"]));
    assert_eq!(doc["degenerate"], true);
    let doc = json(&run(&["angles", "--n", "5", "--v", "0.4,1.0,-0.3,0.2,0.9,-1.1,0.5,0.3,0.0,0.7"]));
    let closed = doc["trace_closed"].as_f64().unwrap();
    let direct = doc["trace_direct"].as_f64().unwrap();
    assert!((closed - direct).abs() <= 1e-9);
    let doc = json(&run(&["angles", "--n", "2", "--v", "10", "--fold-angles"]));
    assert!((doc["phi"][0].as_f64().unwrap() - (10.0 - std::f64::consts::TAU)).abs() < 1e-12);
}

#[test]
fn region_area_n7() {
    let doc = json(&run(&["region", "--n", "7", "--samples", "200000", "--seed", "3"]));
    let est = doc["estimate"].as_f64().unwrap();
    assert!((est - 0.05).abs() <= 0.05 * 0.05);
}

#[test]
fn bench_report_schema() {
    let doc = json(&run(&["bench", "--n", "4,9", "--repetitions", "100"]));
    let dims = doc["dimensions"].as_array().unwrap();
    assert_eq!(dims.len(), 2);
    for d in dims {
        let methods: Vec<&str> = d["methods"].as_array().unwrap().iter().map(|m| m["method"].as_str().unwrap()).collect();
        assert_eq!(methods, ["closed", "taylor", "companion"]);
    }
    assert!(doc["max_deviation"].as_f64().unwrap() <= 1e-9);
}

#[test]
#[allow(clippy::needless_range_loop)]
fn g2_commands() {
    let w = "0.1,0.2,-0.3,0.4,0.5,-0.6,0.7,0.8,-0.9,1.0,0.1,0.2,0.3,-0.4";
    let doc = json(&run(&["g2", "exp", "--w", w]));
    assert!(doc["automorphism_residual"].as_f64().unwrap() <= 1e-9);
    let rot = serde_json::to_string(&doc["R"]).unwrap();
    let check = json(&run_with_stdin(&["g2", "check", "--input", "-"], &rot));
    assert_eq!(check["kind"], "automorphism");
    assert!(check["residual"].as_f64().unwrap() <= 1e-9);

    let emb = json(&run(&["g2", "embed", "--w", w]));
    assert_eq!(emb["n"], 7);
    let v: Vec<f64> = serde_json::from_value(emb["v"].clone()).unwrap();
    assert_eq!(v.len(), 21);
    // feed the embedded element back as an antisymmetric matrix
    let mut m = vec![vec![0.0; 7]; 7];
    let mut a = 0;
    for i in 0..7 {
        for j in i + 1..7 {
            m[i][j] = v[a];
            m[j][i] = -v[a];
            a += 1;
        }
    }
    let check = json(&run_with_stdin(&["g2", "check", "--input", "-"], &serde_json::to_string(&m).unwrap()));
    assert_eq!(check["kind"], "algebra");
    assert!(check["residual"].as_f64().unwrap() <= 1e-13);

    assert_eq!(run(&["g2", "exp", "--w", "1,2,3"]).status.code(), Some(2));
}

#[test]
fn degeneracy_threshold_from_environment() {
    // roots 0.75 / 0.25 are far apart; a huge threshold forces the fallback
    let v = "1,0,0,0,0,0.5";
    let doc = json(&run(&["exp", "--n", "4", "--v", v]));
    assert_eq!(doc["method"], "closed");
    let out = bin().args(["exp", "--n", "4", "--v", v]).env("SON_EXPM_DEG_THRESHOLD", "0.9").output().unwrap();
    assert_eq!(json(&out)["method"], "fallback");
    let out = bin().args(["exp", "--n", "4", "--v", v]).env("SON_EXPM_DEG_THRESHOLD", "abc").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
