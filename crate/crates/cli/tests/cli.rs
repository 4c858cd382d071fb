use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kacmoody(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kacmoody")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn growth_verdicts() {
    let out = kacmoody(&["growth", "--r", "5", "--q", "3", "--depth", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["result"]["lattice"][0]["value"], "16");
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[5]["bfs"], 275);

    let v = json(&kacmoody(&["growth", "--r", "6", "--q", "3"]));
    assert_eq!(v["result"]["lattice"][0]["verdict"], "not_lattice");

    let v = json(&kacmoody(&["growth", "--r", "5", "--depth", "0"]));
    assert_eq!(v["result"]["rows"], serde_json::json!([{"n": 0, "bfs": 1, "closed_form": "1", "equal": true}]));
}

#[test]
fn building_outputs_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let svg = dir.path().join(format!("{sub}.svg"));
        let out = kacmoody(&[
            "building",
            "--r",
            "5",
            "--q",
            "2",
            "--depth",
            "2",
            "--seed",
            "9",
            "--out",
            out_dir.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        (out, out_dir, svg)
    };
    let (a, dir_a, svg_a) = run("a");
    let (b, dir_b, svg_b) = run("b");

    let v = json(&a);
    let ball = v["result"]["ball"].as_array().unwrap();
    assert_eq!(ball.last().unwrap()["cumulative"], 71);
    assert!(v["result"]["links"].as_array().unwrap().iter().all(|l| l["shape"] == "K_{3,3}"));
    let svg = fs::read_to_string(&svg_a).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 21);
    assert_eq!(
        fs::read_to_string(dir_a.join("building.csv")).unwrap().lines().next(),
        Some("distance,chambers,cumulative,expected")
    );

    // identical up to the output paths echoed in the config
    let strip = |o: &Output| {
        let mut v = json(o);
        v["config"] = Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(fs::read(&svg_a).unwrap(), fs::read(&svg_b).unwrap());
    assert_eq!(fs::read(dir_a.join("building.csv")).unwrap(), fs::read(dir_b.join("building.csv")).unwrap());
}

#[test]
fn identical_flags_give_identical_bytes() {
    let args = ["treewall", "--q", "2", "--depth", "4", "--window", "4", "--seed", "3"];
    let a = kacmoody(&args);
    let b = kacmoody(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn non_uniform_thickness() {
    let v = json(&kacmoody(&["building", "--r", "5", "--q", "2,3,2,3,2", "--depth", "1"]));
    assert_eq!(v["passed"], true);
    let shapes: Vec<&str> =
        v["result"]["links"].as_array().unwrap().iter().map(|l| l["shape"].as_str().unwrap()).collect();
    // type {i, i+1}: K_{1+q_{i+1}, 1+q_i}
    assert_eq!(shapes, ["K_{4,3}", "K_{3,4}", "K_{4,3}", "K_{3,4}", "K_{3,3}"]);
}

#[test]
fn unsupported_field_is_an_error() {
    let out = kacmoody(&["treewall", "--q", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not a prime power"), "{}", stderr(&out));
}

#[test]
fn chabauty_limit_and_precision_guard() {
    let out = kacmoody(&["chabauty", "--q", "2", "--depth", "3", "--nmax", "8", "--window", "24"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let limit = &v["result"]["fields"][0]["limit"];
    assert_eq!(limit["verdict"]["verdict"], "Converges");
    assert!(limit["verdict"]["n0"].as_u64().unwrap() <= 4);

    let out = kacmoody(&["chabauty", "--q", "2", "--depth", "3", "--nmax", "8", "--window", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("precision"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());

    let v = json(&kacmoody(&["chabauty", "--q", "2", "--depth", "2", "--nmax", "0", "--window", "4"]));
    assert_eq!(v["result"]["fields"][0]["limit"]["orders"].as_array().unwrap().len(), 1);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"r": 6, "q": [3], "depth": 4}"#).unwrap();
    let v = json(&kacmoody(&["growth", "--config", cfg.to_str().unwrap()]));
    assert_eq!(v["result"]["r"], 6);
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 5);
    let v = json(&kacmoody(&["growth", "--config", cfg.to_str().unwrap(), "--r", "5"]));
    assert_eq!(v["result"]["r"], 5);
    assert_eq!(v["result"]["lattice"][0]["value"], "16");

    fs::write(&cfg, r#"{"rr": 6}"#).unwrap();
    assert_eq!(kacmoody(&["growth", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn gcm_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gcm.json");
    let write = |p: &Path, s: &str| fs::write(p, s).unwrap();

    write(&path, "[[2,-1,-1],[-1,2,-1],[-1,-1,2]]");
    let out = kacmoody(&["gcm", "--gcm-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["result"]["coxeter_matrix"][0], serde_json::json!(["1", "3", "3"]));
    // affine A_2: quadratic growth 1, 3, 6, 9, ...
    assert_eq!(v["result"]["growth"], serde_json::json!([1, 3, 6, 9, 12, 15, 18]));

    write(&path, "[[2,1],[-1,2]]");
    assert_eq!(kacmoody(&["gcm", "--gcm-file", path.to_str().unwrap()]).status.code(), Some(2));

    let v = json(&kacmoody(&["gcm", "--r", "5"]));
    assert_eq!(v["passed"], true);
    let pairs = v["result"]["root_pairs"].as_array().unwrap();
    assert!(pairs[0]["verdict"].get("NonPrenilpotent").is_some());
    assert!(pairs[1]["verdict"].get("Prenilpotent").is_some());
}
