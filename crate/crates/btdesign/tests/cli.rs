use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn btdesign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_btdesign")).args(args).env("BTDESIGN_THREADS", "2").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn weight(v: &Value, pair: &str) -> f64 {
    v["weights"][pair].as_f64().unwrap()
}

#[test]
fn optimize_origin_is_uniform_full_support() {
    let out = btdesign(&["optimize", "--m", "4", "--beta", "0,0,0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["region"]["kind"], "FullSupport");
    assert_eq!(v["weights"].as_object().unwrap().len(), 6);
    for w in v["weights"].as_object().unwrap().values() {
        assert!((w.as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-9);
    }
    assert_eq!(v["certificate"]["derivatives"].as_object().unwrap().len(), 6);
    assert!(v["certificate"]["is_optimal"].as_bool().unwrap());
}

#[test]
fn optimize_far_on_the_line_is_saturated() {
    let v = json(&btdesign(&["optimize", "--m", "4", "--beta", "3.5,1.75,4.375"]));
    assert_eq!(v["region"]["kind"], "Saturated");
    assert_eq!(v["support"].as_array().unwrap().len(), 3);
    for w in v["weights"].as_object().unwrap().values() {
        assert!((w.as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    }
}

#[test]
fn optimize_two_alternatives() {
    let out = btdesign(&["optimize", "--m", "2", "--beta", "0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(weight(&v, "1-2"), 1.0);
    assert!(v["region"].is_null());
}

#[test]
fn negative_beta_values_parse() {
    let out = btdesign(&["optimize", "--m", "3", "--beta", "-1.5,2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["beta"][0], -1.5);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["optimize", "--m", "4", "--beta", "1,2"],
        vec!["optimize", "--m", "4", "--beta", "a,b,c"],
        vec!["optimize", "--m", "4"],
        vec!["classify", "--m", "1", "--beta", ""],
        vec!["frobnicate"],
    ] {
        let out = btdesign(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn optimize_output_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("design.json");
    let file = file.to_str().unwrap();
    for (m, beta) in [("4", "1.7,0.85,2.125"), ("4", "-2,0.4,1"), ("5", "0.3,-1,2,0.5")] {
        let out = btdesign(&["optimize", "--m", m, "--beta", beta, "--output", file]);
        assert_eq!(code(&out), 0);
        let out = btdesign(&["verify", "--m", m, "--beta", beta, "--design", file]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
        assert!(json(&out)["certificate"]["is_optimal"].as_bool().unwrap());
    }
}

#[test]
fn verify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let uniform = write(
        dir.path(),
        "uniform.json",
        r#"{"m": 4, "weights": {"1-2": 0.16666666666666666, "1-3": 0.16666666666666666, "1-4": 0.16666666666666666,
            "2-3": 0.16666666666666666, "2-4": 0.16666666666666666, "3-4": 0.16666666666666666}}"#,
    );
    assert_eq!(code(&btdesign(&["verify", "--m", "4", "--beta", "0,0,0", "--design", &uniform])), 0);

    let claw = write(dir.path(), "claw.json", r#"{"m": 4, "weights": {"1-2": 0.3333333333, "1-3": 0.3333333333, "1-4": 0.3333333334}}"#);
    for beta in ["0,0,0", "1,-2,0.5", "4,4,-3"] {
        let out = btdesign(&["verify", "--m", "4", "--beta", beta, "--design", &claw]);
        assert_eq!(code(&out), 1);
        assert!(!json(&out)["certificate"]["is_optimal"].as_bool().unwrap());
    }

    let cycle = write(dir.path(), "cycle.json", r#"{"m": 4, "weights": {"1-2": 0.25, "2-3": 0.25, "1-3": 0.5}}"#);
    let out = btdesign(&["verify", "--m", "4", "--beta", "0.5,0,0", "--design", &cycle]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert!(v["certificate"]["singular"].as_bool().unwrap());
    assert!(v["log_det"].is_null());
}

#[test]
fn verify_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let short = write(dir.path(), "short.json", r#"{"m": 4, "weights": {"1-2": 0.5}}"#);
    let mismatch = write(dir.path(), "m5.json", r#"{"m": 5, "weights": {"1-2": 1.0}}"#);
    let garbage = write(dir.path(), "garbage.json", "{");
    for file in [&short, &mismatch, &garbage] {
        assert_eq!(code(&btdesign(&["verify", "--m", "4", "--beta", "0,0,0", "--design", file])), 2);
    }
    let missing = dir.path().join("absent.json");
    assert_ne!(code(&btdesign(&["verify", "--m", "4", "--beta", "0,0,0", "--design", missing.to_str().unwrap()])), 0);
}

#[test]
fn classify_examples() {
    let v = json(&btdesign(&["classify", "--m", "4", "--beta", "1.7,0.85,2.125"]));
    assert_eq!(v["region"]["kind"], "FivePoint");
    assert_eq!(v["tests"]["five_point"].as_array().unwrap().len(), 6);
    assert_eq!(v["tests"]["four_point"].as_array().unwrap().len(), 12);
    assert_eq!(v["tests"]["saturated"].as_array().unwrap().len(), 12);

    let v = json(&btdesign(&["classify", "--m", "4", "--beta", "2.5,1.25,3.125"]));
    assert_eq!(v["region"]["kind"], "FourPointSharedVertex");

    let out = btdesign(&["classify", "--m", "5", "--beta", "0,0,0,0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["source"], "solver");
    assert!(v["region"].is_null());
    assert_eq!(v["weights"].as_object().unwrap().len(), 10);
    let paths = v["saturated_paths"].as_array().unwrap();
    assert_eq!(paths.len(), 60);
    assert!(paths.iter().all(|p| !p["inside"].as_bool().unwrap()));

    let v = json(&btdesign(&["classify", "--m", "5", "--beta", "8,6,4,2"]));
    assert_eq!(v["source"], "saturated-path");
    assert_eq!(v["region"]["path"], "1-2-3-4-5");
}

#[test]
fn scan_writes_ordered_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"m": 4, "axes": [
            {"direction": [1, 0, 0], "min": -3, "max": 3, "steps": 4},
            {"direction": [0, 1, 0], "min": -3, "max": 3, "steps": 3},
            {"direction": [0, 0, 1], "min": -3, "max": 3, "steps": 5}]}"#,
    );
    let csv_path = dir.path().join("grid.csv");
    let out = btdesign(&["scan", "--spec", &spec, "--output", csv_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["k1", "k2", "k3", "beta1", "beta2", "beta3", "kind", "region", "support_size", "margin"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 60);
    let keys: Vec<(usize, usize, usize)> =
        rows.iter().map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(rows.iter().all(|r| &r[6] != "ClassificationFailed"));
    // region labels with commas are quoted
    let text = std::fs::read_to_string(&csv_path).unwrap();
    if text.contains("FourPointSharedVertex(") {
        assert!(text.contains("\"FourPointSharedVertex(missing"));
    }

    let json_out = btdesign(&["scan", "--spec", &spec, "--format", "json"]);
    assert_eq!(json(&json_out).as_array().unwrap().len(), 60);

    let bad = write(dir.path(), "bad.json", r#"{"m": 4, "axes": [{"direction": [1, 0, 0], "min": 0, "max": 1, "steps": 1}]}"#);
    assert_eq!(code(&btdesign(&["scan", "--spec", &bad])), 2);
}

#[test]
fn efficiency_curve_and_transitions() {
    let out = btdesign(&["efficiency", "--start", "0", "--end", "12", "--steps", "5"]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(&rows[0][4], "FullSupport");
    assert!((rows[0][7].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
    assert!((rows[4][7].parse::<f64>().unwrap() - 0.5).abs() < 0.02);

    let v = json(&btdesign(&["efficiency", "--end", "4", "--steps", "41", "--transitions"]));
    let sizes: Vec<(u64, u64)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t["from_size"].as_u64().unwrap(), t["to_size"].as_u64().unwrap()))
        .collect();
    assert_eq!(sizes, [(6, 5), (5, 4), (4, 3)]);
}

#[test]
fn claw_scan_finds_nothing() {
    let out = btdesign(&["claw-scan", "--steps", "30", "--random", "20000", "--seed", "5"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["grid"]["points"], 27_000);
    assert_eq!(v["grid"]["feasible"], 0);
    assert_eq!(v["random"]["feasible"], 0);
    assert!(v["grid"]["best_min_slack"].as_f64().unwrap() < 0.0);
}

#[test]
fn disjoint_search_is_seeded() {
    let a = btdesign(&["search-disjoint4", "--seed", "11", "--starts", "2000"]);
    let b = btdesign(&["search-disjoint4", "--seed", "11", "--starts", "2000"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["starts"], 2000);
    assert_eq!(v["certified"], 0);
    assert_eq!(code(&btdesign(&["search-disjoint4", "--starts", "10"])), 2);
}

#[test]
fn bad_thread_setting_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_btdesign"))
        .args(["claw-scan", "--steps", "4"])
        .env("BTDESIGN_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
