use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sparsekit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparsekit"))
        .current_dir(dir)
        .env_remove("SPARSEKIT_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = sparsekit(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_identity(path: &Path, n: usize) {
    let mut text = format!("{n} {n}\n");
    for i in 0..n {
        let row: Vec<&str> = (0..n).map(|j| if i == j { "1" } else { "0" }).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

#[test]
fn generation_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = ok(d, &["gen-matrix", "--n", "6", "--p", "9", "--seed", "5"]);
    let b = ok(d, &["gen-matrix", "--n", "6", "--p", "9", "--seed", "5"]);
    let c = ok(d, &["gen-matrix", "--n", "6", "--p", "9", "--seed", "6"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("6 9\n"));

    let s = ok(d, &["gen-signal", "--p", "9", "--k", "3", "--seed", "2"]);
    let v: Value = serde_json::from_str(&s).unwrap();
    let nnz = v["values"].as_array().unwrap().iter().filter(|x| x.as_f64() != Some(0.0)).count();
    assert_eq!(nnz, 3);
    assert_eq!(v["k"], 3);
}

#[test]
fn noiseless_pipeline_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_identity(&d.join("F.txt"), 8);
    ok(
        d,
        &[
            "gen-signal", "--p", "8", "--k", "2", "--amplitude", "uniform:0.5:2", "--seed", "9",
            "-o", "beta.json", "--matrix", "F.txt", "--y-out", "y.txt",
        ],
    );
    ok(d, &["solve", "--program", "p", "--matrix", "F.txt", "--y", "y.txt", "-o", "sol.json"]);
    let sol = json(&d.join("sol.json"));
    assert_eq!(sol["program"], "p");
    assert_eq!(sol["status"], "optimal");
    assert!(sol["residuals"]["l2"].as_f64().unwrap() < 1e-9);

    ok(d, &["constants", "--matrix", "F.txt", "--k", "1..2", "--kp", "2", "-o", "c.json"]);
    let c = json(&d.join("c.json"));
    assert!(c["delta"].as_array().unwrap().iter().all(|e| e["value"].as_f64().unwrap().abs() < 1e-12));
    let theta = c["theta"].as_array().unwrap();
    assert!(theta.iter().any(|e| e["k"] == 1 && e["kp"] == 2));
    let rip15 = c["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["variant"] == "rip_1.5k" && e["k"] == 2)
        .unwrap();
    assert_eq!(rip15["holds"], true);
    assert_eq!(rip15["certified"], true);

    let cert: Value = serde_json::from_str(&ok(
        d,
        &[
            "verify", "--solution", "sol.json", "--truth", "beta.json", "--constants", "c.json",
            "--theorem", "bp-noiseless",
        ],
    ))
    .unwrap();
    assert_eq!(cert["theorem"], "bp-noiseless");
    assert_eq!(cert["holds"], true);
    assert_eq!(cert["advisory"], false);
    assert!(cert["error"].as_f64().unwrap() < 1e-9);
    assert_eq!(cert["bound"].as_f64().unwrap(), 0.0);
}

#[test]
fn verify_rejects_program_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_identity(&d.join("F.txt"), 6);
    ok(d, &["gen-signal", "--p", "6", "--k", "1", "-o", "b.json", "--matrix", "F.txt", "--y-out", "y.txt"]);
    ok(d, &["solve", "--program", "ds", "--matrix", "F.txt", "--y", "y.txt", "--lambda", "0.1", "-o", "s.json"]);
    ok(d, &["constants", "--matrix", "F.txt", "--k", "1", "-o", "c.json"]);
    let out = sparsekit(
        d,
        &["verify", "--solution", "s.json", "--truth", "b.json", "--constants", "c.json", "--theorem", "bp-noiseless"],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bp-noiseless"));
}

#[test]
fn solve_reports_missing_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_identity(&d.join("F.txt"), 3);
    fs::write(d.join("y.txt"), "1\n0\n-2\n").unwrap();
    for (program, flag) in [("ds", "--lambda"), ("p1", "--eta"), ("lasso", "--rho")] {
        let out = sparsekit(d, &["solve", "--program", program, "--matrix", "F.txt", "--y", "y.txt"]);
        assert!(!out.status.success());
        assert!(String::from_utf8_lossy(&out.stderr).contains(flag));
    }
    let out = sparsekit(d, &["solve", "--program", "bp", "--matrix", "F.txt", "--y", "y.txt"]);
    assert!(!out.status.success());
}

#[test]
fn tails_report_is_complete() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r: Value = serde_json::from_str(&ok(
        d,
        &["tails", "--n", "10", "--p", "20", "--trials", "1000", "--seed", "1"],
    ))
    .unwrap();
    assert_eq!(r["trials"], 1000);
    for key in ["corr_frequency", "corr_bound", "corr_union_bound", "l2_frequency", "l2_bound"] {
        let v = r[key].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&v), "{key} = {v}");
    }
}

const CONFIG: &str = r#"{
  "matrix": {"n": 10, "p": 16},
  "signal": {"k": [1, 2], "amplitude": "unit"},
  "noise": [{"regime": "noiseless"}, {"regime": "l2_bounded", "epsilon": 0.01}],
  "programs": ["p", "ds"],
  "trials": 4,
  "seed": 11,
  "theorems": ["bp-noiseless"],
  "output": {"csv": "out/r.csv", "json": "out/r.json", "plotdata": "out/plot.json"}
}"#;

#[test]
fn experiment_is_reproducible_and_seed_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("cfg.json"), CONFIG).unwrap();
    ok(d, &["experiment", "--config", "cfg.json", "--out-dir", "a"]);
    ok(d, &["experiment", "--config", "cfg.json", "--out-dir", "b"]);
    for f in ["out/r.csv", "out/r.json", "out/plot.json"] {
        assert_eq!(fs::read(d.join("a").join(f)).unwrap(), fs::read(d.join("b").join(f)).unwrap());
    }
    let csv = fs::read_to_string(d.join("a/out/r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
    assert!(csv.starts_with("k,regime,program,trials,successes,success_rate,mean_error,max_error,cert_pass_rate"));

    let out = Command::new(env!("CARGO_BIN_EXE_sparsekit"))
        .current_dir(d)
        .env("SPARSEKIT_SEED", "12")
        .args(["experiment", "--config", "cfg.json", "--out-dir", "c"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&d.join("a/out/r.json"))["seed"], 11);
    assert_eq!(json(&d.join("c/out/r.json"))["seed"], 12);
    assert_ne!(json(&d.join("a/out/r.json"))["matrix_id"], json(&d.join("c/out/r.json"))["matrix_id"]);
}
