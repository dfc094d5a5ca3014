use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn shadows(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadows"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn cube() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/cube.json")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn cube_is_already_in_shadow_position() {
    let tmp = TempDir::new().unwrap();
    let out = shadows(tmp.path(), &["shadow-position", "--body", cube().to_str().unwrap(), "--out", "r"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&tmp.path().join("r"));
    assert_eq!(rep["passed"], Value::Bool(true));
    let ratio = rep["results"]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() <= 1e-6, "ratio {ratio}");
    assert!(tmp.path().join("r/timing.json").exists());
}

#[test]
fn same_seed_same_report() {
    let tmp = TempDir::new().unwrap();
    for dir in ["a", "b"] {
        let out = shadows(tmp.path(), &["verify-t3", "--seed", "11", "--out", dir]);
        assert_eq!(code(&out), 0);
    }
    let a = fs::read(tmp.path().join("a/report.json")).unwrap();
    let b = fs::read(tmp.path().join("b/report.json")).unwrap();
    assert_eq!(a, b);
    let c = fs::read(tmp.path().join("a/table.csv")).unwrap();
    let d = fs::read(tmp.path().join("b/table.csv")).unwrap();
    assert_eq!(c, d);
}

#[test]
fn perturbed_weights_fail_the_run() {
    let tmp = TempDir::new().unwrap();
    let cfg = format!(r#"{{"body": "{}", "perturb_weights": 0.01}}"#, cube().display());
    let cfg = write(tmp.path(), "fault.json", &cfg);
    for cmd in ["shadow-position", "verify-t3"] {
        let out = shadows(tmp.path(), &[cmd, "--config", &cfg, "--out", cmd]);
        assert_eq!(code(&out), 1, "{cmd}");
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains("FAIL"), "{cmd}: {stdout}");
        assert_eq!(report(&tmp.path().join(cmd))["passed"], Value::Bool(false));
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"n": 3, "bogus": 1}"#);
    let out = shadows(tmp.path(), &["zonotope", "--config", &cfg]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn malformed_config_reports_position() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", "{\"n\": 3,\n \"m\": }");
    let out = shadows(tmp.path(), &["zonotope", "--config", &cfg]);
    assert_eq!(code(&out), 2);
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(diag["message"].as_str().unwrap().contains("c.json:2:"), "{diag}");
    assert_eq!(diag["exit_code"], 2);
}

#[test]
fn out_of_range_config_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"tolerance": 0.5}"#);
    assert_eq!(code(&shadows(tmp.path(), &["zonotope", "--config", &cfg])), 2);
}

#[test]
fn bad_bodies_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let zero = write(tmp.path(), "zero.json", r#"{"n":2,"directions":[[1,0],[0,1]],"offsets":[1,0]}"#);
    let out = shadows(tmp.path(), &["shadow-position", "--body", &zero]);
    assert_eq!(code(&out), 2);

    let flat = write(tmp.path(), "flat.json", r#"{"n":2,"directions":[[1,0],[-1,0]],"offsets":[1,1]}"#);
    let out = shadows(tmp.path(), &["shadow-position", "--body", &flat]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unbounded body"));

    let long = write(tmp.path(), "long.json", r#"{"n":2,"directions":[[3,0],[0,1]],"offsets":[1,1]}"#);
    assert_eq!(code(&shadows(tmp.path(), &["shadow-position", "--body", &long])), 2);
}

#[test]
fn capacity_guard_exits_3() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"n": 7, "m": 14}"#);
    let out = shadows(tmp.path(), &["shadow-position", "--config", &cfg]);
    assert_eq!(code(&out), 3);
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "capacity");
}

#[test]
fn ball_ratio_table_covers_the_range() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"n_max": 40}"#);
    let out = shadows(tmp.path(), &["ball-ratio", "--config", &cfg, "--out", "r"]);
    assert_eq!(code(&out), 0);
    let mut rdr = csv::Reader::from_path(tmp.path().join("r/table.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 39);
    assert_eq!(&rows[0][0], "2");
    assert_eq!(&rows[38][0], "40");
}

#[test]
fn json_only_format_skips_csv() {
    let tmp = TempDir::new().unwrap();
    let out = shadows(tmp.path(), &["zonotope", "--format", "json", "--out", "r"]);
    assert_eq!(code(&out), 0);
    assert!(tmp.path().join("r/report.json").exists());
    assert!(!tmp.path().join("r/table.csv").exists());
}

#[test]
fn pathological_sweep_writes_one_row_per_seed() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"n": 4, "seeds": 10, "seed": 0}"#);
    let out = shadows(tmp.path(), &["pathological", "--config", &cfg, "--out", "r"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let mut rdr = csv::Reader::from_path(tmp.path().join("r/table.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["seed", "n", "delta_hat", "vol_nth_root", "min_shadow", "ratio", "floor"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 10);
    for row in &rows {
        let ratio: f64 = row[5].parse().unwrap();
        let floor: f64 = row[6].parse().unwrap();
        assert!(ratio >= floor - 1e-6, "{row:?}");
    }
}
