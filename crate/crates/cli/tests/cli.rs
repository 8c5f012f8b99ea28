use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const ROTATION: &str = r#"{"dim":1,"alpha":[0.4142135623730951],"domain_radius":1.0,
  "coeffs":[[{"n":[0],"re":-0.7373688780783197,"im":0.6754902942615238}]]}"#;

const ATTRACTING: &str = r#"{"dim":1,"alpha":[0.6180339887498949],"domain_radius":0.2,
  "coeffs":[[{"n":[0],"re":0.5,"im":0}],[{"n":[0],"re":1.0,"im":0}]]}"#;

fn fhd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fhd"))
        .args(args)
        .env("FHD_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Runs a command and returns the exit code and the parsed report.
fn run(dir: &Path, cmd: &str, config: &str, extra: &[&str]) -> (i32, Value, PathBuf) {
    let cfg = write(dir, &format!("{cmd}.json"), config);
    let out = dir.join("out");
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = fhd(&args);
    let report_path = PathBuf::from(String::from_utf8(o.stdout).unwrap().trim());
    let report = serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    (o.status.code().unwrap(), report, report_path)
}

#[test]
fn characteristics_report() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "attracting.map.json", ATTRACTING);
    let (code, rep, path) = run(dir.path(), "characteristics", r#"{"map":"attracting.map.json"}"#, &[]);
    assert_eq!(code, 0);
    assert_eq!(rep["status"], "ok");
    assert_eq!(rep["command"], "characteristics");
    assert_eq!(rep["result"]["class"], "attracting");
    assert!((rep["result"]["kappa"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let hash = rep["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 16);
    assert_eq!(path.file_name().unwrap().to_str().unwrap(), format!("characteristics-{hash}.json"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "attracting.map.json", ATTRACTING);
    let cfg = r#"{"map":"attracting.map.json","horizon":500}"#;
    let (_, _, p1) = run(dir.path(), "birkhoff", cfg, &[]);
    let first = std::fs::read(&p1).unwrap();
    let csv = std::fs::read(p1.with_extension("csv")).unwrap();
    let (_, _, p2) = run(dir.path(), "birkhoff", cfg, &[]);
    assert_eq!(p1, p2);
    assert_eq!(std::fs::read(&p2).unwrap(), first);
    assert_eq!(std::fs::read(p2.with_extension("csv")).unwrap(), csv);
}

#[test]
fn overrides_change_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"alpha":[0.6180339887498949],"beta":0.3,"cd_range":50}"#;
    let (_, a, _) = run(dir.path(), "diophantine", cfg, &[]);
    let (_, b, _) = run(dir.path(), "diophantine", cfg, &["--set", "cd_range=60"]);
    assert_ne!(a["config_hash"], b["config_hash"]);
    assert_eq!(b["config"]["cd_range"], 60);
}

#[test]
fn negative_diophantine_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rep, _) = run(dir.path(), "diophantine", r#"{"alpha":[0.5],"beta":0.25,"cd_range":20}"#, &[]);
    assert_eq!(code, 2);
    assert_eq!(rep["status"], "failed");
    assert_eq!(rep["result"]["pass"], false);
}

#[test]
fn domain_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "rotation.map.json", ROTATION);
    // Koenigs needs an attracting map
    let (code, rep, _) = run(dir.path(), "koenigs", r#"{"map":"rotation.map.json"}"#, &[]);
    assert_eq!(code, 2);
    assert_eq!(rep["status"], "error");
    assert_eq!(rep["error"]["error"]["kind"], "NotAttracting");
}

#[test]
fn bad_configs_fail_early() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"horizn":10}"#);
    let o = fhd(&["characteristics", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("horizn"));
    let cfg = write(dir.path(), "odd.json", r#"{"pixels":100}"#);
    let o = fhd(&["continuum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    let o = fhd(&["characteristics", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn continuum_on_rotation_is_the_full_tube() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "rotation.map.json", ROTATION);
    let cfg = r#"{"map":"rotation.map.json","radius":0.2,"theta_res":8,"pixels":32,"horizon":50}"#;
    let (code, rep, path) = run(dir.path(), "continuum", cfg, &[]);
    assert_eq!(code, 0, "{rep}");
    let result = &rep["result"];
    assert_eq!(result["boundary_contact_pixels"].as_f64(), Some(0.0));
    assert_eq!(result["drift"]["forward_pixels"].as_f64(), Some(0.0));
    assert_eq!(result["zero_section_contained"], true);
    let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
    let masks = path.with_file_name(format!("{stem}.masks"));
    let index: Value = serde_json::from_str(&std::fs::read_to_string(masks.join("index.json")).unwrap()).unwrap();
    assert_eq!(index["fibers"].as_array().unwrap().len(), 8);
    let pgm = std::fs::read(masks.join("fiber-00000.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n33 33\n255\n"));
    assert!(path.with_extension("ppm").exists());
    assert_eq!(rep["artifacts"].as_array().unwrap().len(), 10);
}

#[test]
fn furstenberg_writes_a_loadable_map() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rep, path) = run(dir.path(), "furstenberg", r#"{"furstenberg_levels":3}"#, &[]);
    assert_eq!(code, 0, "{rep}");
    let map_path = path.with_extension("map.json");
    write(dir.path(), "f.json", &format!(r#"{{"map":{:?}}}"#, map_path.to_str().unwrap()));
    let cfg = std::fs::read_to_string(dir.path().join("f.json")).unwrap();
    let (code, rep, _) = run(dir.path(), "characteristics", &cfg, &[]);
    assert_eq!(code, 0);
    assert!((rep["result"]["kappa"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}
