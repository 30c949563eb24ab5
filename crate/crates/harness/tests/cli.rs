use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isonystrom"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// Small DLP run on the unit circle with automatic sources and points.
fn circle_config(dir: &Path) -> PathBuf {
    let cfg = dir.join("circle.cfg");
    let text = format!(
        "problem = laplace2d\nformulation = dlp\ngeometry = {}\norder = 3\nsteps = 2\n",
        data("circle.geo").display()
    );
    std::fs::write(&cfg, text).unwrap();
    cfg
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin().args(["solve", "--frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_fails_cleanly() {
    let out = bin().args(["solve", "--config", "/nonexistent/run.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn solve_writes_point_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = circle_config(dir.path());
    let csv = dir.path().join("solve.csv");
    let out = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec!["point", "x", "y", "z", "component", "computed", "exact"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert!(!rows.is_empty());
    for r in rows {
        let computed: f64 = r[5].parse().unwrap();
        let exact: f64 = r[6].parse().unwrap();
        assert!((computed - exact).abs() <= 1e-3 * exact.abs().max(1.0));
    }
}

#[test]
fn convergence_table_has_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = circle_config(dir.path());
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let out = bin()
            .args(["convergence", "--steps", "3", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&csv)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(csv).unwrap()
    };
    let first = run("a.csv");
    let text = String::from_utf8(first.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,h,dof,max_rel_err,fit_slope,fit_C,fit_s");
    assert_eq!(lines.len(), 1 + 4);
    assert!(!lines[4].split(',').nth(4).unwrap().is_empty());
    // runs are deterministic down to the byte
    assert_eq!(first, run("b.csv"));
}

#[test]
fn info_reports_the_boundary_measure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = circle_config(dir.path());
    let out = bin().args(["info", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("boundary measure")).unwrap();
    let v: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((v - 2.0 * std::f64::consts::PI).abs() <= 1e-10);
}
