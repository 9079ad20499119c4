//! The `phasebin` binary end to end, with small sample counts.

use std::path::Path;
use std::process::Command;

use phasebin::io::{read_distribution_csv, read_json, Manifest};

fn run(out: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_phasebin"))
        .args(["--out", out.to_str().unwrap(), "--ntraj", "20000", "--seed", "3"])
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn pn_writes_all_methods_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["pn", "--state", "thermal", "--nbar", "10", "--n-max", "300"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for m in ["analytic", "binned-analytic", "quadrature", "binned", "wigner-average"] {
        let d = read_distribution_csv(&dir.path().join(format!("pn_{m}.csv"))).unwrap();
        assert_eq!(d.n_max(), 300, "{m}");
    }
    let manifest: Manifest = read_json(&dir.path().join("manifest.json")).unwrap();
    assert_eq!(manifest.command, "pn");
    assert_eq!(manifest.seed, Some(3));
    let table = std::fs::read_to_string(dir.path().join("distances.csv")).unwrap();
    let line = table
        .lines()
        .find(|l| l.starts_with("analytic,binned-analytic,"))
        .unwrap();
    let d: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
    assert!((d - phasebin::analytic::db_thermal(10.0).unwrap()).abs() < 1e-9);
}

#[test]
fn sample_then_diagnose_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["sample", "--state", "coherent", "--beta", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ens = dir.path().join("ensemble.csv");
    let diag = dir.path().join("diag");
    let o = Command::new(env!("CARGO_BIN_EXE_phasebin"))
        .args([
            "--out",
            diag.to_str().unwrap(),
            "diagnose",
            "--ensemble",
            ens.to_str().unwrap(),
            "--n",
            "10,16,22",
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let verdicts = std::fs::read_to_string(diag.join("verdicts.csv")).unwrap();
    assert_eq!(verdicts.lines().count(), 4);
}

#[test]
fn diagnose_analytic_state_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "--format", "json", "diagnose", "--state", "thermal", "--nbar", "5", "--n", "5",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = read_json(&dir.path().join("verdicts.json")).unwrap();
    assert_eq!(v[0]["verdict"], "pass");
}

#[test]
fn scaling_and_bose_hubbard() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["scaling", "--sweep", "thermal-nbar"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fit: serde_json::Value = read_json(&dir.path().join("fit.json")).unwrap();
    assert!((fit["exponent"].as_f64().unwrap() + 4.0).abs() < 0.1);

    let cfg = dir.path().join("bh.json");
    std::fs::write(
        &cfg,
        r#"{"U": 0.5, "Omega": 1.0, "n1_initial": 100, "t_final": 0.05, "dt": 4e-5, "n_traj": 5000, "seed": 1, "times": [0.0, 0.05]}"#,
    )
    .unwrap();
    let bh = dir.path().join("bh");
    let o = Command::new(env!("CARGO_BIN_EXE_phasebin"))
        .args([
            "--out",
            bh.to_str().unwrap(),
            "bose-hubbard",
            "--config",
            cfg.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(bh.join("populations.csv").exists());
    assert!(bh.join("pn_t1_mode2_exact.csv").exists());
    assert!(bh.join("wigner2d_t1_mode1.csv").exists());
}

#[test]
fn invalid_input_exits_non_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["pn", "--state", "thermal", "--nbar", "-1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = run(dir.path(), &["diagnose", "--n", "3"]);
    assert!(!o.status.success());
}
