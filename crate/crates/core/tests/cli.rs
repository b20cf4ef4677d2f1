use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qrho::transitions::delta_00_simplified;

fn qrho(out: &Path, args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qrho"));
    c.arg("--out").arg(out).args(args);
    if let Some(n) = threads {
        c.env("QRHO_THREADS", n);
    }
    c.output().unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let code = |args: &[&str]| qrho(&out, args, None).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["bogus"]), 1);
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["thermo", "--lambda-plus", "-1"]), 1);
    assert_eq!(code(&["vacuum-transition", "--rho", "1.5"]), 1);
    assert_eq!(code(&["stationary-dist", "--theta", "1:2"]), 1);
    // θ·dt overshoots right after the first reinjection.
    let unstable = ["sde-ensemble", "--omega-in", "0.1", "--dt", "0.09", "--theta-max", "1000", "--t-final", "50", "--n-traj", "4"];
    assert_eq!(code(&unstable), 2);
}

#[test]
fn stationary_summary_is_normalized() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qrho(tmp.path(), &["stationary-dist", "--lambda", "0.5,5", "--gamma", "-2,1", "--theta", "-4:4:9"], None);
    assert!(o.status.success());
    let r = rows(&tmp.path().join("stationary_summary.csv"));
    assert_eq!(r[0], ["lambda", "gamma", "j0f", "normalization", "mass_negative", "mass_positive"]);
    assert_eq!(r.len(), 5);
    for row in &r[1..] {
        let norm: f64 = row[3].parse().unwrap();
        assert!((norm - 1.0).abs() < 1e-6, "{row:?}");
    }
    let pair = rows(&tmp.path().join("stationary_lambda=5_gamma=-2.csv"));
    assert_eq!(pair.len(), 10);
}

#[test]
fn transition_table_matches_library() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qrho(tmp.path(), &["vacuum-transition", "--lambda", "0.3,3", "--rho", "0,0.5"], None);
    assert!(o.status.success());
    let r = rows(&tmp.path().join("vacuum_transition.csv"));
    assert_eq!(r[0], ["rho", "lambda", "delta"]);
    assert_eq!(r.len(), 5);
    for row in &r[1..] {
        let v: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[2], delta_00_simplified(v[1], v[0]).unwrap().delta);
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["sde-ensemble", "--n-traj", "150", "--t-final", "10", "--dump", "2"];
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    assert!(qrho(&a, &args, Some("1")).status.success());
    assert!(qrho(&b, &args, Some("8")).status.success());
    assert!(qrho(&c, &args, Some("8")).status.success());
    let (x, y, z) = (dir_bytes(&a), dir_bytes(&b), dir_bytes(&c));
    assert_eq!(x.len(), 5);
    assert!(x == y && y == z);
    assert_eq!(qrho(&a, &args, Some("zero")).status.code(), Some(1));
}

#[test]
fn replay_reproduces_a_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let o = qrho(&first, &["--format", "json", "thermo", "--lambda-plus", "1,10", "--cutoff", "0.01"], None);
    assert!(o.status.success());
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(first.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "thermo");
    assert_eq!(manifest["parameters"]["lambda_plus"], "1,10");
    assert_eq!(manifest["outputs"], serde_json::json!(["thermo.json", "thermo_levels.json"]));
    let table: serde_json::Value = serde_json::from_slice(&fs::read(first.join("thermo.json")).unwrap()).unwrap();
    assert_eq!(table["rows"].as_array().unwrap().len(), 2);

    let second = tmp.path().join("second");
    let m = first.join("manifest.json");
    let o = Command::new(env!("CARGO_BIN_EXE_qrho")).arg("--replay").arg(&m).arg("--out").arg(&second).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(dir_bytes(&first), dir_bytes(&second));
    let clash = Command::new(env!("CARGO_BIN_EXE_qrho")).arg("--replay").arg(&m).arg("selftest").output().unwrap();
    assert_eq!(clash.status.code(), Some(1));
}

#[test]
fn selftest_passes_and_smatrix_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qrho(tmp.path(), &["selftest"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let r = rows(&tmp.path().join("selftest.csv"));
    assert!(r[1..].iter().all(|row| row[3] == "true"));
    let o = qrho(tmp.path(), &["smatrix", "--omega-out", "4", "--n-max", "6"], None);
    assert!(o.status.success());
    let s = rows(&tmp.path().join("smatrix.csv"));
    assert_eq!(s.len(), 1 + 49);
    let abs2: f64 = s[1][4].parse().unwrap();
    assert!((abs2 - 0.8).abs() < 1e-12);
}
