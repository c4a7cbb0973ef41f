use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nctorus::verify::VerificationReport;
use serde_json::Value;

fn nctorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nctorus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const THETA: &str = "[[0.0, 0.3], [-0.3, 0.0]]";

fn unitary_file(dir: &Path, name: &str, k: [i64; 2]) -> String {
    let text = format!(
        r#"{{"n": 2, "theta": {THETA}, "coeffs": [{{"k": [{}, {}], "re": 1.0, "im": 0.0}}]}}"#,
        k[0], k[1]
    );
    write(dir, name, &text)
}

#[test]
fn star_of_unitaries_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let a = unitary_file(dir.path(), "a.json", [1, 0]);
    let b = unitary_file(dir.path(), "b.json", [0, 1]);
    let out_path = dir.path().join("ab.json");
    let out = nctorus(&["star", &a, &b, "--oracle", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle residual"));
    let v: Value = serde_json::from_str(&fs::read_to_string(out_path).unwrap()).unwrap();
    let coeffs = v["coeffs"].as_array().unwrap();
    assert_eq!(coeffs.len(), 1);
    assert_eq!(coeffs[0]["k"], serde_json::json!([1, 1]));
    let phase = (coeffs[0]["re"].as_f64().unwrap(), coeffs[0]["im"].as_f64().unwrap());
    let expect = (-std::f64::consts::PI * 0.3f64).sin_cos();
    assert!((phase.0 - expect.1).abs() < 1e-15 && (phase.1 - expect.0).abs() < 1e-15);
}

#[test]
fn star_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    let a = unitary_file(dir.path(), "a.json", [1, 0]);
    let out = nctorus(&["star", &bad, &a]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
    let other = write(
        dir.path(),
        "c.json",
        r#"{"n": 2, "theta": [[0, 0.1], [-0.1, 0]], "coeffs": []}"#,
    );
    assert_eq!(code(&nctorus(&["star", &a, &other])), 3);
    let dup = write(
        dir.path(),
        "d.json",
        &format!(
            r#"{{"n": 2, "theta": {THETA}, "coeffs": [{{"k": [1, 0], "re": 1, "im": 0}}, {{"k": [1, 0], "re": 2, "im": 0}}]}}"#
        ),
    );
    assert_eq!(code(&nctorus(&["star", &a, &dup])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&nctorus(&["star", missing.to_str().unwrap(), &a])), 2);
}

#[test]
fn spectrum_json_and_csv() {
    let out = nctorus(&["spectrum", "--window", "1"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 18);
    assert_eq!(v["window"], 1);
    assert_eq!(v["n"], 2);
    let csv = nctorus(&["spectrum", "--window", "1", "--format", "csv"]);
    let lines: Vec<f64> = String::from_utf8(csv.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(lines.len(), 18);
    assert_eq!(lines.iter().filter(|&&x| x == 0.0).count(), 2);
}

#[test]
fn spectrum_is_deterministic_and_isospectral() {
    let dir = tempfile::tempdir().unwrap();
    let theta = write(dir.path(), "theta.json", &format!(r#"{{"theta": {THETA}}}"#));
    let p1 = dir.path().join("s1.json");
    let p2 = dir.path().join("s2.json");
    for p in [&p1, &p2] {
        let out = nctorus(&["spectrum", &theta, "--window", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    let flat = nctorus(&["spectrum", "--window", "3", "--theta12", "0"]);
    let a: Value = serde_json::from_slice(&fs::read(&p1).unwrap()).unwrap();
    let b: Value = serde_json::from_slice(&flat.stdout).unwrap();
    let (a, b) = (a["eigenvalues"].as_array().unwrap(), b["eigenvalues"].as_array().unwrap());
    for (x, y) in a.iter().zip(b) {
        assert!((x.as_f64().unwrap() - y.as_f64().unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn spectrum_limits() {
    assert_eq!(code(&nctorus(&["spectrum", "--window", "50"])), 4);
    assert_eq!(code(&nctorus(&["spectrum", "--window", "0"])), 3);
    assert_eq!(code(&nctorus(&["spectrum", "--window", "999999999999"])), 4);
    assert_eq!(code(&nctorus(&["spectrum", "--window", "abc"])), 2);
}

#[test]
fn cover_verify_and_lift() {
    let out = nctorus(&["cover", "verify", "--k", "2,3", "--theta12", "0.5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: VerificationReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.pass);
    assert!(report.cases.iter().all(|c| c.residual <= 1e-12));
    let lift = nctorus(&["cover", "lift", "--k", "2,3"]);
    assert_eq!(code(&lift), 0);
    let report: VerificationReport = serde_json::from_slice(&lift.stdout).unwrap();
    assert!(report.cases.iter().any(|c| c.id == "lift.restricts_to_base"));
}

#[test]
fn cover_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"k": [2, 1], "base_theta": [[0, 0.4], [-0.4, 0]], "cover_theta": [[0, 0.2], [-0.2, 0]]}"#,
    );
    let out = nctorus(&["cover", "lift", "--spec", &spec]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let incompatible = write(
        dir.path(),
        "bad.json",
        r#"{"k": [2, 1], "base_theta": [[0, 0.4], [-0.4, 0]], "cover_theta": [[0, 0.3], [-0.3, 0]]}"#,
    );
    assert_eq!(code(&nctorus(&["cover", "verify", "--spec", &incompatible])), 3);
}

#[test]
fn cover_invalid_multiplicities() {
    assert_eq!(code(&nctorus(&["cover", "verify", "--k", "0,3"])), 3);
    assert_eq!(code(&nctorus(&["cover", "verify", "--k", "-2,3"])), 3);
    assert_eq!(code(&nctorus(&["cover", "tower", "--primes", "1,3"])), 3);
}

#[test]
fn cover_tower_orders() {
    let out = nctorus(&["cover", "tower", "--primes", "2,3"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let orders: Vec<(u64, u64, u64)> = v["orders"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| {
            (
                o["lower"].as_u64().unwrap(),
                o["upper"].as_u64().unwrap(),
                o["order"].as_u64().unwrap(),
            )
        })
        .collect();
    assert!(orders.contains(&(0, 1, 4)));
    assert!(orders.contains(&(0, 2, 36)));
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
}

#[test]
fn moyal_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f00 = write(
        dir.path(),
        "f00.json",
        r#"{"theta": 2.0, "M": 2, "N": 1, "factors": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]]}"#,
    );
    let out = nctorus(&["moyal", "seminorm", &f00, "--k", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let vals: Vec<f64> = v["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    let d = nctorus(&["moyal", "partial", &f00, "--axis", "p"]);
    assert_eq!(code(&d), 0);
    let v: Value = serde_json::from_slice(&d.stdout).unwrap();
    assert_eq!(v["factors"][0][1][0], serde_json::json!([0.0, -1.0]));
    let bad = write(dir.path(), "bad.json", r#"{"theta": 2.0}"#);
    assert_eq!(code(&nctorus(&["moyal", "seminorm", &bad])), 2);
}

#[test]
fn verify_all_tolerance_override_flags_failures() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = nctorus(&["verify-all", "--seed", "5", "--tol", "1e-20", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report: VerificationReport =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!report.pass);
    let failed: Vec<_> = report.failures().collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c.residual > 1e-20 && c.tolerance == 1e-20));
    // exact identities survive any tolerance
    assert!(report.cases.iter().any(|c| c.pass && c.residual == 0.0));
    assert!(report.cases.iter().all(|c| !c.anchor.is_empty()));
}
