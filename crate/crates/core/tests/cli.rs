use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groundstate"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_writes_outputs_and_reuses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(dir.path(), &["solve", "--d", "5", "--p", "2", "--omega", "1"]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    for f in ["profile.csv", "functionals.json", "solve.json"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let f = json(&dir.path().join("solve.json"));
    let text = f.to_string();
    assert!(text.contains("m_star"), "{text}");
    let profile = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(profile.starts_with("r,u,u_prime\n"));
    let csv_before = profile.clone();

    let second = run(dir.path(), &["solve", "--d", "5", "--p", "2", "--omega", "1"]);
    assert_eq!(second.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&second.stderr).contains("hit"));
    assert_eq!(std::fs::read_to_string(dir.path().join("profile.csv")).unwrap(), csv_before);
}

#[test]
fn solve_functionals_satisfy_identities() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["--no-cache", "solve", "--d", "5", "--p", "2", "--omega", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let f = json(&dir.path().join("functionals.json"));
    let find = |key: &str| -> f64 {
        fn walk(v: &Value, key: &str) -> Option<f64> {
            match v {
                Value::Object(m) => m.get(key).and_then(Value::as_f64).or_else(|| m.values().find_map(|x| walk(x, key))),
                _ => None,
            }
        }
        walk(&f, key).unwrap_or_else(|| panic!("{key} missing in {f}"))
    };
    assert!(find("nehari_rel").abs() <= 1e-6);
    assert!(find("pohozaev_rel").abs() <= 1e-6);
}

#[test]
fn bad_input_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--d", "3", "--p", "2", "--omega", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("error.json").exists());

    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "d = 5\np = 2.0\nomega = 1.0\ncolour = 3\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_groundstate"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .arg("solve")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["sweep", "--d", "5", "--p", "2", "--omegas", "10,100"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("omega,m_star,alpha,beta,beta_over_alpha,h1dot_dist,l2_dist,decay_sup,exp_tail_ok,errors")
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn pscheck_reports_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["pscheck", "--d", "7", "--p", "1.5", "--omega", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json(&dir.path().join("pscheck.json"));
    assert_eq!(rep["verdict"], "fails");
    assert!(rep["witness"]["g"].as_f64().unwrap() < 0.0);
}

#[test]
fn spectrum_residuals_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["spectrum", "--d", "5", "--p", "2", "--omega", "1000", "--k", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json(&dir.path().join("spectrum.json"));
    let res = rep["residuals"].as_array().unwrap();
    assert_eq!(res.len(), 5);
    assert!(res.iter().all(|r| r.as_f64().unwrap() <= 1e-6));
}
