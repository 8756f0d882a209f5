use std::process::{Command, Output};

use enhanced_zeta::Error;
use enhanced_zeta_cli::commands::RunError;
use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enhanced-zeta")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn records(v: &Value) -> &Vec<Value> {
    v["records"].as_array().unwrap()
}

#[test]
fn bfunction_reports_kappa() {
    let out = cli(&["bfunction", "--n", "1", "--d", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    let kappas: Vec<&str> = records(&v).iter().map(|r| r["params"]["kappa"].as_str().unwrap()).collect();
    assert_eq!(kappas, ["1", "4"]);
    let out = cli(&["bfunction", "--n", "2", "--d", "1"]);
    assert_eq!(out.status.code(), Some(0));
    for r in records(&report(&out)) {
        assert_eq!(r["params"]["grid"].as_array().unwrap().len(), 9);
    }
}

#[test]
fn d_greater_than_n_is_a_configuration_error() {
    let out = cli(&["bfunction", "--n", "1", "--d", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("d ≤ n required") && err.contains("vanishes identically"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn monte_carlo_commands_require_a_seed() {
    let out = cli(&["verify", "gamma-const", "--n", "2", "--d", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn malformed_flags_are_configuration_errors() {
    assert_eq!(cli(&["gamma", "--s1", "1,2,3"]).status.code(), Some(2));
    assert_eq!(cli(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(cli(&["verify", "xi", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn orbits_example() {
    let out = cli(&["verify", "orbits", "--n", "2", "--d", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    let recs = records(&v);
    let count = recs.iter().find(|r| r["id"] == "orbits/n2d1/count").unwrap();
    assert_eq!(count["params"]["orbits"].as_array().unwrap().len(), 4);
    assert_eq!(recs.iter().filter(|r| r["id"].as_str().unwrap().contains("/action/")).count(), 4);
    assert!(recs.iter().all(|r| r["pass"] == true));
}

#[test]
fn ft_theorem_example() {
    let out = cli(&["verify", "ft-theorem", "--n", "1", "--d", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(records(&v).len(), 3);
    for r in records(&v) {
        assert!(r["rel_err"].as_f64().unwrap() <= 1e-4);
    }
}

#[test]
fn failing_check_exits_with_one() {
    let out = cli(&["verify", "delta-residue", "--n", "1", "--d", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out);
    assert_eq!(v["summary"]["failed"], 1);
    // A tolerance tighter than the achievable error turns a pass into a failure.
    let out = cli(&["verify", "ft-theorem", "--n", "1", "--d", "1", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical_and_sorted() {
    let args = ["verify", "gamma-const", "--n", "2", "--d", "1", "--seed", "5", "--samples", "5000"];
    let a = cli(&args);
    let b = cli(&args);
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
    let c = cli(&["verify", "gamma-const", "--n", "2", "--d", "1", "--seed", "6", "--samples", "5000"]);
    assert_ne!(a.stdout, c.stdout);
    let v = report(&a);
    let ids: Vec<&str> = records(&v).iter().map(|r| r["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["environment"]["config"]["seed"], 5);
    assert_eq!(v["environment"]["config"]["budget"]["mc_samples"], 5000);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"n": 2, "d": 1, "s_grid": [{"s1": [1.0, 0.0], "s2": [1.0, 0.0]}]}"#).unwrap();
    let out = cli(&["verify", "xi", "--n", "1", "--d", "1", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["environment"]["config"]["n"], 2);
    assert!(records(&v).iter().all(|r| r["id"].as_str().unwrap().contains("n2d1")));
    std::fs::write(&path, r#"{"n": 2, "bogus": 1}"#).unwrap();
    let out = cli(&["verify", "xi", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gamma_table_examples_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("gamma.csv");
    let out = cli(&["gamma", "--n", "1", "--d", "1", "--s1", "0", "--s2", "0", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    let table = &v["tables"][0];
    let cols: Vec<&str> = table["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let row = &table["rows"][0];
    let at = |name: &str| row[cols.iter().position(|c| *c == name).unwrap()].as_f64().unwrap();
    assert!((at("gamma_tilde_re") - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    for c in cols.iter().filter(|c| c.starts_with('u') && c.ends_with("_re")) {
        assert!((at(c) - 1.0).abs() < 1e-15);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("s1_re,s1_im,s2_re,s2_im,gamma_tilde_re"));
    assert_eq!(text.lines().count(), 2);

    let out = cli(&["gamma", "--n", "1", "--d", "1", "--s1", "1", "--s2", "1"]);
    let v = report(&out);
    let cols: Vec<&str> = v["tables"][0]["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let k = cols.iter().position(|c| *c == "gindikin_gamma_re").unwrap();
    assert!((v["tables"][0]["rows"][0][k].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn gamma_table_annotates_poles() {
    let out = cli(&["gamma", "--n", "1", "--d", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    let rows = v["tables"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 13);
    // s1 = -1 hits the pole of Γ(s1 + 1).
    let row = rows.iter().find(|r| r[0] == -1.0).unwrap();
    let last = row.as_array().unwrap().last().unwrap().as_str().unwrap();
    assert!(last.contains("Γ_d(s1 + (d+1)/2)"), "{last}");
    assert!(row[4].is_null());
}

#[test]
fn zeta_table_crosses_into_descent() {
    let out = cli(&["zeta", "--n", "1", "--d", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    let rows = v["tables"][0]["rows"].as_array().unwrap();
    let methods: Vec<&str> = rows.iter().map(|r| r[7].as_str().unwrap()).collect();
    assert!(methods.contains(&"direct") && methods.contains(&"descent"));
    for r in rows {
        assert!(r[4].is_f64(), "{r}");
    }
}

#[test]
fn error_classes_map_to_exit_codes() {
    assert_eq!(RunError::from(Error::Convergence("x".into())).exit_code(), 2);
    assert_eq!(RunError::from(Error::DimensionOrder { n: 1, d: 2 }).exit_code(), 2);
    assert_eq!(RunError::from(Error::NonFinite("x".into())).exit_code(), 3);
    assert_eq!(RunError::from(Error::Branch("x".into())).exit_code(), 3);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = cli(&["verify", "corollary", "--n", "2", "--d", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["records"][0]["id"], "corollary/prefactor-forms/n2d2");
}
