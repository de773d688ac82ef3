use std::process::{Command, Output};

use serde_json::Value;

fn locc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locc")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn curves_csv_has_one_row_per_theta_and_test() {
    let o = locc(&["curves", "--theta-grid", "0.9:1:0.05"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&o);
    assert_eq!(rows[0], ["theta", "test", "beta_formula", "beta_direct"]);
    assert_eq!(rows.len(), 1 + 3 * 5);
    for r in &rows[1..] {
        let f: f64 = r[2].parse().unwrap();
        let d: f64 = r[3].parse().unwrap();
        assert!((f - d).abs() < 1e-10);
    }
}

#[test]
fn curves_json_envelope() {
    let o = locc(&["curves", "--tests", "TU,TV", "--theta-grid", "0.95", "--format", "json", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["command"], "curves");
    assert_eq!(v["seed"], 7);
    assert!(v["version"].as_str().unwrap().starts_with('v'));
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn without_coherence_samplewise_matches_the_product_test() {
    let o = locc(&["curves", "--family", "figure1", "--offdiag", "0", "--tests", "TV,Tu2", "--theta-grid", "0.9:1:0.02", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let rows = json(&o)["results"]["rows"].as_array().unwrap().clone();
    for pair in rows.chunks(2) {
        let a = pair[0]["beta_direct"].as_f64().unwrap();
        let b = pair[1]["beta_direct"].as_f64().unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn coherence_separates_collective_and_samplewise() {
    let o = locc(&["curves", "--family", "figure1", "--offdiag", "0.05", "--tests", "TU,TV", "--theta-grid", "0.95", "--format", "json"]);
    let rows = json(&o)["results"]["rows"].as_array().unwrap().clone();
    assert!(rows[0]["beta_direct"].as_f64().unwrap() < rows[1]["beta_direct"].as_f64().unwrap());
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&locc(&["curves", "--theta-grid", "2:3:1"])), 3);
    assert_eq!(code(&locc(&["curves", "--tests", "TX"])), 3);
    assert_eq!(code(&locc(&["frobnicate"])), 3);
    assert_eq!(code(&locc(&["simulate", "--protocol", "TV", "--shots", "0"])), 3);
    assert_eq!(code(&locc(&["asymptotics", "--theta", "0.9", "--n-max", "65"])), 3);
    assert_eq!(code(&locc(&["asymptotics", "--theta", "1.5"])), 3);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&locc(&["--help"])), 0);
    let o = locc(&["--version"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn ppt_suite_reports_global_control_as_expected_failure() {
    let o = locc(&["verify", "--suite", "ppt"]);
    assert_eq!(code(&o), 0);
    let checks = json(&o)["results"].as_array().unwrap().clone();
    let expected: Vec<_> = checks.iter().filter(|c| c["expected_failure"] == true).collect();
    assert_eq!(expected.len(), 1);
    assert!(expected[0]["name"].as_str().unwrap().starts_with("TG"));
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_all_passes() {
    let o = locc(&["verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let suites: std::collections::BTreeSet<_> = v["results"].as_array().unwrap().iter().map(|c| c["suite"].as_str().unwrap().to_string()).collect();
    assert_eq!(suites.len(), 6);
}

#[test]
fn simulation_is_reproducible_for_a_seed() {
    let args = ["simulate", "--protocol", "TV", "--theta", "0.9", "--shots", "20000", "--seed", "11"];
    let a = locc(&args);
    let b = locc(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = locc(&["simulate", "--protocol", "TV", "--theta", "0.9", "--shots", "20000", "--seed", "12"]);
    assert_ne!(json(&a)["results"][0]["accept_count"], json(&c)["results"][0]["accept_count"]);
}

#[test]
fn simulation_agrees_with_closed_forms() {
    for p in ["Tu", "Tu-oct", "TV", "teleport", "swap"] {
        let o = locc(&["simulate", "--protocol", p, "--theta-grid", "0.8:0.9:0.1", "--shots", "5e4"]);
        assert_eq!(code(&o), 0, "{p}");
        for r in json(&o)["results"].as_array().unwrap() {
            assert!(r["z_score"].as_f64().unwrap() <= 5.0, "{p}: {r}");
        }
    }
}

#[test]
fn bell_diagonal_family_supplies_its_fidelity() {
    let o = locc(&["simulate", "--protocol", "Tu", "--family", "bell_diagonal:0.1,0.05,0.05", "--shots", "1000"]);
    assert_eq!(code(&o), 0);
    let f = json(&o)["results"][0]["fidelity"].as_f64().unwrap();
    assert!((f - 0.8).abs() < 1e-12);
}

#[test]
fn asymptotics_csv() {
    let o = locc(&["asymptotics", "--theta", "0.9", "--n-max", "40"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&o);
    assert_eq!(rows[0], ["n", "beta", "normalizer", "ratio"]);
    assert_eq!(rows.len(), 41);
    let last: f64 = rows[40][3].parse().unwrap();
    assert!((last - 1.0).abs() < 1e-3);
}

#[test]
fn build_writes_small_operators_in_full() {
    let o = locc(&["build", "--test", "Tu"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["results"];
    assert!((r["trace_t0"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(r["t0"].as_array().unwrap().len(), 4);
    assert!((r["min_eigenvalue_t0"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);

    let o = locc(&["build", "--test", "TU", "--d", "3", "--n", "2"]);
    let r = &json(&o)["results"];
    assert_eq!(r["dim"], 81);
    assert!(r["t0"].is_null());
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("locc-out-{}.csv", std::process::id()));
    let o = locc(&["asymptotics", "--theta", "0.3", "--n-max", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(body.lines().count(), 4);
}

#[test]
fn collective_curve_value_at_seven_tenths() {
    let o = locc(&["curves", "--tests", "TU", "--theta-grid", "0.7"]);
    let rows = csv_rows(&o);
    let b: f64 = rows[1][3].parse().unwrap();
    assert!((b - 0.592).abs() < 1e-12);
}

#[test]
fn every_test_accepts_the_target_with_certainty() {
    let o = locc(&["curves", "--theta-grid", "1"]);
    for r in &csv_rows(&o)[1..] {
        assert!((r[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn swapping_a_perfect_pair_always_succeeds() {
    let o = locc(&["simulate", "--test", "TW", "--theta", "1", "--shots", "1000"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["results"][0]["beta_hat"], 1.0);
}

#[test]
fn asymptotic_ratio_is_one_at_unit_fidelity_and_grows_at_the_boundary() {
    let rows = csv_rows(&locc(&["asymptotics", "--theta", "1", "--n-max", "5"]));
    assert!(rows[1..].iter().all(|r| r[3].parse::<f64>().unwrap() == 1.0));
    let rows = csv_rows(&locc(&["asymptotics", "--theta", "0.5", "--n-max", "5"]));
    for r in &rows[1..] {
        let n: i32 = r[0].parse().unwrap();
        let want = (1.0 + 1.0) / ((2f64.powi(n) + 1.0) * 0.5f64.powi(n));
        assert!((r[3].parse::<f64>().unwrap() - want).abs() < 1e-12);
    }
}
