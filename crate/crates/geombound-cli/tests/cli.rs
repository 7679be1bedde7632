use assert_cmd::Command;
use predicates::prelude::*;

fn geombound() -> Command {
    Command::cargo_bin("geombound").unwrap()
}

fn write_model(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn polya_table_matches_published_values() {
    geombound()
        .arg("polya-table")
        .assert()
        .success()
        .stdout(predicate::str::contains("0.0009458"))
        .stdout(predicate::str::contains("0.03055"))
        .stdout(predicate::str::contains("0.9522"));
}

#[test]
fn polya_table_json_output() {
    geombound()
        .args(["polya-table", "--json"])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"upper_tv\": \"0.002506\""));
}

#[test]
fn polya_table_custom_rows() {
    let dir = tempfile::tempdir().unwrap();
    let rows = write_model(&dir, "rows.json", "[[25, 7]]");
    geombound()
        .args(["polya-table", "--rows", &rows])
        .assert()
        .success()
        .stdout(predicate::str::contains("25,7,"));
}

#[test]
fn erlang_table_has_markers_and_values() {
    geombound()
        .arg("erlang-table")
        .assert()
        .success()
        .stdout(predicate::str::contains("0.1134"))
        .stdout(predicate::str::contains(">1"))
        .stdout(predicate::str::contains("--"))
        .stdout(predicate::str::contains("0.5777"));
}

#[test]
fn erlang_table_custom_grid() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_model(
        &dir,
        "grid.json",
        r#"{"ks": [1], "lambdas": ["0.01"], "betas": ["1.0"]}"#,
    );
    geombound()
        .args(["erlang-table", "--grid", &grid, "--json"])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"u\": \"0.1134\""));
}

#[test]
fn bound_on_geometric_pmf_is_zero_and_passes() {
    // Geom(0.5) truncated far enough that the tail is negligible
    let dir = tempfile::tempdir().unwrap();
    let probs: Vec<String> = (0..60).map(|j| format!("\"{}\"", 0.5f64.powi(j + 1))).collect();
    let model = write_model(
        &dir,
        "geom.json",
        &format!(r#"{{"kind": "pmf", "probs": [{}]}}"#, probs.join(",")),
    );
    geombound()
        .args(["bound", "--model", &model])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"valid\": true"))
        .stdout(predicate::str::contains("\"provenance\": \"ifr-corollary\""));
}

#[test]
fn bound_on_dfr_pmf_is_invalid_with_exit_one() {
    // heavier and heavier tail: decreasing failure rate, not IFR
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        &dir,
        "dfr.json",
        r#"{"kind": "pmf", "probs": ["0.7", "0.15", "0.05", "0.04", "0.03", "0.02", "0.01"]}"#,
    );
    geombound()
        .args(["bound", "--model", &model])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("\"valid\": false"));
}

#[test]
fn bound_rejects_malformed_json_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "bad.json", "{ not json");
    geombound()
        .args(["bound", "--model", &model])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("error:"));
}

#[test]
fn bound_rejects_missing_file_with_exit_two() {
    geombound()
        .args(["bound", "--model", "/nonexistent/model.json"])
        .assert()
        .code(2);
}

#[test]
fn bound_rejects_unknown_kind_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(&dir, "odd.json", r#"{"kind": "mystery"}"#);
    geombound()
        .args(["bound", "--model", &model])
        .assert()
        .code(2);
}

#[test]
fn bound_rejects_bad_number_string_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        &dir,
        "mg1.json",
        r#"{"kind": "mg1", "lambda": "zero point five", "service": {"type": "exponential", "rate": "1.0"}}"#,
    );
    geombound()
        .args(["bound", "--model", &model])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("cannot parse number"));
}

#[test]
fn bound_mm1_equilibrium_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        &dir,
        "mm1.json",
        r#"{"kind": "mg1", "lambda": "0.5", "service": {"type": "exponential", "rate": "1.0"}}"#,
    );
    geombound()
        .args(["bound", "--model", &model, "--csv"])
        .assert()
        .success()
        .stdout(predicate::str::starts_with(
            "value,target,approximant_p,valid",
        ))
        .stdout(predicate::str::contains("\n0,TV,0.5,true"));
}

#[test]
fn bound_unstable_queue_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        &dir,
        "rho.json",
        r#"{"kind": "mg1", "lambda": "2.0", "service": {"type": "exponential", "rate": "1.0"}}"#,
    );
    geombound()
        .args(["bound", "--model", &model])
        .assert()
        .code(2);
}

#[test]
fn bound_busy_period_erlang() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        &dir,
        "bp.json",
        r#"{"kind": "busy-period", "lambda": "0.01", "service": {"type": "erlang", "k": 1, "beta": "1.0"}}"#,
    );
    geombound()
        .args(["bound", "--model", &model])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"provenance\": \"busy-period\""));
}

#[test]
fn bound_birth_death_reports_failed_assumption() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        &dir,
        "bd.json",
        r#"{"kind": "birth-death", "p": "0.2", "q": "0.5", "r": "0.3", "bd3_asserted": true}"#,
    );
    geombound()
        .args(["bound", "--model", &model])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("bd4"));
}

#[test]
fn bound_hazard_order_geometric_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let probs: Vec<String> = (0..60).map(|j| format!("\"{}\"", 0.5f64.powi(j + 1))).collect();
    let model = write_model(
        &dir,
        "hz.json",
        &format!(r#"{{"kind": "hazard-order", "probs": [{}]}}"#, probs.join(",")),
    );
    geombound()
        .args(["bound", "--model", &model])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"provenance\": \"hazard-order\""));
}

#[test]
fn bound_poisson_process_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        &dir,
        "pp.json",
        r#"{"kind": "poisson-process", "lambda": "0.4", "alpha": "1.0", "beta": "0.8"}"#,
    );
    geombound()
        .args(["bound", "--model", &model, "--csv"])
        .assert()
        .success()
        .stdout(predicate::str::contains("\n0,TV,"));
}

#[test]
fn bound_on_polya_pmf_matches_table_row() {
    // the ifr-corollary bound for Polya(10,10) is the 0.05263 of the
    // published table's upper-bound column
    let dir = tempfile::tempdir().unwrap();
    let w = geombound::pmf::polya_pmf(10, 10).unwrap();
    let probs: Vec<String> = w.probs().iter().map(|p| format!("\"{p}\"")).collect();
    let model = write_model(
        &dir,
        "polya.json",
        &format!(r#"{{"kind": "pmf", "probs": [{}]}}"#, probs.join(",")),
    );
    let out = geombound()
        .args(["bound", "--model", &model])
        .assert()
        .success();
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.get_output().stdout.clone()).unwrap()).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - 0.05263).abs() < 5e-5, "bound {value}");
    let exact_hi = v["exact_tv"]["hi"].as_f64().unwrap();
    assert!(exact_hi <= value + 1e-12);
}

#[test]
fn verify_orders_suite_passes() {
    geombound()
        .args(["verify", "--suite", "orders", "--seed", "99"])
        .assert()
        .success()
        .stdout(predicate::str::contains("suite orders: PASS"));
}

#[test]
fn verify_unknown_suite_is_input_error() {
    geombound()
        .args(["verify", "--suite", "nonsense"])
        .assert()
        .code(2);
}

#[test]
fn truncation_cap_env_var_limits_geometric_expansion() {
    // with a tiny cap the implied geometric keeps a visible tail, which
    // widens the reported exact-TV enclosure
    let dir = tempfile::tempdir().unwrap();
    let probs: Vec<String> = (0..60).map(|j| format!("\"{}\"", 0.5f64.powi(j + 1))).collect();
    let model = write_model(
        &dir,
        "geom.json",
        &format!(r#"{{"kind": "pmf", "probs": [{}]}}"#, probs.join(",")),
    );
    let capped = geombound()
        .args(["bound", "--model", &model])
        .env("GEOMBOUND_TRUNCATION_CAP", "5")
        .assert()
        .success();
    let out = String::from_utf8(capped.get_output().stdout.clone()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let lo = v["exact_tv"]["lo"].as_f64().unwrap();
    let hi = v["exact_tv"]["hi"].as_f64().unwrap();
    assert!(hi - lo > 0.01, "cap should leave a wide enclosure, got [{lo}, {hi}]");
}
