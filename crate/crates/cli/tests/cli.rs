use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tsecon::diagnostics::{self, CorrelogramRow};
use tsecon::{load_csv, Period};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tsecon"))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn gdp_args<'a>(extra: &[&'a str]) -> Vec<String> {
    let mut v = vec!["--data".to_string(), data("gdpc1q.csv"), "--data".into(), data("gcec1q.csv")];
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn run_json(cmd: &str, extra: &[&str]) -> Value {
    let mut args = vec![cmd.to_string()];
    args.extend(gdp_args(extra));
    args.extend(["--format".to_string(), "json".to_string()]);
    let out = bin().args(&args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    check_schema(&v);
    v
}

fn check_schema(v: &Value) {
    let schema: Value = serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

fn write_csv(dir: &Path, name: &str, cols: &[(&str, Vec<f64>)]) -> String {
    let mut s = String::from("date");
    for (n, _) in cols {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    let start = Period::new(1950, 1).unwrap();
    for t in 0..cols[0].1.len() {
        s.push_str(&start.add(t as i64).to_string());
        for (_, v) in cols {
            s.push_str(&format!(",{}", v[t]));
        }
        s.push('\n');
    }
    let p = dir.join(name);
    std::fs::write(&p, s).unwrap();
    p.to_string_lossy().into_owned()
}

const SAMPLE: &str = "1980Q1:2006Q1";
const FORECAST: &str = "2006Q2:2013Q1";

#[test]
fn correlogram_rows_and_json_round_trip() {
    let v = run_json("correlogram", &["--var", "GDPC1Q", "--sample", SAMPLE, "--max-lag", "20"]);
    let rows: Vec<CorrelogramRow> = serde_json::from_value(v["result"]["correlogram"]["rows"].clone()).unwrap();
    assert_eq!(rows.len(), 20);
    assert!((rows[0].acf - 0.9725).abs() < 5e-5);
    let gdp = load_csv(data("gdpc1q.csv"), "date", "GDPC1Q").unwrap();
    let direct = diagnostics::acf(gdp.slice(SAMPLE.parse().unwrap()).unwrap().values(), 20).unwrap();
    for (a, b) in rows.iter().zip(&direct) {
        assert_eq!(a.lag, b.lag);
        assert_eq!(a.acf_significant, b.acf_significant);
        assert_eq!(a.pacf_significant, b.pacf_significant);
        for (x, y) in [(a.acf, b.acf), (a.pacf, b.pacf), (a.q_stat, b.q_stat)] {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }
}

#[test]
fn max_lag_zero_is_a_usage_error() {
    let mut args = vec!["correlogram".to_string()];
    args.extend(gdp_args(&["--var", "GDPC1Q", "--max-lag", "0"]));
    let out = bin().args(&args).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn forecast_range_must_follow_sample() {
    let mut args = vec!["arima".to_string()];
    args.extend(gdp_args(&["--var", "GDPC1Q", "--sample", SAMPLE, "--forecast", "2005Q1:2007Q1"]));
    let out = bin().args(&args).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_series_and_missing_data() {
    let mut args = vec!["adf".to_string()];
    args.extend(gdp_args(&["--var", "NOPE"]));
    assert_eq!(bin().args(&args).output().unwrap().status.code(), Some(2));
    assert_eq!(run(&["adf", "--var", "GDPC1Q"]).status.code(), Some(2));
    assert_eq!(run(&["adf", "--data", "/nonexistent.csv", "--var", "GDPC1Q"]).status.code(), Some(1));
}

#[test]
fn arima_report_reproduces_model_1_2() {
    let v = run_json(
        "arima",
        &["--var", "GDPC1Q", "--sample", SAMPLE, "--forecast", FORECAST, "--p", "1", "--d", "1", "--q", "1"],
    );
    let fit = &v["result"]["fit"];
    let coef = |i: usize| fit["coefficients"][i]["value"].as_f64().unwrap();
    assert!((coef(0) / 66.2629 - 1.0).abs() < 0.01);
    assert!((coef(1) / 0.759918 - 1.0).abs() < 0.01);
    assert!((coef(2) / -0.479305 - 1.0).abs() < 0.01);
    assert!((fit["loglik"].as_f64().unwrap() + 567.1968).abs() < 0.05);
    assert_eq!(v["result"]["forecast"].as_array().unwrap().len(), 28);
    let ev = &v["result"]["evaluation"];
    assert!((ev["mape"].as_f64().unwrap() - 5.96958).abs() < 1e-3);
    assert!((ev["theil_u"].as_f64().unwrap() - 9.24435).abs() < 1e-3);
}

#[test]
fn screening_table_matches_battery() {
    let v = run_json("arima", &["--var", "GDPC1Q", "--sample", SAMPLE, "--screen"]);
    let rows = v["result"]["screen"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let models: Vec<&str> = rows.iter().map(|r| r["model"].as_str().unwrap()).collect();
    assert_eq!(models, ["ARIMA(1,1,0)", "ARIMA(0,1,1)", "ARIMA(1,1,1)", "ARIMA(2,1,0)", "ARIMA(0,1,2)"]);
    let p = |r: &Value, k: &str| r["battery"][k]["p_value"].as_f64().unwrap();
    assert!((p(&rows[0], "normality") - 0.04063).abs() < 5e-5);
    assert!((p(&rows[0], "ljung_box") - 0.02181).abs() < 5e-5);
    assert!((p(&rows[2], "arch") - 0.0147128).abs() < 5e-5);
    let pass: Vec<bool> = rows.iter().map(|r| r["pass"].as_bool().unwrap()).collect();
    assert_eq!(pass, [true, false, false, false, false]);
}

#[test]
fn arima_without_differencing_on_stationary_data() {
    let dir = tempfile::tempdir().unwrap();
    let y = tsecon::sim::simulate_arma(1.0, &[0.5], &[0.3], 1.0, 200, 100, 3);
    let path = write_csv(dir.path(), "y.csv", &[("y", y)]);
    let out = run(&["arima", "--data", &path, "--var", "y", "--d", "0", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["fit"]["spec"]["d"], 0);
    assert_eq!(v["result"]["fit"]["nobs"], 200);
}

#[test]
fn var_blocks_and_irf_horizon() {
    let v = run_json(
        "var",
        &[
            "--var", "GDPC1Q", "--var", "GCEC1Q", "--transform", "diff", "--sample", SAMPLE, "--max-lag", "8", "--lags",
            "1", "--forecast", FORECAST,
        ],
    );
    let r = &v["result"];
    assert_eq!(r["lag_selection"]["best_aic"], 3);
    assert_eq!(r["lag_selection"]["best_bic"], 1);
    assert!((r["fit"]["loglik"].as_f64().unwrap() + 993.6076).abs() < 1e-3);
    let irf = r["irf"].as_array().unwrap();
    assert_eq!(irf.len(), 4);
    for t in irf {
        assert_eq!(t["values"].as_array().unwrap().len(), 20);
    }
    assert!((irf[0]["values"][0].as_f64().unwrap() - 54.2277).abs() < 1e-3);
    let f0 = &r["forecast"][0]["rows"][0];
    assert!((f0["point"].as_f64().unwrap() - 93.3470).abs() < 1e-3);
}

#[test]
fn unstable_var_warns_and_gates_irf() {
    let dir = tempfile::tempdir().unwrap();
    let n = 120;
    let (mut a, mut b) = (vec![1.0], vec![1.0]);
    let e = tsecon::sim::standard_normal(2 * n, 11);
    for t in 1..n {
        a.push(1.04 * a[t - 1] + e[t]);
        b.push(0.5 * b[t - 1] + 0.1 * a[t - 1] + e[n + t]);
    }
    let path = write_csv(dir.path(), "u.csv", &[("a", a), ("b", b)]);
    let base = ["var", "--data", &path, "--var", "a", "--var", "b", "--format", "json"];
    let out = run(&base);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["stable"], false);
    assert!(v["result"]["irf"].as_array().unwrap().is_empty());
    assert!(!v["warnings"].as_array().unwrap().is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not stable"));

    let mut forced = base.to_vec();
    forced.push("--force-irf");
    let v: Value = serde_json::from_slice(&run(&forced).stdout).unwrap();
    assert_eq!(v["result"]["irf"].as_array().unwrap().len(), 4);
}

#[test]
fn varma_systems() {
    let v = run_json("varma", &["--var", "GDPC1Q", "--var", "GCEC1Q", "--sample", SAMPLE]);
    let bp = v["result"]["system"]["breusch_pagan"]["statistic"].as_f64().unwrap();
    assert!((bp - 6.30863).abs() < 1e-3);
    let v = run_json("varma", &["--var", "GDPC1Q", "--var", "GCEC1Q", "--sample", SAMPLE, "--ma-lags", "2"]);
    let bp = v["result"]["system"]["breusch_pagan"]["statistic"].as_f64().unwrap();
    assert!((bp - 7.20435).abs() < 1e-3);
}

#[test]
fn unit_root_and_cointegration_blocks() {
    let v = run_json("adf", &["--var", "GDPC1Q", "--transform", "diff", "--sample", SAMPLE, "--max-lag", "4"]);
    let t = &v["result"]["tests"][0];
    assert_eq!(t["lags_used"], 3);
    assert!((t["tau_statistic"].as_f64().unwrap() + 3.33419).abs() < 1e-4);

    let v = run_json("coint", &["--var", "GDPC1Q", "--var", "GCEC1Q", "--sample", SAMPLE, "--max-lag", "4"]);
    let r = &v["result"]["report"];
    assert!((r["step4"]["tau_statistic"].as_f64().unwrap() + 2.16499).abs() < 1e-4);
    assert_eq!(r["conclusion"], "NotCointegrated");
}

#[test]
fn kalman_matches_exact_ml_and_start_values() {
    let base = ["--var", "GDPC1Q", "--transform", "diff", "--sample", SAMPLE];
    let k1 = run_json("kalman", &base);
    let mut alt = base.to_vec();
    alt.extend(["--sigma-start", "10"]);
    let k10 = run_json("kalman", &alt);
    let f = &k1["result"]["fit"];
    assert!((f["phi"][0].as_f64().unwrap() - 0.975190).abs() < 1e-3);
    assert!((f["theta"][0].as_f64().unwrap() + 1.43617).abs() < 1e-3);
    assert!((f["sigma"].as_f64().unwrap() - 38.3644).abs() < 0.01);
    for k in ["phi", "theta"] {
        let a = f[k][0].as_f64().unwrap();
        let b = k10["result"]["fit"][k][0].as_f64().unwrap();
        assert!((a - b).abs() < 1e-3);
    }

    let mut arima = base.to_vec();
    arima.extend(["--p", "1", "--d", "0", "--q", "1", "--no-const"]);
    let a = run_json("arima", &arima);
    let ll_a = a["result"]["fit"]["loglik"].as_f64().unwrap();
    let ll_k = f["loglik"].as_f64().unwrap();
    assert!((ll_a - ll_k).abs() < 1e-4, "{ll_a} vs {ll_k}");
}

#[test]
fn garch_compare_matrix_and_simulation_determinism() {
    let args = ["garch", "--simulate", "--seed", "5", "--nobs", "300", "--compare", "--format", "json"];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    check_schema(&v);
    let rows = v["result"]["comparison"].as_array().unwrap();
    assert_eq!(rows.len(), 40);
    assert_eq!(rows.iter().filter(|r| r["best_aic"] == true).count(), 1);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn garch_single_fit_block() {
    let v = run_json("garch", &["--var", "GDPC1Q", "--transform", "ldiff100", "--sample", "1980Q2:2013Q1"]);
    let fit = &v["result"]["fit"];
    assert_eq!(fit["nobs"], 132);
    let names: Vec<&str> = fit["coefficients"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["const", "omega", "alpha_1", "beta_1"]);
    assert!(fit["loglik"].as_f64().unwrap().is_finite());
}

#[test]
fn evaluate_and_armax() {
    let v = run_json("evaluate", &["--var", "GDPC1Q", "--var", "GDPC1Q", "--sample", SAMPLE]);
    assert_eq!(v["result"]["evaluation"]["perfect"], true);
    let v = run_json("armax", &["--var", "GDPC1Q", "--exog", "GCEC1Q", "--sample", SAMPLE]);
    assert!((v["result"]["fit"]["loglik"].as_f64().unwrap() + 562.9434).abs() < 0.05);
}

#[test]
fn out_dir_plot_files_and_stable_text() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_string_lossy().into_owned();
    let mut args = vec!["arima".to_string()];
    args.extend(gdp_args(&["--var", "GDPC1Q", "--sample", SAMPLE, "--forecast", FORECAST, "--out", &out]));
    let first = bin().args(&args).output().unwrap();
    assert!(first.status.success());
    for f in ["arima.txt", "residuals.dat", "forecast.dat"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let fan = std::fs::read_to_string(dir.path().join("forecast.dat")).unwrap();
    assert!(fan.starts_with("# x y lo hi"));
    assert_eq!(fan.lines().count(), 29);
    let second = bin().args(&args).output().unwrap();
    assert_eq!(first.stdout, second.stdout);

    let mut args = vec!["correlogram".to_string()];
    args.extend(gdp_args(&["--var", "GDPC1Q", "--out", &out, "--format", "csv"]));
    assert!(bin().args(&args).output().unwrap().status.success());
    let acf = std::fs::read_to_string(dir.path().join("acf.dat")).unwrap();
    assert_eq!(acf.lines().next(), Some("# x y"));
    assert!(dir.path().join("correlogram.csv").exists());
}
