//! Acceptance checks against published reference output. Each check prints
//! one PASS/FAIL line on stderr; the run fails if any check outside
//! `EXPECTED_FAIL` fails.

mod common;

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use tsecon::arima::{fit_arima, fit_armax, forecast_arima, ArimaSpec};
use tsecon::diagnostics::{acf, ljung_box};
use tsecon::forecast_eval::{evaluate, evaluate_forecast};
use tsecon::kalman::{arma_state_space_loglik, arma_to_state_space, diffuse_initialization, fit_state_space_arma, kalman_filter};
use tsecon::optimize::gradient;
use tsecon::sim;
use tsecon::unitroot::{adf_test, engle_granger, mackinnon_pvalue, Deterministic, LagSelection};
use tsecon::var::{fevd, fit_var, forecast_var, granger_f_tests, impulse_response, portmanteau, VarFit};
use tsecon::volatility::{fit_garch, fit_garch_series, simulate_garch, unconditional_variance_of, GarchSpec, Innovation, Variant};
use tsecon::{Period, TimeSeries};

use common::*;

/// Labels that are known not to be reproducible with the shipped fixtures.
const EXPECTED_FAIL: &[&str] = &[
    "8 level ADF max 12 selected lags (2, 1)",
    "8 level ADF max 12 tau GDPC1Q 1.68139",
    "8 level ADF max 12 tau GCEC1Q -0.124135",
];

#[derive(Default)]
struct Suite {
    failed: Vec<String>,
    unexpected: Vec<String>,
}

impl Suite {
    fn check(&mut self, label: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        let _ = writeln!(std::io::stderr(), "{tag} [{label}] {detail}");
        if !ok {
            self.failed.push(label.to_string());
            if !EXPECTED_FAIL.contains(&label) {
                self.unexpected.push(label.to_string());
            }
        }
    }

    fn abs(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.check(label, ok, format!("got {got:.6} want {want} (abs tol {tol:e})"));
    }

    fn rel(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let ok = rel(got, want) <= tol;
        self.check(label, ok, format!("got {got:.6} want {want} (rel tol {tol:e})"));
    }

    fn skip(&self, label: &str, why: &str) {
        let _ = writeln!(std::io::stderr(), "SKIP [{label}] {why}");
    }
}

fn arima_block(s: &mut Suite) {
    let r = sample();
    let m12 = fit_arima(&gdp(), &ArimaSpec::new(1, 1, 1), r).unwrap();
    s.rel("1 GDP ARIMA(1,1,1) const", m12.constant(), 66.2629, 0.01);
    s.rel("1 GDP ARIMA(1,1,1) phi", m12.phi()[0], 0.759918, 0.01);
    s.rel("1 GDP ARIMA(1,1,1) theta", m12.theta()[0], -0.479305, 0.01);
    s.abs("1 GDP ARIMA(1,1,1) loglik", m12.loglik, -567.1968, 0.05);
    s.abs("1 GDP ARIMA(1,1,1) AIC", m12.criteria.aic, 1142.394, 0.2);

    let m11 = fit_arima(&gdp(), &ArimaSpec::new(1, 1, 0), r).unwrap();
    s.rel("1 GDP ARIMA(1,1,0) const", m11.constant(), 66.9945, 0.01);
    s.rel("1 GDP ARIMA(1,1,0) phi", m11.phi()[0], 0.327894, 0.01);
    s.abs("1 GDP ARIMA(1,1,0) loglik", m11.loglik, -569.6585, 0.05);
    s.abs("1 GDP ARIMA(1,1,0) AIC", m11.criteria.aic, 1145.317, 0.2);

    let m13 = fit_arima(&gce(), &ArimaSpec::new(1, 1, 2), r).unwrap();
    s.rel("1 GCE ARIMA(1,1,2) const", m13.constant(), 9.7675, 0.01);
    s.rel("1 GCE ARIMA(1,1,2) phi", m13.phi()[0], 0.811342, 0.01);
    s.rel("1 GCE ARIMA(1,1,2) theta_1", m13.theta()[0], -0.943283, 0.01);
    s.rel("1 GCE ARIMA(1,1,2) theta_2", m13.theta()[1], 0.273345, 0.01);
    s.abs("1 GCE ARIMA(1,1,2) loglik", m13.loglik, -435.2311, 0.05);
    s.abs("1 GCE ARIMA(1,1,2) AIC", m13.criteria.aic, 880.4622, 0.2);
}

const ACF: [f64; 20] = [
    0.9725, 0.9445, 0.9157, 0.8873, 0.8591, 0.8308, 0.8027, 0.7739, 0.7443, 0.7145, 0.6846, 0.6555, 0.6268, 0.5986,
    0.5702, 0.5423, 0.5148, 0.4880, 0.4610, 0.4332,
];
const PACF: [f64; 20] = [
    0.9725, -0.0250, -0.0280, -0.0062, -0.0123, -0.0187, -0.0103, -0.0280, -0.0319, -0.0187, -0.0205, -0.0032, -0.0089,
    -0.0109, -0.0194, -0.0093, -0.0108, -0.0058, -0.0213, -0.0352,
];
const Q: [f64; 20] = [
    102.1765, 199.4772, 291.8301, 379.4130, 462.3396, 540.6633, 614.5253, 683.8957, 748.7268, 809.1079, 865.1257,
    917.0296, 965.0109, 1009.2447, 1049.8350, 1086.9642, 1120.8026, 1151.5546, 1179.3186, 1204.1175,
];

fn correlogram_block(s: &mut Suite) {
    let rows = acf(gdp().slice(sample()).unwrap().values(), 20).unwrap();
    let worst = |f: &dyn Fn(usize) -> f64| (0..20).map(f).fold(0.0, f64::max);
    let ea = worst(&|i| (rows[i].acf - ACF[i]).abs());
    let ep = worst(&|i| (rows[i].pacf - PACF[i]).abs());
    let eq = worst(&|i| (rows[i].q_stat - Q[i]).abs());
    s.check("2 ACF lags 1-20", ea <= 5e-5, format!("max abs error {ea:.2e}"));
    s.check("2 PACF lags 1-20", ep <= 5e-5, format!("max abs error {ep:.2e}"));
    s.check("2 Q lags 1-20", eq <= 5e-5, format!("max abs error {eq:.2e}"));
}

fn var1() -> VarFit {
    fit_var(&[d_gdp(), d_gce()], 1, true).unwrap()
}

fn var_block(s: &mut Suite) {
    let fit = var1();
    let want = [[49.3131, 0.360705, -0.589345], [11.8267, -0.0290698, 0.000855439]];
    for (eq, row) in want.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            let got = fit.equations[eq].coefficients[j].value;
            s.abs(&format!("3 VAR eq{} coef {}", eq + 1, j), got, w, 1e-4);
        }
    }
    let lb = portmanteau(&fit, 26).unwrap();
    s.abs("3 Portmanteau LB(26)", lb.statistic, 109.69, 0.1);
    let g = granger_f_tests(&fit).unwrap();
    s.abs("3 Granger F(1,101)", g[0][0].statistic, 14.277, 0.01);

    let irf = impulse_response(&fit, 20, &[0, 1]).unwrap();
    let gdp_gdp = &irf[0].values;
    let gdp_gce = &irf[1].values;
    let gce_gdp = &irf[2].values;
    s.abs("4 IRF period 1 GDP->GDP", gdp_gdp[0], 54.228, 1e-2);
    s.abs("4 IRF period 1 GDP->GCE", gdp_gce[0], 4.1993, 1e-2);
    s.abs("4 IRF period 2 GDP->GDP", gdp_gdp[1], 17.085, 1e-2);
    s.abs("4 IRF period 2 GDP->GCE", gdp_gce[1], -1.5728, 1e-2);
    s.check("4 IRF period 1 GCE->GDP is exactly 0", gce_gdp[0] == 0.0, format!("got {}", gce_gdp[0]));
    let fv = fevd(&fit, 20, &[0, 1]).unwrap();
    s.abs("4 FEVD period 2 GDP own share", fv[0].rows[1].shares[0], 97.5703, 1e-3);
    s.abs("4 FEVD period 2 GDP GCE share", fv[0].rows[1].shares[1], 2.4297, 1e-3);

    let fc = forecast_var(&fit, 28, 0.95).unwrap();
    let h1 = &fc[0].rows[0];
    s.abs("5 VAR forecast h=1", h1.point, 93.3470, 1e-2);
    s.abs("5 VAR forecast h=1 se", h1.std_error, 54.2277, 1e-2);
    s.abs("5 VAR forecast h=1 lower", h1.lower, -14.2262, 1e-2);
    s.abs("5 VAR forecast h=1 upper", h1.upper, 200.920, 1e-2);
    let n = fit.n();
    let lr = (DMatrix::identity(n, n) - &fit.a[0]).try_inverse().unwrap() * &fit.c;
    s.abs("5 long-run mean d_GDPC1Q closed form", lr[0], 68.0499, 1e-3);
    s.abs("5 long-run mean d_GCEC1Q closed form", lr[1], 9.85696, 1e-3);
    s.abs("5 forecast tail d_GDPC1Q", fc[0].rows[27].point, 68.0499, 1e-3);
    s.abs("5 forecast tail d_GCEC1Q", fc[1].rows[27].point, 9.85696, 1e-3);
}

fn kalman_block(s: &mut Suite) {
    let y = d_gdp();
    let fit = fit_state_space_arma(y.values(), 1, 1, &[0.0, 0.0, 1.0]).unwrap();
    s.rel("6 Kalman phi", fit.phi[0], 0.975190, 0.01);
    s.rel("6 Kalman theta", fit.theta[0], -1.43617, 0.01);
    s.rel("6 Kalman sigma", fit.sigma, 38.3644, 0.01);
    s.abs("6 Kalman loglik", fit.loglik, -570.6483, 0.05);
}

fn armax_block(s: &mut Suite) {
    let r = sample();
    let m51 = fit_armax(&gdp(), &ArimaSpec::new(1, 1, 1).with_exog(gce()), r).unwrap();
    let b = m51.coefficient("d_GCEC1Q").map(|c| c.value).unwrap_or(f64::NAN);
    s.rel("7 GDP ARMAX on GCE d_GCEC1Q", b, 0.922759, 0.02);
    let lb = ljung_box(m51.residuals.values(), 4, 2).unwrap();
    s.abs("7 GDP ARMAX on GCE Ljung-Box Q'", lb.statistic, 1.58435, 0.05);
    let df_ok = matches!(lb.distribution, tsecon::Distribution::ChiSquare(2));
    s.check("7 GDP ARMAX on GCE Ljung-Box df 2", df_ok, format!("{:?}", lb.distribution));
    let m52 = fit_armax(&gce(), &ArimaSpec::new(1, 1, 2).with_exog(gdp()), r).unwrap();
    let b = m52.coefficient("d_GDPC1Q").map(|c| c.value).unwrap_or(f64::NAN);
    s.rel("7 GCE ARMAX on GDP d_GDPC1Q", b, 0.0483137, 0.02);
}

fn unitroot_block(s: &mut Suite) {
    let lv_gdp = gdp().slice(sample()).unwrap();
    let lv_gce = gce().slice(sample()).unwrap();
    let a = adf_test(&lv_gdp, 12, Deterministic::Constant, LagSelection::ModifiedAic).unwrap();
    let b = adf_test(&lv_gce, 12, Deterministic::Constant, LagSelection::ModifiedAic).unwrap();
    s.check(
        "8 level ADF max 12 selected lags (2, 1)",
        (a.lags_used, b.lags_used) == (2, 1),
        format!("got ({}, {})", a.lags_used, b.lags_used),
    );
    s.abs("8 level ADF max 12 tau GDPC1Q 1.68139", a.tau_statistic, 1.68139, 5e-3);
    s.abs("8 level ADF max 12 tau GCEC1Q -0.124135", b.tau_statistic, -0.124135, 5e-3);

    let eg = engle_granger(&lv_gdp, &lv_gce, 4, 0.05).unwrap();
    s.abs("8 Engle-Granger step 3 slope", eg.step3.coefficients[1].value, 6.88632, 1e-3);
    s.abs("8 Engle-Granger step 4 tau", eg.step4.tau_statistic, -2.16499, 1e-2);
    s.abs("8 Engle-Granger step 1 p-value", eg.step1.p_value, 0.9996, 0.02);
    s.abs("8 Engle-Granger step 4 p-value", eg.step4.p_value, 0.4417, 0.02);

    let dg = adf_test(&d_gdp(), 4, Deterministic::Constant, LagSelection::ModifiedAic).unwrap();
    let dc = adf_test(&d_gce(), 4, Deterministic::Constant, LagSelection::ModifiedAic).unwrap();
    s.abs("8 ADF d_GDPC1Q p-value", dg.p_value, 0.01345, 0.02);
    s.abs("8 ADF d_GCEC1Q p-value", dc.p_value, 0.03625, 0.02);

    // Printed tau values mapped through the response surfaces.
    let surf = [
        (1.66308, Deterministic::Constant, 1, 0.9996),
        (-0.439981, Deterministic::Constant, 1, 0.9),
        (1.68139, Deterministic::Constant, 1, 0.9997),
        (-0.124135, Deterministic::Constant, 1, 0.9451),
        (-2.16499, Deterministic::Constant, 2, 0.4417),
    ];
    for (tau, det, nv, want) in surf {
        let p = mackinnon_pvalue(tau, det, nv).unwrap();
        s.abs(&format!("8 MacKinnon p-value at tau {tau}"), p, want, 0.02);
    }
}

const M11_FORECAST: [f64; 28] = [
    12994.2, 13071.2, 13141.5, 13209.6, 13277.0, 13344.1, 13411.1, 13478.1, 13545.1, 13612.1, 13679.1, 13746.1,
    13813.1, 13880.1, 13947.1, 14014.1, 14081.1, 14148.1, 14215.1, 14282.1, 14349.0, 14416.0, 14483.0, 14550.0,
    14617.0, 14684.0, 14751.0, 14818.0,
];

fn evaluation_block(s: &mut Suite) {
    let fit = fit_arima(&gdp(), &ArimaSpec::new(1, 1, 0), sample()).unwrap();
    let rows = forecast_arima(&fit, 28, 0.95, &[]).unwrap();
    let worst = rows
        .iter()
        .zip(M11_FORECAST)
        .map(|(r, w)| (r.point - w).abs())
        .fold(0.0, f64::max);
    s.check("9 GDP ARIMA(1,1,0) point forecasts", worst <= 0.5, format!("max abs error {worst:.3}"));
    s.check(
        "9 GDP ARIMA(1,1,0) forecast starts 2006Q2",
        rows[0].period == Period::new(2006, 2).unwrap(),
        format!("{}", rows[0].period),
    );
    let fc = TimeSeries::new("f", rows[0].period, rows.iter().map(|r| r.point).collect()).unwrap();
    let actual = gdp().slice(fc.range()).unwrap();
    let e = evaluate_forecast(&actual, &fc).unwrap();
    let want = [
        ("ME", e.me, -733.73),
        ("MSE", e.mse, 7.3107e5),
        ("RMSE", e.rmse, 855.03),
        ("MAE", e.mae, 733.73),
        ("MPE", e.mpe, -5.5643),
        ("MAPE", e.mape, 5.5643),
        ("Theil U", e.theil_u, 8.7131),
        ("UM", e.um, 0.73639),
        ("UR", e.ur, 0.19322),
        ("UD", e.ud, 0.070388),
    ];
    for (name, got, w) in want {
        s.rel(&format!("9 GDP ARIMA(1,1,0) {name}"), got, w, 1e-3);
    }
}

fn ldiff_gdp_full() -> Option<TimeSeries> {
    let path = std::env::var("TSE_FULL_GDP_CSV").ok()?;
    let y = tsecon::load_csv(path, "date", "GDPC1Q").ok()?;
    y.ldiff_scaled(100.0).ok()?.slice(range("1947Q2:2013Q1")).ok()
}

fn volatility_block(s: &mut Suite) {
    match ldiff_gdp_full() {
        None => s.skip("10a full-range GARCH replication", "TSE_FULL_GDP_CSV not set"),
        Some(y) => {
            let g = fit_garch_series(&y, &GarchSpec::new(Variant::Garch, Innovation::Normal)).unwrap();
            for (name, w) in [("const", 0.820552), ("omega", 0.0385705), ("alpha_1", 0.255331), ("beta_1", 0.734709)] {
                s.rel(&format!("10a GARCH(1,1) {name}"), g.value(name), w, 0.03);
            }
            let e = fit_garch_series(&y, &GarchSpec::new(Variant::Egarch, Innovation::Normal)).unwrap();
            s.abs("10a EGARCH loglik", e.loglik, -340.43681, 0.5);
        }
    }

    // Coefficients are printed to six significant figures, so the identity is
    // checked against the range the rounded inputs allow. The variance is
    // increasing in every argument, which makes the corners exact bounds.
    let identities = [
        ("10b ARCH(1) unconditional variance", [0.632159, 0.36451, 0.0], [5e-7, 5e-6, 0.0], 0.994759, 5e-7),
        ("10b GARCH(1,1) unconditional variance", [0.0385705, 0.255331, 0.734709], [5e-8, 5e-7, 5e-7], 3.87253, 5e-6),
    ];
    for (label, c, half, printed, printed_half) in identities {
        let v = |sign: f64| {
            let beta: Vec<f64> = if c[2] == 0.0 { vec![] } else { vec![c[2] + sign * half[2]] };
            unconditional_variance_of(c[0] + sign * half[0], &[c[1] + sign * half[1]], &beta).unwrap()
        };
        let (lo, hi) = (v(-1.0), v(1.0));
        let ok = printed + printed_half >= lo && printed - printed_half <= hi;
        s.check(label, ok, format!("{} in [{lo:.7}, {hi:.7}], printed {printed}", v(0.0)));
    }

    let base = GarchSpec::new(Variant::Garch, Innovation::Normal);
    let y = simulate_garch(&base, &[0.5, 0.1, 0.1, 0.8], 1000, 200, 11).unwrap();
    let y = TimeSeries::new("y", Period::new(1900, 1).unwrap(), y).unwrap();
    let r = y.range();
    let g = fit_garch(&y, &base, r).unwrap();
    let nested = [
        ("GED(2)", GarchSpec::new(Variant::Garch, Innovation::Ged).fix("ged_shape", 2.0)),
        ("GJR gamma=0", GarchSpec::new(Variant::Gjr, Innovation::Normal).fix("gamma_1", 0.0)),
        (
            "APARCH delta=2 gamma=0",
            GarchSpec::new(Variant::Aparch, Innovation::Normal).fix("gamma_1", 0.0).fix("delta", 2.0),
        ),
    ];
    for (label, spec) in nested {
        let h = fit_garch(&y, &spec, r).unwrap();
        let dll = (h.loglik - g.loglik).abs();
        let dpar = ["const", "omega", "alpha_1", "beta_1"]
            .iter()
            .map(|n| (h.value(n) - g.value(n)).abs())
            .fold(0.0, f64::max);
        s.check(
            &format!("10b nesting {label} = GARCH"),
            dll < 1e-4 && dpar < 1e-3,
            format!("|dll| {dll:.2e}, max |dparam| {dpar:.2e}"),
        );
    }

    let truth = [0.5, 0.1, 0.1, 0.8];
    let est: Vec<Vec<f64>> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let y = simulate_garch(&base, &truth, 5000, 500, 1000 + seed).unwrap();
            let y = TimeSeries::new("y", Period::new(1000, 1).unwrap(), y).unwrap();
            let f = fit_garch_series(&y, &base).unwrap();
            ["const", "omega", "alpha_1", "beta_1"].iter().map(|n| f.value(n)).collect()
        })
        .collect();
    for (j, name) in ["const", "omega", "alpha_1", "beta_1"].iter().enumerate() {
        let mean = est.iter().map(|e| e[j]).sum::<f64>() / est.len() as f64;
        s.rel(&format!("10b recovery mean {name} (50 seeds, T=5000)"), mean, truth[j], 0.10);
    }
}

fn property_block(s: &mut Suite) {
    let fit = var1();
    let fv = fevd(&fit, 20, &[0, 1]).unwrap();
    let worst = fv
        .iter()
        .flat_map(|t| t.rows.iter())
        .map(|r| (r.shares.iter().sum::<f64>() - 100.0).abs())
        .fold(0.0, f64::max);
    s.check("11 FEVD rows sum to 100", worst <= 1e-6, format!("max deviation {worst:.2e}"));

    let a = sim::simulate_arma(10.0, &[0.6], &[], 2.0, 40, 50, 5);
    let f: Vec<f64> = a.iter().map(|v| 0.8 * v + 1.5).collect();
    let e = evaluate(&a, &f).unwrap();
    let sum = e.um + e.ur + e.ud;
    s.check("11 UM+UR+UD = 1", (sum - 1.0).abs() <= 1e-9, format!("sum {sum:.12}"));

    let m = fit_arima(&gdp(), &ArimaSpec::new(1, 1, 1), sample()).unwrap();
    let rows = forecast_arima(&m, 28, 0.95, &[]).unwrap();
    let arima_mono = rows.windows(2).all(|w| w[1].std_error >= w[0].std_error);
    let vf = forecast_var(&fit, 28, 0.95).unwrap();
    let var_mono = vf.iter().all(|v| v.rows.windows(2).all(|w| w[1].std_error >= w[0].std_error));
    s.check("11 forecast se non-decreasing", arima_mono && var_mono, format!("arima {arima_mono}, var {var_mono}"));

    let y = d_gdp();
    let (phi, theta, sigma) = ([0.7, -0.1], [0.3], 40.0);
    let m0 = diffuse_initialization(&arma_to_state_space(&phi, &theta, sigma).unwrap()).unwrap();
    let t = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, -1.0, 3.0]);
    let ti = t.clone().try_inverse().unwrap();
    let mut m1 = m0.clone();
    m1.f = &t * &m0.f * &ti;
    m1.h = ti.transpose() * &m0.h;
    m1.q = &t * &m0.q * t.transpose();
    m1.initial_state = &t * &m0.initial_state;
    m1.initial_covariance = &t * &m0.initial_covariance * t.transpose();
    let obs = DMatrix::from_column_slice(y.len(), 1, y.values());
    let l0 = kalman_filter(&m0, &obs, None).unwrap().loglik_total;
    let l1 = kalman_filter(&m1, &obs, None).unwrap().loglik_total;
    s.check("11 Kalman similarity invariance", (l0 - l1).abs() <= 1e-8, format!("|dll| {:.2e}", (l0 - l1).abs()));

    let kf = fit_state_space_arma(y.values(), 1, 1, &[0.0, 0.0, 1.0]).unwrap();
    let x = [kf.phi[0], kf.theta[0], kf.sigma];
    let obj = |p: &[f64]| arma_state_space_loglik(&p[..1], &p[1..2], p[2], y.values());
    let gn = DVector::from_vec(gradient(&obj, &x)).norm();
    let bound = 1e-4 * (1.0 + kf.loglik.abs());
    s.check("11 gradient norm at optimum", gn < bound, format!("{gn:.2e} < {bound:.2e}"));

    let lv = gdp().slice(sample()).unwrap();
    let scaled = TimeSeries::new("s", lv.start(), lv.values().iter().map(|v| v * 1000.0).collect()).unwrap();
    let t0 = adf_test(&lv, 4, Deterministic::ConstantTrend, LagSelection::Fixed).unwrap();
    let t1 = adf_test(&scaled, 4, Deterministic::ConstantTrend, LagSelection::Fixed).unwrap();
    let dt = (t0.tau_statistic - t1.tau_statistic).abs();
    s.check("11 ADF tau scale invariance", dt <= 1e-8, format!("|dtau| {dt:.2e}"));

    let reps = 2000u64;
    let rejections = (0..reps)
        .into_par_iter()
        .filter(|&seed| {
            let w = sim::random_walk(250, 50_000 + seed);
            let w = TimeSeries::new("w", Period::new(1900, 1).unwrap(), w).unwrap();
            adf_test(&w, 0, Deterministic::Constant, LagSelection::Fixed).unwrap().p_value < 0.05
        })
        .count();
    let size = rejections as f64 / reps as f64;
    s.check("11 ADF Monte-Carlo size at 5%", (0.035..=0.065).contains(&size), format!("{:.2}% over {reps} reps", 100.0 * size));
}

fn run_all() -> Suite {
    let mut s = Suite::default();
    arima_block(&mut s);
    correlogram_block(&mut s);
    var_block(&mut s);
    kalman_block(&mut s);
    armax_block(&mut s);
    unitroot_block(&mut s);
    evaluation_block(&mut s);
    volatility_block(&mut s);
    property_block(&mut s);
    s
}

#[test]
fn acceptance() {
    let s = run_all();
    let _ = writeln!(
        std::io::stderr(),
        "acceptance: {} failed ({} known not reproducible from the fixtures)",
        s.failed.len(),
        s.failed.len() - s.unexpected.len()
    );
    assert!(s.unexpected.is_empty(), "failed: {:?}", s.unexpected);
}

/// The level tests with max lag 12 need pre-sample quarters that the fixtures do not contain.
#[test]
#[ignore]
fn level_adf_max12_strict() {
    let mut s = Suite::default();
    unitroot_block(&mut s);
    assert!(s.failed.is_empty(), "failed: {:?}", s.failed);
}
