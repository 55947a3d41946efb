//! VAR(p) estimation, lag selection, impulse responses, variance decomposition,
//! forecasting, and the two-step VARMA system regression.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diagnostics;
use crate::error::{domain, numerical, Result};
use crate::linalg::{self, Regression};
use crate::series::{Period, SampleRange, TimeSeries};
use crate::stats::{self, TestResult};

const LN_2PI: f64 = 1.837_877_066_409_345_3;

fn check_aligned(data: &[TimeSeries]) -> Result<()> {
    if data.is_empty() {
        return domain("at least one series is required");
    }
    let (s, n) = (data[0].start(), data[0].len());
    if data.iter().any(|d| d.start() != s || d.len() != n) {
        return domain("series must cover the same periods");
    }
    Ok(())
}

/// Regressor matrix [const, y_{t-1}', …, y_{t-p}'] for rows `first..N`.
fn var_design(data: &[TimeSeries], p: usize, first: usize, include_const: bool) -> DMatrix<f64> {
    let n = data.len();
    let rows = data[0].len() - first;
    let c = include_const as usize;
    DMatrix::from_fn(rows, c + n * p, |i, j| {
        if j < c {
            return 1.0;
        }
        let lag = (j - c) / n + 1;
        let var = (j - c) % n;
        data[var].values()[first + i - lag]
    })
}

fn regressor_names(data: &[TimeSeries], p: usize, include_const: bool) -> Vec<String> {
    let mut names = Vec::new();
    if include_const {
        names.push("const".to_string());
    }
    for lag in 1..=p {
        for d in data {
            names.push(format!("{}_{lag}", d.name()));
        }
    }
    names
}

fn gaussian_loglik(sigma_ml: &DMatrix<f64>, t: usize) -> f64 {
    let n = sigma_ml.nrows() as f64;
    let tf = t as f64;
    -0.5 * tf * n * (1.0 + LN_2PI) - 0.5 * tf * sigma_ml.determinant().ln()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarFit {
    pub lag_order: usize,
    pub include_const: bool,
    pub variable_names: Vec<String>,
    pub sample: SampleRange,
    pub nobs: usize,
    pub equations: Vec<Regression>,
    /// T×n
    pub residuals: DMatrix<f64>,
    pub sigma_ml: DMatrix<f64>,
    pub sigma_ols: DMatrix<f64>,
    pub loglik: f64,
    /// Per-observation criteria, (−2ll + penalty)/T.
    pub aic: f64,
    pub bic: f64,
    pub hqc: f64,
    /// Lag matrices A_1..A_p.
    pub a: Vec<DMatrix<f64>>,
    pub c: DVector<f64>,
    xtx_inv: DMatrix<f64>,
    /// Last p observations, oldest first.
    tail: Vec<DVector<f64>>,
}

impl VarFit {
    pub fn n(&self) -> usize {
        self.variable_names.len()
    }

    /// Regressors per equation.
    pub fn k(&self) -> usize {
        self.include_const as usize + self.n() * self.lag_order
    }

    pub fn df_resid(&self) -> usize {
        self.nobs - self.k()
    }

    pub fn determinant(&self) -> f64 {
        self.sigma_ml.determinant()
    }

    pub fn companion(&self) -> DMatrix<f64> {
        let n = self.n();
        let np = n * self.lag_order;
        let mut m = DMatrix::zeros(np, np);
        for (l, a) in self.a.iter().enumerate() {
            m.view_mut((0, l * n), (n, n)).copy_from(a);
        }
        for i in n..np {
            m[(i, i - n)] = 1.0;
        }
        m
    }

    /// Moving-average matrices Ψ_0 = I, Ψ_1, … (non-orthogonalized).
    pub fn psi(&self, horizon: usize) -> Vec<DMatrix<f64>> {
        let n = self.n();
        let comp = self.companion();
        let np = comp.nrows();
        let mut pow = DMatrix::<f64>::identity(np, np);
        (0..horizon)
            .map(|_| {
                let out = pow.view((0, 0), (n, n)).into_owned();
                pow = &comp * &pow;
                out
            })
            .collect()
    }
}

fn fit_on_rows(data: &[TimeSeries], p: usize, first: usize, include_const: bool) -> Result<VarFit> {
    let n = data.len();
    let x = var_design(data, p, first, include_const);
    let names = regressor_names(data, p, include_const);
    let t = x.nrows();
    if t <= x.ncols() {
        return domain(format!("{t} observations are too few for a VAR({p})"));
    }
    let mut equations = Vec::with_capacity(n);
    let mut residuals = DMatrix::zeros(t, n);
    let mut coef = DMatrix::zeros(n, x.ncols());
    let mut xtx_inv = DMatrix::zeros(0, 0);
    for (i, d) in data.iter().enumerate() {
        let y = &d.values()[first..];
        let fit = linalg::ols(y, &x)?;
        for (j, e) in fit.resid.iter().enumerate() {
            residuals[(j, i)] = *e;
        }
        coef.set_row(i, &fit.coef.transpose());
        xtx_inv = fit.xtx_inv.clone();
        equations.push(Regression::from_ols(&fit, d.name(), &names));
    }
    let sigma_ml = residuals.transpose() * &residuals / t as f64;
    let sigma_ols = residuals.transpose() * &residuals / (t - x.ncols()) as f64;
    let loglik = gaussian_loglik(&sigma_ml, t);
    let kk = (n * x.ncols()) as f64;
    let tf = t as f64;
    let c0 = include_const as usize;
    let c = if include_const {
        coef.column(0).into_owned()
    } else {
        DVector::zeros(n)
    };
    let a = (0..p)
        .map(|l| coef.view((0, c0 + l * n), (n, n)).into_owned())
        .collect();
    let len = data[0].len();
    let tail = (len - p..len)
        .map(|i| DVector::from_iterator(n, data.iter().map(|d| d.values()[i])))
        .collect();
    Ok(VarFit {
        lag_order: p,
        include_const,
        variable_names: data.iter().map(|d| d.name().to_string()).collect(),
        sample: SampleRange {
            from: data[0].period_at(first),
            to: data[0].end(),
        },
        nobs: t,
        equations,
        residuals,
        sigma_ml,
        sigma_ols,
        loglik,
        aic: (-2.0 * loglik + 2.0 * kk) / tf,
        bic: (-2.0 * loglik + kk * tf.ln()) / tf,
        hqc: (-2.0 * loglik + 2.0 * kk * tf.ln().ln()) / tf,
        a,
        c,
        xtx_inv,
        tail,
    })
}

/// Equation-by-equation OLS; the first p observations serve as pre-sample lags.
pub fn fit_var(data: &[TimeSeries], p: usize, include_const: bool) -> Result<VarFit> {
    check_aligned(data)?;
    if p == 0 {
        return domain("VAR lag order must be at least 1");
    }
    if data[0].len() <= p + data.len() * p + 1 {
        return domain("sample too short for the requested lag order");
    }
    fit_on_rows(data, p, p, include_const)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSelectionRow {
    pub lag: usize,
    pub loglik: f64,
    /// LR test of this lag against the previous one.
    pub lr_p_value: Option<f64>,
    pub aic: f64,
    pub bic: f64,
    pub hqc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSelection {
    pub rows: Vec<LagSelectionRow>,
    pub best_aic: usize,
    pub best_bic: usize,
    pub best_hqc: usize,
}

/// Fits lags 1..=max_lag on the common sample left after `max_lag` pre-sample rows.
pub fn select_lag_order(data: &[TimeSeries], max_lag: usize, include_const: bool) -> Result<LagSelection> {
    check_aligned(data)?;
    if max_lag == 0 {
        return domain("max lag must be at least 1");
    }
    let n = data.len();
    if data[0].len() <= max_lag + n * max_lag + 1 {
        return domain("sample too short for the maximum lag order");
    }
    let fits: Vec<VarFit> = (1..=max_lag)
        .map(|p| fit_on_rows(data, p, max_lag, include_const))
        .collect::<Result<_>>()?;
    let rows: Vec<LagSelectionRow> = fits
        .iter()
        .enumerate()
        .map(|(i, f)| LagSelectionRow {
            lag: f.lag_order,
            loglik: f.loglik,
            lr_p_value: (i > 0).then(|| {
                stats::chi2_sf(2.0 * (f.loglik - fits[i - 1].loglik), (n * n) as f64)
            }),
            aic: f.aic,
            bic: f.bic,
            hqc: f.hqc,
        })
        .collect();
    let argmin = |key: fn(&LagSelectionRow) -> f64| {
        rows.iter()
            .min_by(|a, b| key(a).partial_cmp(&key(b)).unwrap())
            .map(|r| r.lag)
            .unwrap()
    };
    Ok(LagSelection {
        best_aic: argmin(|r| r.aic),
        best_bic: argmin(|r| r.bic),
        best_hqc: argmin(|r| r.hqc),
        rows,
    })
}

/// F-tests that all lags of each variable are zero, per equation: result[eq][var].
pub fn granger_f_tests(fit: &VarFit) -> Result<Vec<Vec<TestResult>>> {
    let n = fit.n();
    let c0 = fit.include_const as usize;
    let s2: Vec<f64> = fit
        .equations
        .iter()
        .map(|e| e.ssr / fit.df_resid() as f64)
        .collect();
    let mut out = Vec::with_capacity(n);
    for (eq, reg) in fit.equations.iter().enumerate() {
        let mut row = Vec::with_capacity(n);
        for v in 0..n {
            let idx: Vec<usize> = (0..fit.lag_order).map(|l| c0 + l * n + v).collect();
            let q = idx.len();
            let b = DVector::from_iterator(q, idx.iter().map(|&i| reg.coefficients[i].value));
            let cov = DMatrix::from_fn(q, q, |a, c| fit.xtx_inv[(idx[a], idx[c])] * s2[eq]);
            let Some(ci) = cov.try_inverse() else {
                return numerical("singular restriction covariance");
            };
            let f = (b.transpose() * ci * &b)[(0, 0)] / q as f64;
            row.push(TestResult::f(
                &format!("All lags of {}", fit.variable_names[v]),
                "zero restrictions",
                f,
                q,
                fit.df_resid(),
            ));
        }
        out.push(row);
    }
    Ok(out)
}

/// Moduli of the companion-matrix eigenvalues; the VAR is stable when all are below 1.
pub fn stability_roots(fit: &VarFit) -> Vec<f64> {
    let mut m: Vec<f64> = fit
        .companion()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .collect();
    m.sort_by(|a, b| b.partial_cmp(a).unwrap());
    m
}

fn permuted_cholesky(sigma: &DMatrix<f64>, ordering: &[usize]) -> Result<DMatrix<f64>> {
    let n = sigma.nrows();
    if ordering.len() != n || {
        let mut o = ordering.to_vec();
        o.sort_unstable();
        o != (0..n).collect::<Vec<_>>()
    } {
        return domain("ordering must be a permutation of the variables");
    }
    let s = DMatrix::from_fn(n, n, |i, j| sigma[(ordering[i], ordering[j])]);
    let l = linalg::cholesky_lower(&s)?;
    // map back to the original variable positions; column k = shock to ordering[k]
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            p[(ordering[i], ordering[k])] = l[(i, k)];
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfTable {
    pub shock: String,
    pub response: String,
    /// Period 1 is the impact response.
    pub values: Vec<f64>,
}

/// Orthogonalized responses Ψ_{h−1}·P with P the Cholesky factor of Σ_ml under `ordering`.
pub fn impulse_response(fit: &VarFit, horizon: usize, ordering: &[usize]) -> Result<Vec<IrfTable>> {
    if horizon == 0 {
        return domain("horizon must be at least 1");
    }
    let p = permuted_cholesky(&fit.sigma_ml, ordering)?;
    let theta: Vec<DMatrix<f64>> = fit.psi(horizon).iter().map(|m| m * &p).collect();
    let n = fit.n();
    let mut out = Vec::with_capacity(n * n);
    for &s in ordering {
        for r in 0..n {
            out.push(IrfTable {
                shock: fit.variable_names[s].clone(),
                response: fit.variable_names[r].clone(),
                values: theta.iter().map(|m| m[(r, s)]).collect(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FevdRow {
    pub period: usize,
    pub std_error: f64,
    /// Percent of forecast variance per shock, in `ordering`.
    pub shares: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FevdTable {
    pub variable: String,
    pub shocks: Vec<String>,
    pub rows: Vec<FevdRow>,
}

pub fn fevd(fit: &VarFit, horizon: usize, ordering: &[usize]) -> Result<Vec<FevdTable>> {
    if horizon == 0 {
        return domain("horizon must be at least 1");
    }
    let p = permuted_cholesky(&fit.sigma_ml, ordering)?;
    let theta: Vec<DMatrix<f64>> = fit.psi(horizon).iter().map(|m| m * &p).collect();
    let n = fit.n();
    let shocks: Vec<String> = ordering.iter().map(|&s| fit.variable_names[s].clone()).collect();
    Ok((0..n)
        .map(|v| {
            let mut acc = vec![0.0; n];
            let rows = theta
                .iter()
                .enumerate()
                .map(|(h, m)| {
                    for (k, &s) in ordering.iter().enumerate() {
                        acc[k] += m[(v, s)].powi(2);
                    }
                    let total: f64 = acc.iter().sum();
                    FevdRow {
                        period: h + 1,
                        std_error: total.sqrt(),
                        shares: acc.iter().map(|a| 100.0 * a / total).collect(),
                    }
                })
                .collect();
            FevdTable {
                variable: fit.variable_names[v].clone(),
                shocks: shocks.clone(),
                rows,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarForecastRow {
    pub period: Period,
    pub point: f64,
    pub std_error: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarForecast {
    pub variable: String,
    pub t_critical: f64,
    pub rows: Vec<VarForecastRow>,
}

/// Iterated forecasts with Student-t(T−k) bands from the Σ_ml MSE recursion.
pub fn forecast_var(fit: &VarFit, horizon: usize, confidence: f64) -> Result<Vec<VarForecast>> {
    if horizon == 0 {
        return domain("horizon must be at least 1");
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return domain(format!("confidence {confidence} outside (0,1)"));
    }
    let n = fit.n();
    let mut hist = fit.tail.clone();
    let mut points = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut y = fit.c.clone();
        for (l, a) in fit.a.iter().enumerate() {
            y += a * &hist[hist.len() - 1 - l];
        }
        points.push(y.clone());
        hist.push(y);
    }
    let psi = fit.psi(horizon);
    let mut mse = DMatrix::zeros(n, n);
    let mut se = Vec::with_capacity(horizon);
    for m in &psi {
        mse += m * &fit.sigma_ml * m.transpose();
        se.push(mse.diagonal().map(|v| v.sqrt()));
    }
    let tc = stats::t_quantile(0.5 + confidence / 2.0, fit.df_resid() as f64);
    let first = fit.sample.to.succ();
    Ok((0..n)
        .map(|v| VarForecast {
            variable: fit.variable_names[v].clone(),
            t_critical: tc,
            rows: (0..horizon)
                .map(|h| VarForecastRow {
                    period: first.add(h as i64),
                    point: points[h][v],
                    std_error: se[h][v],
                    lower: points[h][v] - tc * se[h][v],
                    upper: points[h][v] + tc * se[h][v],
                })
                .collect(),
        })
        .collect())
}

/// Multivariate Ljung-Box on the residual autocovariances, df = n²(lags − p).
pub fn portmanteau(fit: &VarFit, lags: usize) -> Result<TestResult> {
    if lags <= fit.lag_order {
        return domain(format!(
            "portmanteau lags {lags} must exceed the VAR order {}",
            fit.lag_order
        ));
    }
    let e = &fit.residuals;
    let t = e.nrows();
    if lags >= t {
        return domain("portmanteau lags exceed the sample");
    }
    let tf = t as f64;
    let c0 = e.transpose() * e / tf;
    let Some(c0i) = c0.clone().try_inverse() else {
        return numerical("singular residual covariance");
    };
    let n = fit.n();
    let mut q = 0.0;
    for h in 1..=lags {
        let mut ch = DMatrix::zeros(n, n);
        for s in h..t {
            ch += e.row(s).transpose() * e.row(s - h);
        }
        ch /= tf;
        q += (ch.transpose() * &c0i * &ch * &c0i).trace() / (tf - h as f64);
    }
    Ok(TestResult::chi2(
        &format!("Portmanteau LB({lags})"),
        "no residual autocorrelation",
        tf * (tf + 2.0) * q,
        n * n * (lags - fit.lag_order),
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarmaSystem {
    pub equations: Vec<Regression>,
    pub sample: SampleRange,
    /// Σ = E'E/T
    pub vcv: DMatrix<f64>,
    pub correlations: DMatrix<f64>,
    pub log_determinant: f64,
    pub breusch_pagan: TestResult,
}

/// OLS of each differenced series on a constant, one lag of every series and
/// `ma_lags` lags of the saved univariate residuals.
pub fn fit_varma_two_step(data: &[TimeSeries], residual_sources: &[TimeSeries], ma_lags: usize) -> Result<VarmaSystem> {
    check_aligned(data)?;
    if residual_sources.len() != data.len() {
        return domain("one residual series per equation is required");
    }
    if !(1..=2).contains(&ma_lags) {
        return domain("ma_lags must be 1 or 2");
    }
    let start = data[0].start();
    let len = data[0].len();
    for r in residual_sources {
        if r.start() != start || r.len() != len {
            return domain(format!(
                "residual series {} is not aligned with the data ({} vs {})",
                r.name(),
                r.range(),
                data[0].range()
            ));
        }
    }
    let first = ma_lags.max(1);
    let t = len - first;
    let n = data.len();
    let mut names = vec!["const".to_string()];
    names.extend(data.iter().map(|d| format!("{}_1", d.name())));
    for l in 1..=ma_lags {
        names.extend(residual_sources.iter().map(|r| format!("{}_{l}", r.name())));
    }
    let x = DMatrix::from_fn(t, 1 + n + n * ma_lags, |i, j| {
        let row = first + i;
        if j == 0 {
            1.0
        } else if j <= n {
            data[j - 1].values()[row - 1]
        } else {
            let k = j - 1 - n;
            residual_sources[k % n].values()[row - 1 - k / n]
        }
    });
    let mut equations = Vec::with_capacity(n);
    let mut e = DMatrix::zeros(t, n);
    for (i, d) in data.iter().enumerate() {
        let fit = linalg::ols(&d.values()[first..], &x)?;
        for (s, v) in fit.resid.iter().enumerate() {
            e[(s, i)] = *v;
        }
        equations.push(Regression::from_ols(&fit, d.name(), &names));
    }
    let vcv = e.transpose() * &e / t as f64;
    let correlations = DMatrix::from_fn(n, n, |i, j| vcv[(i, j)] / (vcv[(i, i)] * vcv[(j, j)]).sqrt());
    Ok(VarmaSystem {
        equations,
        sample: SampleRange {
            from: data[0].period_at(first),
            to: data[0].end(),
        },
        log_determinant: vcv.determinant().ln(),
        correlations,
        breusch_pagan: diagnostics::breusch_pagan_diagonal(&e)?,
        vcv,
    })
}
