//! ARIMA and ARMAX estimation by exact maximum likelihood.
//!
//! The model for w_t = Δ^d y_t is φ(L)(w_t − c − β'Δ^d x_t) = θ(L)ε_t, so `const`
//! is the mean of the differenced series and exogenous terms are regression
//! effects with ARMA errors. θ(L) = 1 + θ_1 L + … as printed.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kalman;
use crate::linalg::{self, PolyRoot};
use crate::optimize::{self, BfgsOptions};
use crate::series::{Period, SampleRange, TimeSeries};
use crate::stats::{self, Coefficient, Criteria};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub include_const: bool,
    /// Regressors, differenced `d` times like the dependent variable.
    pub exog: Vec<TimeSeries>,
}

impl ArimaSpec {
    pub fn new(p: usize, d: usize, q: usize) -> Self {
        ArimaSpec {
            p,
            d,
            q,
            include_const: true,
            exog: Vec::new(),
        }
    }

    pub fn without_const(mut self) -> Self {
        self.include_const = false;
        self
    }

    pub fn with_exog(mut self, x: TimeSeries) -> Self {
        self.exog.push(x);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.p + self.q == 0 && self.exog.is_empty() {
            return domain("ARIMA spec needs p + q ≥ 1 or exogenous regressors");
        }
        if self.d > 2 {
            return domain("differencing order above 2 is not supported");
        }
        Ok(())
    }

    fn n_params(&self) -> usize {
        self.include_const as usize + self.p + self.q + self.exog.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArimaFit {
    pub spec: ArimaSpec,
    pub dependent: String,
    pub sample: SampleRange,
    pub nobs: usize,
    pub coefficients: Vec<Coefficient>,
    pub loglik: f64,
    pub criteria: Criteria,
    pub mean_innovations: f64,
    pub sd_innovations: f64,
    /// One-step prediction errors on the differenced scale.
    pub residuals: TimeSeries,
    /// Fitted values on the differenced scale.
    pub fitted: TimeSeries,
    /// Levels over the sample (plus the d pre-sample values in front).
    pub levels: TimeSeries,
    pub ar_roots: Vec<PolyRoot>,
    pub ma_roots: Vec<PolyRoot>,
    pub converged: bool,
    pub iterations: usize,
    /// Regressors that are identically zero over the sample, reported at 0.
    #[serde(default)]
    pub unidentified: Vec<String>,
    next_state: Vec<f64>,
}

impl ArimaFit {
    fn layout(&self) -> (usize, usize, usize) {
        let c = self.spec.include_const as usize;
        (c, c + self.spec.p, c + self.spec.p + self.spec.q)
    }

    pub fn constant(&self) -> f64 {
        if self.spec.include_const {
            self.coefficients[0].value
        } else {
            0.0
        }
    }

    pub fn phi(&self) -> Vec<f64> {
        let (a, b, _) = self.layout();
        self.coefficients[a..b].iter().map(|c| c.value).collect()
    }

    pub fn theta(&self) -> Vec<f64> {
        let (_, b, c) = self.layout();
        self.coefficients[b..c].iter().map(|c| c.value).collect()
    }

    pub fn beta(&self) -> Vec<f64> {
        let (_, _, c) = self.layout();
        self.coefficients[c..].iter().map(|c| c.value).collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    /// Number of estimated parameters including the innovation variance.
    pub fn k(&self) -> usize {
        self.coefficients.len() - self.unidentified.len() + 1
    }
}

/// Parameter vector layout: [const?, φ, θ, β].
struct ArmaObjective<'a> {
    w: &'a [f64],
    x: &'a [Vec<f64>],
    p: usize,
    q: usize,
    has_const: bool,
}

impl ArmaObjective<'_> {
    fn split<'b>(&self, v: &'b [f64]) -> (f64, &'b [f64], &'b [f64], &'b [f64]) {
        let c0 = self.has_const as usize;
        let c = if self.has_const { v[0] } else { 0.0 };
        (
            c,
            &v[c0..c0 + self.p],
            &v[c0 + self.p..c0 + self.p + self.q],
            &v[c0 + self.p + self.q..],
        )
    }

    fn demeaned(&self, v: &[f64]) -> Vec<f64> {
        let (c, _, _, beta) = self.split(v);
        self.w
            .iter()
            .enumerate()
            .map(|(t, &w)| w - c - beta.iter().zip(self.x).map(|(b, x)| b * x[t]).sum::<f64>())
            .collect()
    }

    fn filter(&self, v: &[f64]) -> Option<kalman::ArmaFilter> {
        if v.iter().any(|x| !x.is_finite()) {
            return None;
        }
        let (_, phi, theta, _) = self.split(v);
        kalman::arma_filter(phi, theta, &self.demeaned(v))
    }
}

impl optimize::Objective for ArmaObjective<'_> {
    fn loglik(&self, v: &[f64]) -> f64 {
        match self.filter(v) {
            Some(f) => f.concentrated_loglik(),
            None => f64::NAN,
        }
    }
}

/// Yule-Walker AR coefficients via Durbin-Levinson.
fn yule_walker(u: &[f64], p: usize) -> Vec<f64> {
    if p == 0 {
        return Vec::new();
    }
    let r = crate::diagnostics::autocorrelations(u, p);
    let mut phi: Vec<f64> = Vec::new();
    for k in 0..p {
        let (num, den) = (0..k).fold((r[k], 1.0), |(nu, de), j| {
            (nu - phi[j] * r[k - 1 - j], de - phi[j] * r[j])
        });
        let a = num / den;
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - a * prev[k - 1 - j];
        }
        phi.push(a);
    }
    phi
}

/// Reflects MA roots inside the unit circle; the likelihood is unchanged.
fn make_invertible(theta: &[f64]) -> Option<Vec<f64>> {
    let roots = linalg::lag_poly_roots(theta);
    if roots.iter().all(|r| r.modulus > 1.0) {
        return None;
    }
    // rebuild prod (1 - z/r) with reflected roots
    let mut poly = vec![nalgebra::Complex::new(1.0, 0.0)];
    for r in roots {
        let mut z = nalgebra::Complex::new(r.real, r.imaginary);
        if z.norm() < 1.0 {
            z = nalgebra::Complex::new(1.0, 0.0) / z.conj();
        }
        let mut next = vec![nalgebra::Complex::new(0.0, 0.0); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c / z;
        }
        poly = next;
    }
    let mut out: Vec<f64> = poly[1..].iter().map(|c| c.re).collect();
    out.resize(theta.len(), 0.0);
    Some(out)
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn difference(v: &[f64], d: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

/// Δ^d of `series` over `range`, where `range` indexes the differenced observations.
fn differenced_sample(series: &TimeSeries, d: usize, range: SampleRange) -> Result<(Vec<f64>, TimeSeries)> {
    let first = range.from.add(-(d as i64));
    let levels = series.slice(SampleRange::new(first, range.to)?).map_err(|_| {
        Error::Domain(format!(
            "{} does not cover {range} plus {d} pre-sample observation(s)",
            series.name()
        ))
    })?;
    Ok((difference(levels.values(), d), levels))
}

/// Exact ML fit of an ARIMA(p,d,q) with optional regressors. `range` refers to the
/// differenced observations (so d pre-sample levels must be present).
pub fn fit_arima(series: &TimeSeries, spec: &ArimaSpec, range: SampleRange) -> Result<ArimaFit> {
    spec.validate()?;
    let (w, levels) = differenced_sample(series, spec.d, range)?;
    let n = w.len();
    if n <= spec.n_params() + 2 {
        return domain(format!("{n} observations are too few for the requested model"));
    }
    // A regressor that is identically zero over the sample carries no
    // information; it is reported at 0 and left out of the estimation.
    let mut x: Vec<Vec<f64>> = Vec::with_capacity(spec.exog.len());
    let mut active = Vec::with_capacity(spec.exog.len());
    for e in &spec.exog {
        let xi = differenced_sample(e, spec.d, range)?.0;
        let used = xi.iter().any(|v| *v != 0.0);
        active.push(used);
        if used {
            x.push(xi);
        }
    }
    let obj = ArmaObjective {
        w: &w,
        x: &x,
        p: spec.p,
        q: spec.q,
        has_const: spec.include_const,
    };

    // regression part first, then Yule-Walker on its residuals
    let mut cols: Vec<&[f64]> = Vec::new();
    let ones = vec![1.0; n];
    if spec.include_const {
        cols.push(&ones);
    }
    for xi in &x {
        cols.push(xi);
    }
    let (reg, u) = if cols.is_empty() {
        (Vec::new(), w.clone())
    } else {
        let fit = linalg::ols(&w, &linalg::columns(&cols))?;
        (fit.coef.iter().copied().collect::<Vec<_>>(), fit.resid)
    };
    let mut phi0 = yule_walker(&u, spec.p);
    if kalman::arma_filter(&phi0, &[], &u).is_none() {
        phi0.iter_mut().for_each(|v| *v = 0.0);
    }
    let c0 = spec.include_const as usize;
    let mut start = Vec::with_capacity(c0 + spec.p + spec.q + x.len());
    start.extend_from_slice(&reg[..c0]);
    start.extend_from_slice(&phi0);
    start.extend(std::iter::repeat_n(0.0, spec.q));
    start.extend_from_slice(&reg[c0..]);

    let opts = BfgsOptions::default();
    let mut res = optimize::maximize(&obj, &start, &opts)?;
    if spec.q > 0 {
        let (_, _, theta, _) = obj.split(&res.params);
        if let Some(inv) = make_invertible(theta) {
            let mut v = res.params.clone();
            v[c0 + spec.p..c0 + spec.p + spec.q].copy_from_slice(&inv);
            let iters = res.iterations;
            res = optimize::maximize(&obj, &v, &opts)?;
            res.iterations += iters;
        }
    }
    if !res.loglik.is_finite() {
        return Err(Error::Fit(format!(
            "likelihood not finite after {} iterations",
            res.iterations
        )));
    }
    let cov = optimize::covariance_hessian(&obj, &res.params).ok();
    let names = coefficient_names(spec);
    let n_arma = c0 + spec.p + spec.q;
    let mut coefficients = Vec::with_capacity(names.len());
    let mut unidentified = Vec::new();
    let mut i = 0;
    for (j, name) in names.into_iter().enumerate() {
        if j >= n_arma && !active[j - n_arma] {
            unidentified.push(name.clone());
            coefficients.push(Coefficient::normal(name, 0.0, f64::NAN));
            continue;
        }
        let se = cov.as_ref().map_or(f64::NAN, |c| c[(i, i)].sqrt());
        coefficients.push(Coefficient::normal(name, res.params[i], se));
        i += 1;
    }
    let filt = obj
        .filter(&res.params)
        .ok_or_else(|| Error::Fit("filter failed at the optimum".into()))?;
    let sigma = filt.sigma2().sqrt();
    let loglik = filt.concentrated_loglik();
    let resid = filt.errors.clone();
    let fitted: Vec<f64> = w.iter().zip(&resid).map(|(a, e)| a - e).collect();
    let (_, phi, theta, _) = obj.split(&res.params);
    let k = res.params.len() + 1;
    Ok(ArimaFit {
        spec: spec.clone(),
        dependent: series.name().to_string(),
        sample: range,
        nobs: n,
        loglik,
        criteria: Criteria::new(loglik, k, n),
        mean_innovations: stats::mean(&resid),
        sd_innovations: sigma,
        residuals: TimeSeries::new("uhat", range.from, resid)?,
        fitted: TimeSeries::new("yhat", range.from, fitted)?,
        levels,
        ar_roots: linalg::lag_poly_roots(&phi.iter().map(|v| -v).collect::<Vec<_>>()),
        ma_roots: linalg::lag_poly_roots(theta),
        converged: res.converged,
        iterations: res.iterations,
        next_state: filt.next_state,
        unidentified,
        coefficients,
    })
}

/// ARIMA with exogenous regressors entering the mean equation contemporaneously.
pub fn fit_armax(series: &TimeSeries, spec: &ArimaSpec, range: SampleRange) -> Result<ArimaFit> {
    if spec.exog.is_empty() {
        return domain("ARMAX needs at least one exogenous regressor");
    }
    fit_arima(series, spec, range)
}

fn coefficient_names(spec: &ArimaSpec) -> Vec<String> {
    let mut names = Vec::new();
    if spec.include_const {
        names.push("const".to_string());
    }
    names.extend((1..=spec.p).map(|i| format!("phi_{i}")));
    names.extend((1..=spec.q).map(|i| format!("theta_{i}")));
    names.extend(spec.exog.iter().map(|e| match spec.d {
        0 => e.name().to_string(),
        1 => format!("d_{}", e.name()),
        d => format!("d{d}_{}", e.name()),
    }));
    names
}

/// AR and MA roots in the lag-polynomial convention.
pub fn lag_polynomial_roots(fit: &ArimaFit) -> (Vec<PolyRoot>, Vec<PolyRoot>) {
    (fit.ar_roots.clone(), fit.ma_roots.clone())
}

/// ψ weights of the ARMA part, integrated d times.
pub fn psi_weights(phi: &[f64], theta: &[f64], d: usize, n: usize) -> Vec<f64> {
    let mut psi = vec![0.0; n];
    if n == 0 {
        return psi;
    }
    psi[0] = 1.0;
    for j in 1..n {
        let mut v = theta.get(j - 1).copied().unwrap_or(0.0);
        for (i, &f) in phi.iter().enumerate() {
            if j > i {
                v += f * psi[j - 1 - i];
            }
        }
        psi[j] = v;
    }
    for _ in 0..d {
        let mut acc = 0.0;
        for v in psi.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    psi
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub period: Period,
    pub point: f64,
    pub std_error: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Dynamic forecasts on the level scale with normal bands.
/// `future_exog` holds the regressor levels over the forecast horizon.
pub fn forecast_arima(
    fit: &ArimaFit,
    horizon: usize,
    confidence: f64,
    future_exog: &[TimeSeries],
) -> Result<Vec<ForecastRow>> {
    if horizon == 0 {
        return domain("forecast horizon must be at least 1");
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return domain(format!("confidence {confidence} outside (0,1)"));
    }
    let d = fit.spec.d;
    let first = fit.sample.to.succ();
    let last = first.add(horizon as i64 - 1);
    let beta = fit.beta();
    if beta.len() != future_exog.len() {
        return domain(format!(
            "model has {} regressors, {} future paths supplied",
            beta.len(),
            future_exog.len()
        ));
    }
    let mut xf: Vec<Vec<f64>> = Vec::new();
    for (spec_x, fut) in fit.spec.exog.iter().zip(future_exog) {
        // stitch the in-sample tail so differencing has its lags
        let tail_start = first.add(-(d as i64));
        let mut vals = Vec::new();
        let mut p = tail_start;
        while p <= last {
            let v = fut
                .get(p)
                .or_else(|| spec_x.get(p))
                .ok_or_else(|| Error::Domain(format!("regressor {} missing at {p}", spec_x.name())))?;
            vals.push(v);
            p = p.succ();
        }
        xf.push(difference(&vals, d));
    }
    let phi = fit.phi();
    let theta = fit.theta();
    let r = phi.len().max(theta.len() + 1);
    let mut h = vec![0.0; r];
    h[0] = 1.0;
    h[1..=theta.len()].copy_from_slice(&theta);
    let mut a = fit.next_state.clone();
    let c = fit.constant();
    let mut w_hat = Vec::with_capacity(horizon);
    for step in 0..horizon {
        let mean = c + beta.iter().zip(&xf).map(|(b, x)| b * x[step]).sum::<f64>();
        w_hat.push(mean + h.iter().zip(&a).map(|(x, z)| x * z).sum::<f64>());
        let a0: f64 = phi.iter().zip(&a).map(|(x, z)| x * z).sum();
        for i in (1..r).rev() {
            a[i] = a[i - 1];
        }
        a[0] = a0;
    }
    // integrate back to levels
    let lv = fit.levels.values();
    let mut hist: Vec<f64> = lv[lv.len() - d..].to_vec();
    let mut points = Vec::with_capacity(horizon);
    for w in w_hat {
        let mut y = w;
        for j in 1..=d {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            y += sign * binom(d, j) * hist[hist.len() - j];
        }
        hist.push(y);
        points.push(y);
    }
    let psi = psi_weights(&phi, &theta, d, horizon);
    let z = stats::normal_quantile(0.5 + confidence / 2.0);
    let mut cum = 0.0;
    Ok(points
        .into_iter()
        .enumerate()
        .map(|(i, point)| {
            cum += psi[i] * psi[i];
            let se = fit.sd_innovations * cum.sqrt();
            ForecastRow {
                period: first.add(i as i64),
                point,
                std_error: se,
                lower: point - z * se,
                upper: point + z * se,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub period: Period,
    pub actual: f64,
    pub fitted: f64,
    pub residual: f64,
    pub flagged: bool,
}

/// Level-scale actual/fitted/residual table; flags |residual| > threshold·σ.
pub fn residual_report(fit: &ArimaFit, threshold_sd: f64) -> Vec<ResidualRow> {
    let d = fit.spec.d;
    let lv = &fit.levels.values()[d..];
    fit.residuals
        .iter()
        .zip(lv)
        .map(|((period, e), &actual)| ResidualRow {
            period,
            actual,
            fitted: actual - e,
            residual: e,
            flagged: e.abs() > threshold_sd * fit.sd_innovations,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_closed_form() {
        let phi = 0.327894;
        let psi = psi_weights(&[phi], &[], 1, 3);
        assert!((psi[1] - (1.0 + phi)).abs() < 1e-15);
        assert!((psi[2] - (1.0 + phi + phi * phi)).abs() < 1e-15);
    }

    #[test]
    fn reflection_keeps_autocovariances() {
        let inv = make_invertible(&[-1.5]).unwrap();
        assert!((inv[0] + 1.0 / 1.5).abs() < 1e-12);
        assert!(make_invertible(&[-0.5]).is_none());
        // complex pair inside the unit circle
        let t = [0.5, 2.0];
        let inv = make_invertible(&t).unwrap();
        let roots = linalg::lag_poly_roots(&inv);
        assert!(roots.iter().all(|r| r.modulus > 1.0));
    }
}
