//! Augmented Dickey-Fuller tests and the Engle-Granger procedure.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, numerical, Result};
use crate::linalg::{self, Regression};
use crate::series::TimeSeries;
use crate::stats::{self, Distribution, TestResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Deterministic {
    None,
    Constant,
    ConstantTrend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LagSelection {
    Fixed,
    ModifiedAic,
}

// Asymptotic tau p-value approximations (MacKinnon 1994), index n−1.
const TAU_STAR_NC: [f64; 6] = [-1.04, -1.53, -2.68, -3.09, -3.07, -3.77];
const TAU_MIN_NC: [f64; 6] = [-19.04, -19.62, -21.21, -23.25, -21.63, -25.74];
const TAU_MAX_NC: [f64; 6] = [f64::INFINITY, 1.51, 0.86, 0.88, 1.05, 1.24];
const TAU_STAR_C: [f64; 6] = [-1.61, -2.62, -3.13, -3.47, -3.78, -3.93];
const TAU_MIN_C: [f64; 6] = [-18.83, -18.86, -23.48, -28.07, -25.96, -23.27];
const TAU_MAX_C: [f64; 6] = [2.74, 0.92, 0.55, 0.61, 0.79, 1.0];
const TAU_STAR_CT: [f64; 6] = [-2.89, -3.19, -3.50, -3.65, -3.80, -4.36];
const TAU_MIN_CT: [f64; 6] = [-16.18, -21.15, -25.37, -26.63, -26.53, -26.18];
const TAU_MAX_CT: [f64; 6] = [0.7, 0.63, 0.71, 0.93, 1.19, 1.42];

const SMALLP_NC: [[f64; 3]; 6] = [
    [0.6344, 1.2378, 3.2496],
    [1.9129, 1.3857, 3.5322],
    [2.7648, 1.4502, 3.4186],
    [3.4336, 1.4835, 3.19],
    [4.0999, 1.5533, 3.59],
    [4.5388, 1.5344, 2.9807],
];
const SMALLP_C: [[f64; 3]; 6] = [
    [2.1659, 1.4412, 3.8269],
    [2.92, 1.5012, 3.9796],
    [3.4699, 1.4856, 3.164],
    [3.9673, 1.4777, 2.6315],
    [4.5509, 1.5338, 2.9545],
    [5.1399, 1.6036, 3.4445],
];
const SMALLP_CT: [[f64; 3]; 6] = [
    [3.2512, 1.6047, 4.9588],
    [3.6646, 1.5419, 3.6448],
    [4.0983, 1.5173, 2.9898],
    [4.5844, 1.5338, 2.8796],
    [5.0722, 1.5634, 2.9472],
    [5.53, 1.5914, 3.0392],
];
const LARGEP_NC: [[f64; 4]; 6] = [
    [0.4797, 9.3557, -0.6999, 3.3066],
    [1.5578, 8.558, -2.083, -3.3549],
    [2.2268, 6.8093, -3.2362, -5.4448],
    [2.7654, 6.4502, -3.0811, -4.4946],
    [3.2684, 6.8051, -2.6778, -3.4972],
    [3.7268, 7.167, -2.3648, -2.8288],
];
const LARGEP_C: [[f64; 4]; 6] = [
    [1.7339, 9.3202, -1.2745, -1.0368],
    [2.1945, 6.4695, -2.9198, -4.2377],
    [2.5893, 4.5168, -3.6529, -5.0074],
    [3.0387, 4.5452, -3.3666, -4.1921],
    [3.5049, 5.2098, -2.9158, -3.3468],
    [3.9489, 5.8933, -2.5359, -2.721],
];
const LARGEP_CT: [[f64; 4]; 6] = [
    [2.5261, 6.1654, -3.7956, -6.0285],
    [2.85, 5.272, -3.6622, -5.1695],
    [3.221, 5.255, -3.2685, -4.1501],
    [3.652, 5.9758, -2.7483, -3.2081],
    [4.0712, 6.6428, -2.3464, -2.546],
    [4.4735, 7.1757, -2.0681, -2.1196],
];
const SMALL_SCALE: [f64; 3] = [1.0, 1.0, 1e-2];
const LARGE_SCALE: [f64; 4] = [1.0, 1e-1, 1e-1, 1e-2];

/// Asymptotic p-value of a Dickey-Fuller tau for `n_variables` integrated series.
pub fn mackinnon_pvalue(tau: f64, deterministic: Deterministic, n_variables: usize) -> Result<f64> {
    if !(1..=6).contains(&n_variables) {
        return domain(format!("MacKinnon surface supports 1..6 variables, got {n_variables}"));
    }
    if tau.is_nan() {
        return domain("tau is NaN");
    }
    let i = n_variables - 1;
    let (star, min, max, small, large) = match deterministic {
        Deterministic::None => (TAU_STAR_NC[i], TAU_MIN_NC[i], TAU_MAX_NC[i], SMALLP_NC[i], LARGEP_NC[i]),
        Deterministic::Constant => (TAU_STAR_C[i], TAU_MIN_C[i], TAU_MAX_C[i], SMALLP_C[i], LARGEP_C[i]),
        Deterministic::ConstantTrend => {
            (TAU_STAR_CT[i], TAU_MIN_CT[i], TAU_MAX_CT[i], SMALLP_CT[i], LARGEP_CT[i])
        }
    };
    let clamp = |p: f64| p.clamp(1e-6, 1.0 - 1e-6);
    if tau > max {
        return Ok(clamp(1.0));
    }
    if tau < min {
        return Ok(clamp(0.0));
    }
    let z = if tau <= star {
        (0..3).map(|k| small[k] * SMALL_SCALE[k] * tau.powi(k as i32)).sum::<f64>()
    } else {
        (0..4).map(|k| large[k] * LARGE_SCALE[k] * tau.powi(k as i32)).sum::<f64>()
    };
    Ok(clamp(stats::normal_cdf(z)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub variable: String,
    pub lags_used: usize,
    pub max_lag: usize,
    pub nobs: usize,
    pub deterministic: Deterministic,
    /// Surface used for the p-value (deterministic case, number of variables).
    pub surface: (Deterministic, usize),
    pub n_variables: usize,
    /// Estimated (a − 1).
    pub coefficient_minus_one: f64,
    pub tau_statistic: f64,
    pub p_value: f64,
    pub first_order_resid_autocorr: f64,
    pub lagged_diff_f: Option<TestResult>,
}

impl AdfResult {
    pub fn test(&self) -> TestResult {
        TestResult {
            name: "Augmented Dickey-Fuller".into(),
            statistic: self.tau_statistic,
            distribution: Distribution::DickeyFuller(self.n_variables),
            p_value: self.p_value,
            null: "unit root a = 1".into(),
        }
    }
}

/// ADF regression design on a fixed sample.
struct AdfSample {
    dy: Vec<f64>,
    ylag: Vec<f64>,
}

fn adf_regression(s: &AdfSample, k: usize, kmax: usize, det: Deterministic) -> Result<(linalg::Ols, usize)> {
    let n = s.dy.len();
    let t = n - kmax;
    let mut cols: Vec<Vec<f64>> = Vec::new();
    match det {
        Deterministic::None => {}
        Deterministic::Constant => cols.push(vec![1.0; t]),
        Deterministic::ConstantTrend => {
            cols.push(vec![1.0; t]);
            cols.push((0..t).map(|i| (kmax + i + 1) as f64).collect());
        }
    }
    let pos = cols.len();
    cols.push(s.ylag[kmax..].to_vec());
    for j in 1..=k {
        cols.push((kmax..n).map(|i| s.dy[i - j]).collect());
    }
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    let fit = linalg::ols(&s.dy[kmax..], &linalg::columns(&refs))?;
    Ok((fit, pos))
}

/// Ng-Perron modified AIC on the common sample.
fn maic(fit: &linalg::Ols, pos: usize, ylag: &[f64], k: usize, det: Deterministic) -> f64 {
    let t = fit.nobs as f64;
    let s2 = fit.ssr / t;
    let b0 = fit.coef[pos];
    let ss: f64 = if det == Deterministic::None {
        ylag.iter().map(|y| y * y).sum()
    } else {
        let m = stats::mean(ylag);
        ylag.iter().map(|y| (y - m).powi(2)).sum()
    };
    let tau = b0 * b0 * ss / s2;
    s2.ln() + 2.0 * (tau + k as f64) / t
}

/// ADF test with the MacKinnon surface matching `deterministic` and one variable.
pub fn adf_test(series: &TimeSeries, max_lag: usize, deterministic: Deterministic, selection: LagSelection) -> Result<AdfResult> {
    adf_with_surface(series, max_lag, deterministic, selection, (deterministic, 1))
}

pub fn adf_with_surface(
    series: &TimeSeries,
    max_lag: usize,
    deterministic: Deterministic,
    selection: LagSelection,
    surface: (Deterministic, usize),
) -> Result<AdfResult> {
    let y = series.values();
    let ndet = match deterministic {
        Deterministic::None => 0,
        Deterministic::Constant => 1,
        Deterministic::ConstantTrend => 2,
    };
    if y.len() < max_lag + ndet + max_lag + 4 {
        return domain(format!(
            "{} observations are too few for an ADF test with max lag {max_lag}",
            y.len()
        ));
    }
    let s = AdfSample {
        dy: y.windows(2).map(|w| w[1] - w[0]).collect(),
        ylag: y[..y.len() - 1].to_vec(),
    };
    let k = match selection {
        LagSelection::Fixed => max_lag,
        LagSelection::ModifiedAic => {
            let mut best = (f64::INFINITY, 0);
            for k in 0..=max_lag {
                let (fit, pos) = adf_regression(&s, k, max_lag, deterministic)?;
                let v = maic(&fit, pos, &s.ylag[max_lag..], k, deterministic);
                if v < best.0 {
                    best = (v, k);
                }
            }
            best.1
        }
    };
    let (fit, pos) = adf_regression(&s, k, max_lag, deterministic)?;
    let tau = fit.coef[pos] / fit.std_errors[pos];
    let lagged_diff_f = if k > 0 {
        let idx: Vec<usize> = (pos + 1..pos + 1 + k).collect();
        let f = fit.wald_f(&idx)?;
        Some(TestResult::f("lagged differences", "no lagged differences", f, k, fit.df_resid()))
    } else {
        None
    };
    Ok(AdfResult {
        variable: series.name().to_string(),
        lags_used: k,
        max_lag,
        nobs: fit.nobs,
        deterministic,
        surface,
        n_variables: surface.1,
        coefficient_minus_one: fit.coef[pos],
        tau_statistic: tau,
        p_value: mackinnon_pvalue(tau, surface.0, surface.1)?,
        first_order_resid_autocorr: fit.rho(),
        lagged_diff_f,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    Cointegrated,
    NotCointegrated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CointegrationReport {
    pub step1: AdfResult,
    pub step2: AdfResult,
    pub step3: Regression,
    pub step4: AdfResult,
    pub level: f64,
    pub conclusion: Conclusion,
}

/// Engle-Granger: ADF on each series, cointegrating OLS, ADF on its residuals.
pub fn engle_granger(y: &TimeSeries, x: &TimeSeries, max_lag: usize, level: f64) -> Result<CointegrationReport> {
    if y.start() != x.start() || y.len() != x.len() {
        return domain("Engle-Granger series must cover the same periods");
    }
    let step1 = adf_test(y, max_lag, Deterministic::Constant, LagSelection::ModifiedAic)?;
    let step2 = adf_test(x, max_lag, Deterministic::Constant, LagSelection::ModifiedAic)?;
    let n = y.len();
    let xm = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { x.values()[i] });
    let ols = linalg::ols(y.values(), &xm)?;
    let ym = y.values().iter().sum::<f64>() / n as f64;
    let tss: f64 = y.values().iter().map(|v| (v - ym).powi(2)).sum();
    if ols.ssr <= 1e-20 * tss.max(f64::MIN_POSITIVE) {
        return numerical("cointegrating regression fits exactly; residuals are degenerate");
    }
    let step3 = Regression::from_ols(&ols, y.name(), &["const".to_string(), x.name().to_string()]);
    let uhat = TimeSeries::new("uhat", y.start(), ols.resid.clone())?;
    let step4 = adf_with_surface(
        &uhat,
        max_lag,
        Deterministic::None,
        LagSelection::ModifiedAic,
        (Deterministic::Constant, 2),
    )?;
    let cointegrated = step1.p_value > level && step2.p_value > level && step4.p_value < level;
    Ok(CointegrationReport {
        step1,
        step2,
        step3,
        step4,
        level,
        conclusion: if cointegrated {
            Conclusion::Cointegrated
        } else {
            Conclusion::NotCointegrated
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pvalue_limits() {
        assert_eq!(mackinnon_pvalue(-50.0, Deterministic::Constant, 1).unwrap(), 1e-6);
        assert_eq!(mackinnon_pvalue(10.0, Deterministic::Constant, 1).unwrap(), 1.0 - 1e-6);
        assert!(mackinnon_pvalue(-2.0, Deterministic::Constant, 7).is_err());
    }

    #[test]
    fn pvalue_increases_with_tau() {
        for det in [Deterministic::None, Deterministic::Constant, Deterministic::ConstantTrend] {
            for n in 1..=6 {
                let mut prev = 0.0;
                let mut tau = -6.0;
                while tau <= 3.0 {
                    let p = mackinnon_pvalue(tau, det, n).unwrap();
                    assert!(p >= prev, "{det:?} n={n} tau={tau}");
                    prev = p;
                    tau += 0.01;
                }
            }
        }
    }
}
