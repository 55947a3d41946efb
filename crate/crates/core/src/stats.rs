//! Reference distributions and the shared result shapes.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

/// Distribution of a test statistic under the null.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Distribution {
    ChiSquare(usize),
    F(usize, usize),
    StudentT(usize),
    Normal,
    /// Dickey-Fuller tau with the MacKinnon surface index.
    DickeyFuller(usize),
}

impl Distribution {
    pub fn df(&self) -> Vec<usize> {
        match *self {
            Distribution::ChiSquare(k) | Distribution::StudentT(k) => vec![k],
            Distribution::F(a, b) => vec![a, b],
            Distribution::Normal => vec![],
            Distribution::DickeyFuller(n) => vec![n],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    pub statistic: f64,
    pub distribution: Distribution,
    pub p_value: f64,
    pub null: String,
}

impl TestResult {
    pub fn chi2(name: &str, null: &str, statistic: f64, df: usize) -> Self {
        TestResult {
            name: name.into(),
            statistic,
            distribution: Distribution::ChiSquare(df),
            p_value: chi2_sf(statistic, df as f64),
            null: null.into(),
        }
    }

    pub fn f(name: &str, null: &str, statistic: f64, df1: usize, df2: usize) -> Self {
        TestResult {
            name: name.into(),
            statistic,
            distribution: Distribution::F(df1, df2),
            p_value: f_sf(statistic, df1 as f64, df2 as f64),
            null: null.into(),
        }
    }
}

/// One estimated coefficient with its inference columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub value: f64,
    pub std_error: f64,
    /// z or t ratio.
    pub stat: f64,
    pub p_value: f64,
}

impl Coefficient {
    pub fn normal(name: impl Into<String>, value: f64, std_error: f64) -> Self {
        let stat = value / std_error;
        Coefficient {
            name: name.into(),
            value,
            std_error,
            stat,
            p_value: normal_two_sided(stat),
        }
    }

    pub fn student(name: impl Into<String>, value: f64, std_error: f64, df: f64) -> Self {
        let stat = value / std_error;
        Coefficient {
            name: name.into(),
            value,
            std_error,
            stat,
            p_value: t_two_sided(stat, df),
        }
    }
}

/// Information criteria in the `-2 ll + penalty` form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    pub aic: f64,
    pub bic: f64,
    pub hqc: f64,
}

impl Criteria {
    pub fn new(loglik: f64, k: usize, t: usize) -> Self {
        let k = k as f64;
        let n = t as f64;
        Criteria {
            aic: -2.0 * loglik + 2.0 * k,
            bic: -2.0 * loglik + k * n.ln(),
            hqc: -2.0 * loglik + 2.0 * k * n.ln().ln(),
        }
    }
}

pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    ChiSquared::new(df).map(|d| d.sf(x)).unwrap_or(f64::NAN)
}

pub fn f_sf(x: f64, df1: f64, df2: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    FisherSnedecor::new(df1, df2)
        .map(|d| d.sf(x))
        .unwrap_or(f64::NAN)
}

pub fn t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    let d = StudentsT::new(0.0, 1.0, df).expect("positive df");
    2.0 * d.sf(t.abs())
}

pub fn t_quantile(p: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .expect("positive df")
        .inverse_cdf(p)
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

pub fn normal_two_sided(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    2.0 * Normal::standard().sf(z.abs())
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Variance with divisor `n - ddof`.
pub fn variance(x: &[f64], ddof: usize) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - ddof) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails() {
        assert!((chi2_sf(3.841458820694124, 1.0) - 0.05).abs() < 1e-9);
        assert_eq!(chi2_sf(0.0, 3.0), 1.0);
        assert!((t_quantile(0.975, 101.0) - 1.984).abs() < 1e-3);
        assert!((normal_two_sided(1.959963984540054) - 0.05).abs() < 1e-9);
    }

    #[test]
    fn criteria_identity() {
        let c = Criteria::new(-567.1968, 4, 105);
        assert!((c.aic - 1142.3936).abs() < 1e-9);
    }
}
