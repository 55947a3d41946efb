//! Correlograms and residual diagnostic tests.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, numerical, Result};
use crate::linalg;
use crate::stats::{self, Coefficient, TestResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelogramRow {
    pub lag: usize,
    pub acf: f64,
    pub pacf: f64,
    pub q_stat: f64,
    pub p_value: f64,
    /// Outside the ±1.96/√T band.
    pub acf_significant: bool,
    pub pacf_significant: bool,
}

/// Autocorrelations r_1..r_max about the sample mean with the 1/T divisor.
pub fn autocorrelations(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let m = stats::mean(x);
    let d: Vec<f64> = x.iter().map(|v| v - m).collect();
    let c0: f64 = d.iter().map(|v| v * v).sum();
    (1..=max_lag)
        .map(|k| {
            if c0 == 0.0 {
                return 0.0;
            }
            let ck: f64 = (k..n).map(|t| d[t] * d[t - k]).sum();
            ck / c0
        })
        .collect()
}

/// Durbin-Levinson recursion from r_1..r_m to partial autocorrelations.
pub fn durbin_levinson(r: &[f64]) -> Vec<f64> {
    let m = r.len();
    let mut out = Vec::with_capacity(m);
    let mut phi: Vec<f64> = Vec::with_capacity(m);
    for k in 0..m {
        let (num, den) = (0..k).fold((r[k], 1.0), |(nu, de), j| {
            (nu - phi[j] * r[k - 1 - j], de - phi[j] * r[j])
        });
        let a = if den.abs() > 0.0 { num / den } else { 0.0 };
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - a * prev[k - 1 - j];
        }
        phi.push(a);
        out.push(a);
    }
    out
}

fn check_lags(n: usize, max_lag: usize) -> Result<()> {
    if n < 4 {
        return domain(format!("correlogram needs at least 4 observations, got {n}"));
    }
    if max_lag == 0 || max_lag >= n {
        return domain(format!("max lag {max_lag} must lie in 1..{n}"));
    }
    Ok(())
}

pub fn pacf(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    check_lags(x.len(), max_lag)?;
    Ok(durbin_levinson(&autocorrelations(x, max_lag)))
}

/// Correlogram table: ACF, PACF and cumulative Ljung-Box Q with χ²(k) p-values.
pub fn acf(x: &[f64], max_lag: usize) -> Result<Vec<CorrelogramRow>> {
    check_lags(x.len(), max_lag)?;
    let n = x.len() as f64;
    let r = autocorrelations(x, max_lag);
    let p = durbin_levinson(&r);
    let band = 1.96 / n.sqrt();
    let mut q = 0.0;
    Ok(r.iter()
        .zip(&p)
        .enumerate()
        .map(|(i, (&a, &pa))| {
            let lag = i + 1;
            q += a * a / (n - lag as f64);
            let q_stat = n * (n + 2.0) * q;
            CorrelogramRow {
                lag,
                acf: a,
                pacf: pa,
                q_stat,
                p_value: stats::chi2_sf(q_stat, lag as f64),
                acf_significant: a.abs() > band,
                pacf_significant: pa.abs() > band,
            }
        })
        .collect())
}

fn ljung_box_q(x: &[f64], lag: usize) -> f64 {
    let n = x.len() as f64;
    let r = autocorrelations(x, lag);
    n * (n + 2.0)
        * r.iter()
            .enumerate()
            .map(|(j, a)| a * a / (n - (j + 1) as f64))
            .sum::<f64>()
}

/// Ljung-Box Q' with df = lag − fitted_params.
pub fn ljung_box(resid: &[f64], lag: usize, fitted_params: usize) -> Result<TestResult> {
    if lag <= fitted_params {
        return domain(format!(
            "Ljung-Box lag {lag} must exceed the {fitted_params} fitted parameters"
        ));
    }
    if resid.len() <= lag {
        return domain(format!("Ljung-Box lag {lag} needs more than {} observations", resid.len()));
    }
    let q = ljung_box_q(resid, lag);
    Ok(TestResult::chi2(
        "Ljung-Box Q'",
        "no autocorrelation",
        q,
        lag - fitted_params,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchLm {
    pub test: TestResult,
    /// alpha(0..q) of the auxiliary regression.
    pub coefficients: Vec<Coefficient>,
}

/// LM test for ARCH of order q: (T−q)·R² from e² on a constant and q of its lags.
pub fn arch_lm(resid: &[f64], q: usize) -> Result<ArchLm> {
    let n = resid.len();
    if q == 0 || n <= 2 * q {
        return domain(format!("ARCH order {q} invalid for {n} observations"));
    }
    let e2: Vec<f64> = resid.iter().map(|e| e * e).collect();
    let t = n - q;
    let y = &e2[q..];
    let x = DMatrix::from_fn(t, q + 1, |i, j| if j == 0 { 1.0 } else { e2[q + i - j] });
    let fit = linalg::ols(y, &x)?;
    let names: Vec<String> = (0..=q).map(|j| format!("alpha({j})")).collect();
    let lm = t as f64 * fit.r2;
    Ok(ArchLm {
        test: TestResult::chi2("ARCH-LM", "no ARCH effect is present", lm, q),
        coefficients: fit.coefficients(&names),
    })
}

/// Transformed skewness and kurtosis (z1, z2) for one standardized column.
fn dh_z(rtb1: f64, b2: f64, n: f64) -> (f64, f64) {
    let beta = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    let w2 = -1.0 + (2.0 * (beta - 1.0)).sqrt();
    let delta = 1.0 / w2.sqrt().ln().sqrt();
    let y = rtb1 * (((w2 - 1.0) / 2.0) * (n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0))).sqrt();
    let z1 = delta * (y + (y * y + 1.0).sqrt()).ln();

    let dd = (n - 3.0) * (n + 1.0) * (n * n + 15.0 * n - 4.0);
    let a = (n - 2.0) * (n + 5.0) * (n + 7.0) * (n * n + 27.0 * n - 70.0) / (6.0 * dd);
    let c = (n - 7.0) * (n + 5.0) * (n + 7.0) * (n * n + 2.0 * n - 5.0) / (6.0 * dd);
    let k = (n + 5.0) * (n + 7.0) * (n.powi(3) + 37.0 * n * n + 11.0 * n - 313.0) / (12.0 * dd);
    let alpha = a + c * rtb1 * rtb1;
    let chi = (b2 - 1.0 - rtb1 * rtb1) * 2.0 * k;
    let z2 = ((chi / (2.0 * alpha)).cbrt() - 1.0 + 1.0 / (9.0 * alpha)) * (9.0 * alpha).sqrt();
    (z1, z2)
}

/// Doornik-Hansen omnibus normality test, univariate or multivariate.
pub fn doornik_hansen(cols: &[&[f64]]) -> Result<TestResult> {
    let p = cols.len();
    if p == 0 {
        return domain("Doornik-Hansen needs at least one series");
    }
    let n = cols[0].len();
    if cols.iter().any(|c| c.len() != n) {
        return domain("Doornik-Hansen series must have equal lengths");
    }
    if n < 8 {
        return domain(format!("Doornik-Hansen needs at least 8 observations, got {n}"));
    }
    let nf = n as f64;
    let means: Vec<f64> = cols.iter().map(|c| stats::mean(c)).collect();
    let xc = DMatrix::from_fn(n, p, |i, j| cols[j][i] - means[j]);
    let s = xc.transpose() * &xc / nf;
    let mut v = DMatrix::zeros(p, p);
    for j in 0..p {
        if !(s[(j, j)] > 0.0) {
            return numerical(format!("series {j} has zero variance"));
        }
        v[(j, j)] = 1.0 / s[(j, j)].sqrt();
    }
    let c = &v * &s * &v;
    let eig = c.symmetric_eigen();
    let lmin = eig.eigenvalues.min();
    if !(lmin > 1e-12) {
        return numerical(format!("correlation matrix is singular (eigenvalue {lmin:e})"));
    }
    let h = &eig.eigenvectors;
    let lam = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let r = &xc * &v * h * lam * h.transpose();
    let mut stat = 0.0;
    for j in 0..p {
        let col = r.column(j);
        let m = col.mean();
        let (m2, m3, m4) = col.iter().fold((0.0, 0.0, 0.0), |(a, b, c), &x| {
            let d = x - m;
            (a + d * d, b + d * d * d, c + d * d * d * d)
        });
        let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
        let rtb1 = m3 / m2.powf(1.5);
        let b2 = m4 / (m2 * m2);
        let (z1, z2) = dh_z(rtb1, b2, nf);
        stat += z1 * z1 + z2 * z2;
    }
    Ok(TestResult::chi2(
        "Doornik-Hansen",
        "normal distribution",
        stat,
        2 * p,
    ))
}

/// Breusch-Pagan LM test that the cross-equation residual covariance is diagonal.
pub fn breusch_pagan_diagonal(e: &DMatrix<f64>) -> Result<TestResult> {
    let (t, n) = e.shape();
    if n < 2 || t <= n {
        return domain(format!("Breusch-Pagan needs n ≥ 2 and T > n, got T={t}, n={n}"));
    }
    let s = e.transpose() * e;
    let mut lm = 0.0;
    for i in 0..n {
        if !(s[(i, i)] > 0.0) {
            return numerical(format!("residual column {i} has zero variance"));
        }
        for j in 0..i {
            lm += s[(i, j)].powi(2) / (s[(i, i)] * s[(j, j)]);
        }
    }
    Ok(TestResult::chi2(
        "Breusch-Pagan",
        "diagonal covariance matrix",
        t as f64 * lm,
        n * (n - 1) / 2,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBin {
    /// None for the open lower tail.
    pub lower: Option<f64>,
    /// None for the open upper tail.
    pub upper: Option<f64>,
    pub midpoint: f64,
    pub count: usize,
    pub relative: f64,
    pub cumulative: f64,
}

/// Equal-width histogram whose outer midpoints sit at the sample extremes.
pub fn frequency_distribution(x: &[f64], bins: usize) -> Result<Vec<FrequencyBin>> {
    if bins < 2 {
        return domain("at least 2 bins are required");
    }
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return domain("frequency distribution of a constant series");
    }
    let w = (hi - lo) / (bins - 1) as f64;
    let base = lo - 0.5 * w;
    let mut counts = vec![0usize; bins];
    for &v in x {
        let k = ((v - base) / w).floor();
        let k = if k < 0.0 { 0 } else { (k as usize).min(bins - 1) };
        counts[k] += 1;
    }
    let n = x.len() as f64;
    let mut cum = 0.0;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let rel = 100.0 * c as f64 / n;
            cum += rel;
            FrequencyBin {
                lower: (i > 0).then(|| base + i as f64 * w),
                upper: (i + 1 < bins).then(|| base + (i + 1) as f64 * w),
                midpoint: lo + i as f64 * w,
                count: c,
                relative: rel,
                cumulative: cum,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_series() {
        let x: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = autocorrelations(&x, 1);
        assert!((r[0] + 1.0).abs() < 2.0 / 200.0);
    }

    #[test]
    fn pacf_lag_one_is_acf() {
        let x: Vec<f64> = (0..50).map(|i| ((i * 7) % 11) as f64).collect();
        let rows = acf(&x, 5).unwrap();
        assert_eq!(rows[0].acf, rows[0].pacf);
        assert!(acf(&x, 50).is_err());
        assert!(acf(&x, 0).is_err());
    }

    #[test]
    fn zero_residuals() {
        let lb = ljung_box(&[0.0; 20], 4, 2).unwrap();
        assert_eq!(lb.statistic, 0.0);
        assert_eq!(lb.p_value, 1.0);
        assert!(ljung_box(&[0.0; 20], 2, 2).is_err());
    }

    #[test]
    fn orthogonal_columns() {
        let e = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0]);
        let bp = breusch_pagan_diagonal(&e).unwrap();
        assert_eq!(bp.statistic, 0.0);
        assert_eq!(bp.p_value, 1.0);
    }

    #[test]
    fn histogram_two_bins() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let h = frequency_distribution(&x, 2).unwrap();
        assert_eq!((h[0].count, h[1].count), (5, 5));
        assert!((h[1].cumulative - 100.0).abs() < 1e-12);
        assert!(frequency_distribution(&[1.0; 5], 3).is_err());
    }
}
