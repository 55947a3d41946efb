//! Dense helpers: least squares, Lyapunov solve, polynomial roots.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{numerical, Result};
use crate::stats::{self, Coefficient};

/// Ordinary least squares output.
#[derive(Debug, Clone)]
pub struct Ols {
    pub coef: DVector<f64>,
    pub std_errors: DVector<f64>,
    pub resid: Vec<f64>,
    pub fitted: Vec<f64>,
    /// (X'X)^{-1}
    pub xtx_inv: DMatrix<f64>,
    pub ssr: f64,
    pub nobs: usize,
    pub k: usize,
    pub r2: f64,
    pub adj_r2: f64,
    pub ymean: f64,
    pub ysd: f64,
    pub centered: bool,
}

impl Ols {
    pub fn df_resid(&self) -> usize {
        self.nobs - self.k
    }

    /// s² = SSR / (T - k)
    pub fn s2(&self) -> f64 {
        self.ssr / self.df_resid() as f64
    }

    pub fn t_stats(&self) -> Vec<f64> {
        self.coef
            .iter()
            .zip(self.std_errors.iter())
            .map(|(b, s)| b / s)
            .collect()
    }

    pub fn coefficients(&self, names: &[String]) -> Vec<Coefficient> {
        let df = self.df_resid() as f64;
        names
            .iter()
            .zip(self.coef.iter().zip(self.std_errors.iter()))
            .map(|(n, (&b, &s))| Coefficient::student(n.clone(), b, s, df))
            .collect()
    }

    pub fn durbin_watson(&self) -> f64 {
        let num: f64 = self.resid.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
        num / self.ssr
    }

    /// First-order autocorrelation of residuals.
    pub fn rho(&self) -> f64 {
        let num: f64 = self.resid.windows(2).map(|w| w[1] * w[0]).sum();
        let den: f64 = self.resid[..self.resid.len() - 1].iter().map(|e| e * e).sum();
        num / den
    }

    pub fn loglik(&self) -> f64 {
        let n = self.nobs as f64;
        -0.5 * n * (1.0 + (2.0 * std::f64::consts::PI).ln() + (self.ssr / n).ln())
    }

    /// F statistic for `R b = 0` where R selects the coefficients in `idx`.
    pub fn wald_f(&self, idx: &[usize]) -> Result<f64> {
        let q = idx.len();
        let b = DVector::from_iterator(q, idx.iter().map(|&i| self.coef[i]));
        let v = DMatrix::from_fn(q, q, |a, c| self.xtx_inv[(idx[a], idx[c])] * self.s2());
        let Some(vi) = v.try_inverse() else {
            return numerical("singular restriction covariance");
        };
        Ok((b.transpose() * vi * &b)[(0, 0)] / q as f64)
    }

    pub fn f_overall(&self) -> Option<f64> {
        if !self.centered || self.k < 2 {
            return None;
        }
        let q = (self.k - 1) as f64;
        Some((self.r2 / q) / ((1.0 - self.r2) / self.df_resid() as f64))
    }
}

/// OLS via Householder QR. Fails when X is rank deficient.
pub fn ols(y: &[f64], x: &DMatrix<f64>) -> Result<Ols> {
    let n = y.len();
    let k = x.ncols();
    if x.nrows() != n {
        return numerical(format!("regressor rows {} != observations {n}", x.nrows()));
    }
    if n <= k {
        return numerical(format!("{n} observations for {k} regressors"));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    for i in 0..k {
        if !(r[(i, i)].abs() > 1e-10 * scale.max(1e-300)) {
            return numerical("regressor matrix is rank deficient");
        }
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| crate::Error::Numerical("triangular solve failed".into()))?;
    let rinv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| crate::Error::Numerical("triangular inverse failed".into()))?;
    let xtx_inv = &rinv * rinv.transpose();
    let fitted_v = x * &coef;
    let fitted: Vec<f64> = fitted_v.iter().copied().collect();
    let resid: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let ssr: f64 = resid.iter().map(|e| e * e).sum();
    let ymean = stats::mean(y);
    let centered = (0..k).any(|j| {
        let c = x.column(j);
        let c0 = c[0];
        c0 != 0.0 && c.iter().all(|&v| v == c0)
    });
    let tss: f64 = if centered {
        y.iter().map(|v| (v - ymean).powi(2)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    };
    let r2 = 1.0 - ssr / tss;
    let df = (n - k) as f64;
    let adj_r2 = if centered {
        1.0 - (1.0 - r2) * (n as f64 - 1.0) / df
    } else {
        1.0 - (1.0 - r2) * n as f64 / df
    };
    let s2 = ssr / df;
    let std_errors = DVector::from_iterator(k, (0..k).map(|i| (s2 * xtx_inv[(i, i)]).sqrt()));
    let ysd = stats::variance(y, 1).sqrt();
    Ok(Ols {
        coef,
        std_errors,
        resid,
        fitted,
        xtx_inv,
        ssr,
        nobs: n,
        k,
        r2,
        adj_r2,
        ymean,
        ysd,
        centered,
    })
}

/// Printed summary of one OLS equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub dependent: String,
    pub coefficients: Vec<Coefficient>,
    pub nobs: usize,
    pub ssr: f64,
    pub se_regression: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_stat: Option<f64>,
    pub f_p_value: Option<f64>,
    pub durbin_watson: f64,
    pub rho: f64,
    pub ymean: f64,
    pub ysd: f64,
    pub loglik: f64,
}

impl Regression {
    pub fn from_ols(fit: &Ols, dependent: &str, names: &[String]) -> Self {
        let f = fit.f_overall();
        Regression {
            dependent: dependent.to_string(),
            coefficients: fit.coefficients(names),
            nobs: fit.nobs,
            ssr: fit.ssr,
            se_regression: fit.s2().sqrt(),
            r2: fit.r2,
            adj_r2: fit.adj_r2,
            f_stat: f,
            f_p_value: f.map(|v| stats::f_sf(v, (fit.k - 1) as f64, fit.df_resid() as f64)),
            durbin_watson: fit.durbin_watson(),
            rho: fit.rho(),
            ymean: fit.ymean,
            ysd: fit.ysd,
            loglik: fit.loglik(),
        }
    }

    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Builds a T×k matrix from columns.
pub fn columns(cols: &[&[f64]]) -> DMatrix<f64> {
    let n = cols.first().map_or(0, |c| c.len());
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Solves P = F P F' + Q by vectorization.
pub fn lyapunov(f: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let r = f.nrows();
    let kron = f.kronecker(f);
    let a = DMatrix::identity(r * r, r * r) - kron;
    let vq = DVector::from_column_slice(q.as_slice());
    let Some(sol) = a.lu().solve(&vq) else {
        return numerical("Lyapunov system is singular");
    };
    let p = DMatrix::from_column_slice(r, r, sol.as_slice());
    Ok((&p + p.transpose()) * 0.5)
}

pub fn spectral_radius(f: &DMatrix<f64>) -> f64 {
    f.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// A root of a lag polynomial with its modulus and frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyRoot {
    pub real: f64,
    pub imaginary: f64,
    pub modulus: f64,
    pub frequency: f64,
}

impl PolyRoot {
    pub fn from_complex(z: Complex<f64>) -> Self {
        PolyRoot {
            real: z.re,
            imaginary: z.im,
            modulus: z.norm(),
            frequency: z.im.atan2(z.re) / (2.0 * std::f64::consts::PI),
        }
    }
}

/// Roots of `1 + c[0] z + ... + c[m-1] z^m`, sorted by frequency.
pub fn lag_poly_roots(c: &[f64]) -> Vec<PolyRoot> {
    let mut m = c.len();
    while m > 0 && c[m - 1] == 0.0 {
        m -= 1;
    }
    if m == 0 {
        return Vec::new();
    }
    // inverse roots are the eigenvalues of the companion matrix of -c
    let comp = DMatrix::from_fn(m, m, |i, j| {
        if i == 0 {
            -c[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<PolyRoot> = comp
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.norm() > 0.0)
        .map(|&z| {
            let mut r = PolyRoot::from_complex(Complex::new(1.0, 0.0) / z);
            if r.imaginary.abs() < 1e-12 * r.modulus {
                r.imaginary = 0.0;
                r.frequency = if r.real < 0.0 { 0.5 } else { 0.0 };
            }
            r
        })
        .collect();
    roots.sort_by(|a, b| {
        a.frequency
            .partial_cmp(&b.frequency)
            .unwrap()
            .then(a.modulus.partial_cmp(&b.modulus).unwrap())
    });
    roots
}

/// Lower Cholesky factor.
pub fn cholesky_lower(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    match m.clone().cholesky() {
        Some(c) => Ok(c.l()),
        None => numerical("matrix is not positive definite"),
    }
}
