//! Seeded data generators for Monte-Carlo checks and benchmarks.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};
use crate::linalg::cholesky_lower;

pub use crate::volatility::{draw_innovation, simulate_garch};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normal(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

/// y_t = y_{t-1} + ε_t, y_0 = 0.
pub fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    let mut acc = 0.0;
    standard_normal(n, seed)
        .into_iter()
        .map(|e| {
            acc += e;
            acc
        })
        .collect()
}

/// ARMA(p,q) around mean `mu`: (y − μ) = Σφ(y − μ) + ε + Σθε, Gaussian ε.
pub fn simulate_arma(mu: f64, phi: &[f64], theta: &[f64], sigma: f64, n: usize, burn: usize, seed: u64) -> Vec<f64> {
    let eps: Vec<f64> = standard_normal(n + burn, seed).into_iter().map(|e| sigma * e).collect();
    let mut w = vec![0.0; n + burn];
    for t in 0..n + burn {
        let mut v = eps[t];
        for (i, p) in phi.iter().enumerate() {
            if t > i {
                v += p * w[t - 1 - i];
            }
        }
        for (j, q) in theta.iter().enumerate() {
            if t > j {
                v += q * eps[t - 1 - j];
            }
        }
        w[t] = v;
    }
    w[burn..].iter().map(|v| mu + v).collect()
}

/// VAR(p) with intercept `c`, lag matrices `a` and Gaussian innovations with
/// covariance `sigma`. Returns an n × k matrix.
pub fn simulate_var(c: &DVector<f64>, a: &[DMatrix<f64>], sigma: &DMatrix<f64>, n: usize, burn: usize, seed: u64) -> Result<DMatrix<f64>> {
    let k = c.len();
    if a.iter().any(|m| m.nrows() != k || m.ncols() != k) || sigma.nrows() != k {
        return domain("VAR simulation: dimension mismatch");
    }
    let l = cholesky_lower(sigma)?;
    let mut r = rng(seed);
    let p = a.len();
    let total = n + burn + p;
    let mut y = DMatrix::zeros(total, k);
    for t in p..total {
        let z = DVector::from_fn(k, |_, _| r.sample(StandardNormal));
        let mut v = c + &l * z;
        for (i, ai) in a.iter().enumerate() {
            v += ai * y.row(t - 1 - i).transpose();
        }
        y.set_row(t, &v.transpose());
    }
    Ok(y.rows(p + burn, n).into_owned())
}
