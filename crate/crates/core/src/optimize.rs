//! Quasi-Newton maximum likelihood with numerical derivatives.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, numerical, Result};

/// A log-likelihood to maximize. Infeasible points return a non-finite value.
pub trait Objective {
    fn loglik(&self, x: &[f64]) -> f64;

    /// Per-observation contributions, needed for OPG covariances.
    fn loglik_obs(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl<F: Fn(&[f64]) -> f64> Objective for F {
    fn loglik(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    /// Relative change in the objective that stops the iterations.
    pub reltol: f64,
    pub max_iter: usize,
    /// Number of restarts from the last point when the gradient check fails.
    pub restarts: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            reltol: 1.81899e-12,
            max_iter: 600,
            restarts: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimResult {
    pub params: Vec<f64>,
    pub loglik: f64,
    pub std_errors: Vec<f64>,
    pub covariance: Option<Vec<Vec<f64>>>,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Relative change criterion met and the gradient is small.
    pub converged: bool,
    /// Relative change criterion met on the last pass (gradient not checked).
    pub finished: bool,
    pub n_function_evals: usize,
    pub n_gradient_evals: usize,
}

/// One accepted BFGS step, for tracing.
#[derive(Debug, Clone)]
pub struct TraceStep<'a> {
    pub iteration: usize,
    pub loglik: f64,
    pub params: &'a [f64],
}

fn grad_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

fn hess_step(x: f64) -> f64 {
    f64::EPSILON.powf(0.25) * x.abs().max(1.0)
}

/// Central-difference gradient; falls back to a one-sided difference at a boundary.
pub fn gradient<O: Objective + ?Sized>(obj: &O, x: &[f64]) -> Vec<f64> {
    let f0 = obj.loglik(x);
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = grad_step(x[i]);
            xp[i] = x[i] + h;
            let fp = obj.loglik(&xp);
            xp[i] = x[i] - h;
            let fm = obj.loglik(&xp);
            xp[i] = x[i];
            match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - f0) / h,
                (false, true) => (f0 - fm) / h,
                _ => f64::NAN,
            }
        })
        .collect()
}

/// Central-difference Hessian of the total log-likelihood, symmetrized.
pub fn hessian<O: Objective + ?Sized>(obj: &O, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let f0 = obj.loglik(x);
    let h: Vec<f64> = x.iter().map(|&v| hess_step(v)).collect();
    let mut xp = x.to_vec();
    let mut eval = |d: &[(usize, f64)]| {
        for &(i, s) in d {
            xp[i] += s;
        }
        let f = obj.loglik(&xp);
        for &(i, s) in d {
            xp[i] -= s;
        }
        f
    };
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = eval(&[(i, h[i])]);
        let fm = eval(&[(i, -h[i])]);
        m[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let fpp = eval(&[(i, h[i]), (j, h[j])]);
            let fpm = eval(&[(i, h[i]), (j, -h[j])]);
            let fmp = eval(&[(i, -h[i]), (j, h[j])]);
            let fmm = eval(&[(i, -h[i]), (j, -h[j])]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Negative inverse Hessian. Errors when the Hessian is not negative definite.
pub fn covariance_hessian<O: Objective + ?Sized>(obj: &O, at: &[f64]) -> Result<DMatrix<f64>> {
    let h = hessian(obj, at);
    if h.iter().any(|v| !v.is_finite()) {
        return numerical("non-finite Hessian");
    }
    let eig = h.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l < 0.0)) {
        return numerical(format!(
            "Hessian is not negative definite, eigenvalues {:?}",
            eig.eigenvalues.as_slice()
        ));
    }
    let cov = (-h)
        .try_inverse()
        .ok_or_else(|| crate::Error::Numerical("singular Hessian".into()))?;
    Ok((&cov + cov.transpose()) * 0.5)
}

/// Inverse of the outer product of per-observation gradients.
pub fn covariance_opg<O: Objective + ?Sized>(obj: &O, at: &[f64]) -> Result<DMatrix<f64>> {
    let Some(base) = obj.loglik_obs(at) else {
        return domain("objective does not supply per-observation log-likelihoods");
    };
    let t = base.len();
    let k = at.len();
    let mut g = DMatrix::zeros(t, k);
    let mut xp = at.to_vec();
    for j in 0..k {
        let h = grad_step(at[j]);
        xp[j] = at[j] + h;
        let fp = obj.loglik_obs(&xp);
        xp[j] = at[j] - h;
        let fm = obj.loglik_obs(&xp);
        xp[j] = at[j];
        let (Some(fp), Some(fm)) = (fp, fm) else {
            return numerical("per-observation log-likelihood unavailable near the optimum");
        };
        for i in 0..t {
            g[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let opg = g.transpose() * g;
    if opg.iter().any(|v| !v.is_finite()) {
        return numerical("non-finite OPG matrix");
    }
    let eig = opg.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.max();
    if !(eig.eigenvalues.min() > 1e-12 * lmax.max(1e-300)) {
        return numerical("OPG matrix is singular");
    }
    let cov = opg.try_inverse().ok_or_else(|| crate::Error::Numerical("singular OPG".into()))?;
    Ok((&cov + cov.transpose()) * 0.5)
}

struct Counters {
    f: usize,
    g: usize,
}

/// Variable-metric minimization of `-loglik` (backtracking line search, inverse-Hessian update).
fn vmmin<O: Objective + ?Sized>(
    obj: &O,
    b: &mut [f64],
    opts: &BfgsOptions,
    cnt: &mut Counters,
    iter: &mut usize,
    sink: &mut dyn FnMut(&TraceStep),
) -> (f64, bool) {
    const STEPREDN: f64 = 0.2;
    const ACCTOL: f64 = 1e-4;
    const RELTEST: f64 = 10.0;
    let n = b.len();
    let fmin_of = |x: &[f64]| {
        let v = -obj.loglik(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let neg_grad = |x: &[f64]| -> Vec<f64> { gradient(obj, x).into_iter().map(|g| -g).collect() };
    let mut fmin = fmin_of(b);
    cnt.f += 1;
    let mut g = neg_grad(b);
    cnt.g += 1;
    let mut bmat = DMatrix::<f64>::identity(n, n);
    let mut t = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut c: Vec<f64>;
    let mut ilast = cnt.g;
    let mut hit_max = false;
    loop {
        if ilast == cnt.g {
            bmat.fill_with_identity();
        }
        x.copy_from_slice(b);
        c = g.clone();
        let mut gradproj = 0.0;
        for i in 0..n {
            let s: f64 = (0..n).map(|j| -bmat[(i, j)] * g[j]).sum();
            t[i] = s;
            gradproj += s * g[i];
        }
        let mut count;
        if gradproj < 0.0 {
            let mut steplength = 1.0;
            let mut accpoint = false;
            let mut f = fmin;
            loop {
                count = 0;
                for i in 0..n {
                    b[i] = x[i] + steplength * t[i];
                    if RELTEST + x[i] == RELTEST + b[i] {
                        count += 1;
                    }
                }
                if count < n {
                    f = fmin_of(b);
                    cnt.f += 1;
                    accpoint = f.is_finite() && f <= fmin + gradproj * steplength * ACCTOL;
                    if !accpoint {
                        steplength *= STEPREDN;
                    }
                }
                if count == n || accpoint {
                    break;
                }
            }
            if count < n && (f - fmin).abs() <= opts.reltol * (fmin.abs() + opts.reltol) {
                count = n;
                fmin = f;
            }
            if count < n {
                fmin = f;
                g = neg_grad(b);
                cnt.g += 1;
                *iter += 1;
                sink(&TraceStep {
                    iteration: *iter,
                    loglik: -fmin,
                    params: b,
                });
                let mut d1 = 0.0;
                for i in 0..n {
                    t[i] *= steplength;
                    c[i] = g[i] - c[i];
                    d1 += t[i] * c[i];
                }
                if d1 > 0.0 && g.iter().all(|v| v.is_finite()) {
                    let mut d2 = 0.0;
                    for i in 0..n {
                        let s: f64 = (0..n).map(|j| bmat[(i, j)] * c[j]).sum();
                        x[i] = s;
                        d2 += s * c[i];
                    }
                    d2 = 1.0 + d2 / d1;
                    for i in 0..n {
                        for j in 0..n {
                            bmat[(i, j)] += (d2 * t[i] * t[j] - x[i] * t[j] - t[i] * x[j]) / d1;
                        }
                    }
                } else {
                    ilast = cnt.g;
                }
            } else if ilast < cnt.g {
                count = 0;
                ilast = cnt.g;
            }
        } else {
            count = 0;
            if ilast == cnt.g {
                count = n;
            } else {
                ilast = cnt.g;
            }
        }
        if *iter >= opts.max_iter {
            hit_max = true;
            break;
        }
        if cnt.g - ilast > 2 * n {
            ilast = cnt.g;
        }
        if count == n && ilast == cnt.g {
            break;
        }
    }
    (-fmin, !hit_max)
}

/// BFGS maximization from `start`; Hessian-based covariance at the optimum when available.
pub fn maximize<O: Objective + ?Sized>(obj: &O, start: &[f64], opts: &BfgsOptions) -> Result<OptimResult> {
    maximize_traced(obj, start, opts, &mut |_| {})
}

pub fn maximize_traced<O: Objective + ?Sized>(
    obj: &O,
    start: &[f64],
    opts: &BfgsOptions,
    sink: &mut dyn FnMut(&TraceStep),
) -> Result<OptimResult> {
    let f0 = obj.loglik(start);
    if !f0.is_finite() {
        return domain(format!("objective is not finite at the starting point {start:?}"));
    }
    let mut b = start.to_vec();
    let mut cnt = Counters { f: 0, g: 0 };
    let mut iter = 0;
    let mut loglik = f0;
    let mut converged = false;
    let mut done = false;
    let mut gnorm = f64::INFINITY;
    for _ in 0..=opts.restarts {
        let (ll, finished) = vmmin(obj, &mut b, opts, &mut cnt, &mut iter, sink);
        loglik = ll;
        gnorm = gradient(obj, &b).iter().fold(0.0, |a: f64, g| a.max(g.abs()));
        done = finished;
        converged = finished && gnorm < 1e-4 * (1.0 + loglik.abs());
        if converged || !finished {
            break;
        }
    }
    let cov = covariance_hessian(obj, &b).ok();
    let std_errors = match &cov {
        Some(c) => (0..b.len()).map(|i| c[(i, i)].sqrt()).collect(),
        None => vec![f64::NAN; b.len()],
    };
    Ok(OptimResult {
        params: b,
        loglik,
        std_errors,
        covariance: cov.map(|c| c.row_iter().map(|r| r.iter().copied().collect()).collect()),
        iterations: iter,
        gradient_norm: gnorm,
        converged,
        finished: done,
        n_function_evals: cnt.f,
        n_gradient_evals: cnt.g,
    })
}

pub fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

pub fn std_errors_of(cov: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(cov.nrows(), (0..cov.nrows()).map(|i| cov[(i, i)].sqrt()))
}
