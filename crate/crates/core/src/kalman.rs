//! Linear Gaussian state space models and the Kalman filter.
//!
//! State:       ξ_{t+1} = F ξ_t + v_t,        E v v' = Q
//! Observation: y_t = A' x_t + H' ξ_t + w_t,   E w w' = R

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, numerical, Result};
use crate::linalg;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    pub f: DMatrix<f64>,
    /// r×n
    pub h: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    /// k×n loading on exogenous inputs.
    pub a: Option<DMatrix<f64>>,
    pub initial_state: DVector<f64>,
    pub initial_covariance: DMatrix<f64>,
}

impl StateSpaceModel {
    pub fn state_dim(&self) -> usize {
        self.f.nrows()
    }

    pub fn obs_dim(&self) -> usize {
        self.h.ncols()
    }

    fn check(&self) -> Result<()> {
        let r = self.state_dim();
        let n = self.obs_dim();
        let ok = self.f.ncols() == r
            && self.h.nrows() == r
            && self.q.shape() == (r, r)
            && self.r.shape() == (n, n)
            && self.initial_state.len() == r
            && self.initial_covariance.shape() == (r, r)
            && self.a.as_ref().is_none_or(|a| a.ncols() == n);
        if ok {
            Ok(())
        } else {
            domain("state space matrices have inconsistent dimensions")
        }
    }
}

#[derive(Debug, Clone)]
pub struct FilterOutput {
    pub loglik_total: f64,
    pub loglik_per_obs: Vec<f64>,
    /// T×r, ξ_{t|t}
    pub filtered_states: DMatrix<f64>,
    /// T×n
    pub prediction_errors: DMatrix<f64>,
    pub prediction_error_variances: Vec<DMatrix<f64>>,
    /// ξ_{T+1|T} and its covariance.
    pub next_state: DVector<f64>,
    pub next_covariance: DMatrix<f64>,
}

/// Predict/update recursion with a Joseph-form covariance update.
pub fn kalman_filter(
    model: &StateSpaceModel,
    y: &DMatrix<f64>,
    exog: Option<&DMatrix<f64>>,
) -> Result<FilterOutput> {
    model.check()?;
    let (t_len, n) = y.shape();
    let r = model.state_dim();
    if n != model.obs_dim() {
        return domain(format!("observations have {n} columns, model expects {}", model.obs_dim()));
    }
    if let (Some(a), Some(x)) = (&model.a, exog) {
        if x.nrows() != t_len || x.ncols() != a.nrows() {
            return domain("exogenous data do not match the loading matrix");
        }
    } else if model.a.is_some() {
        return domain("model has an exogenous loading but no exogenous data were given");
    }
    let eye = DMatrix::<f64>::identity(r, r);
    let ht = model.h.transpose();
    let mut xi = model.initial_state.clone();
    let mut p = model.initial_covariance.clone();
    let mut ll = Vec::with_capacity(t_len);
    let mut states = DMatrix::zeros(t_len, r);
    let mut errs = DMatrix::zeros(t_len, n);
    let mut vars = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let mut v = y.row(t).transpose() - &ht * &xi;
        if let (Some(a), Some(x)) = (&model.a, exog) {
            v -= a.transpose() * x.row(t).transpose();
        }
        let s = &ht * &p * &model.h + &model.r;
        let s = (&s + s.transpose()) * 0.5;
        let Some(chol) = s.clone().cholesky() else {
            return numerical(format!("prediction error variance is singular at t={t}"));
        };
        let logdet = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let sinv_v = chol.solve(&v);
        ll.push(-0.5 * (n as f64 * LN_2PI + logdet + v.dot(&sinv_v)));
        let k = &p * &model.h * chol.inverse();
        xi += &k * &v;
        let ikh = &eye - &k * &ht;
        p = &ikh * &p * ikh.transpose() + &k * &model.r * k.transpose();
        states.set_row(t, &xi.transpose());
        errs.set_row(t, &v.transpose());
        vars.push(s);
        xi = &model.f * &xi;
        p = &model.f * &p * model.f.transpose() + &model.q;
        p = (&p + p.transpose()) * 0.5;
    }
    Ok(FilterOutput {
        loglik_total: ll.iter().sum(),
        loglik_per_obs: ll,
        filtered_states: states,
        prediction_errors: errs,
        prediction_error_variances: vars,
        next_state: xi,
        next_covariance: p,
    })
}

/// Companion form with r = max(p, q+1): F has φ in its first row, H = (1, θ_1, …)'.
pub fn arma_to_state_space(phi: &[f64], theta: &[f64], sigma: f64) -> Result<StateSpaceModel> {
    if !(sigma > 0.0) {
        return domain(format!("innovation sd must be positive, got {sigma}"));
    }
    let r = phi.len().max(theta.len() + 1);
    let f = DMatrix::from_fn(r, r, |i, j| {
        if i == 0 {
            phi.get(j).copied().unwrap_or(0.0)
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let h = DMatrix::from_fn(r, 1, |i, _| {
        if i == 0 {
            1.0
        } else {
            theta.get(i - 1).copied().unwrap_or(0.0)
        }
    });
    let mut q = DMatrix::zeros(r, r);
    q[(0, 0)] = sigma * sigma;
    Ok(StateSpaceModel {
        f,
        h,
        q,
        r: DMatrix::zeros(1, 1),
        a: None,
        initial_state: DVector::zeros(r),
        initial_covariance: DMatrix::zeros(r, r),
    })
}

/// Zero initial state with the stationary covariance P = F P F' + Q.
pub fn diffuse_initialization(model: &StateSpaceModel) -> Result<StateSpaceModel> {
    let rho = linalg::spectral_radius(&model.f);
    if !(rho < 1.0) {
        return domain(format!("transition matrix has spectral radius {rho} ≥ 1"));
    }
    let mut m = model.clone();
    m.initial_state = DVector::zeros(model.state_dim());
    m.initial_covariance = linalg::lyapunov(&model.f, &model.q)?;
    Ok(m)
}

/// Scalar-observation ARMA filter at unit innovation variance.
#[derive(Debug, Clone)]
pub struct ArmaFilter {
    /// One-step prediction errors.
    pub errors: Vec<f64>,
    /// Prediction error variances relative to σ².
    pub variances: Vec<f64>,
    pub next_state: Vec<f64>,
    pub next_covariance: Vec<f64>,
}

impl ArmaFilter {
    /// σ̂² = mean of v²/s.
    pub fn sigma2(&self) -> f64 {
        self.errors
            .iter()
            .zip(&self.variances)
            .map(|(v, s)| v * v / s)
            .sum::<f64>()
            / self.errors.len() as f64
    }

    /// Exact Gaussian log-likelihood with σ² concentrated out.
    pub fn concentrated_loglik(&self) -> f64 {
        let n = self.errors.len() as f64;
        let sum_ln_s: f64 = self.variances.iter().map(|s| s.ln()).sum();
        -0.5 * n * (LN_2PI + 1.0 + self.sigma2().ln()) - 0.5 * sum_ln_s
    }

    /// Exact Gaussian log-likelihood at a given σ.
    pub fn loglik(&self, sigma: f64) -> f64 {
        let s2 = sigma * sigma;
        self.errors
            .iter()
            .zip(&self.variances)
            .map(|(v, s)| -0.5 * (LN_2PI + (s2 * s).ln() + v * v / (s2 * s)))
            .sum()
    }
}

/// Stationary autocovariance of the ARMA companion state at σ = 1.
fn stationary_cov(phi: &[f64], r: usize) -> Option<Vec<f64>> {
    let f = DMatrix::from_fn(r, r, |i, j| {
        if i == 0 {
            phi.get(j).copied().unwrap_or(0.0)
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    if phi.iter().any(|v| !v.is_finite()) {
        return None;
    }
    if !phi.is_empty() && !(linalg::spectral_radius(&f) < 1.0 - 1e-9) {
        return None;
    }
    let mut q = DMatrix::zeros(r, r);
    q[(0, 0)] = 1.0;
    let p = linalg::lyapunov(&f, &q).ok()?;
    Some(p.as_slice().to_vec())
}

/// Runs the filter on already mean-adjusted data. Returns None outside the stationary region.
pub fn arma_filter(phi: &[f64], theta: &[f64], y: &[f64]) -> Option<ArmaFilter> {
    let r = phi.len().max(theta.len() + 1);
    let mut p = stationary_cov(phi, r)?;
    let mut h = vec![0.0; r];
    h[0] = 1.0;
    for (i, &t) in theta.iter().enumerate() {
        h[i + 1] = t;
    }
    let mut fr = vec![0.0; r];
    fr[..phi.len()].copy_from_slice(phi);
    let mut a = vec![0.0; r];
    let mut errors = Vec::with_capacity(y.len());
    let mut variances = Vec::with_capacity(y.len());
    let mut ph = vec![0.0; r];
    let mut steady = false;
    let mut gain = vec![0.0; r];
    let mut s = 0.0;
    let mut pnew = vec![0.0; r * r];
    for &yt in y {
        let v = yt - h.iter().zip(&a).map(|(x, z)| x * z).sum::<f64>();
        if !steady {
            for i in 0..r {
                ph[i] = (0..r).map(|j| p[i + j * r] * h[j]).sum();
            }
            s = h.iter().zip(&ph).map(|(x, z)| x * z).sum();
            if !(s > 1e-12) {
                return None;
            }
            for i in 0..r {
                gain[i] = ph[i] / s;
            }
        }
        errors.push(v);
        variances.push(s);
        // filtered state, then one-step prediction
        for i in 0..r {
            a[i] += gain[i] * v;
        }
        let a0: f64 = fr.iter().zip(&a).map(|(x, z)| x * z).sum();
        for i in (1..r).rev() {
            a[i] = a[i - 1];
        }
        a[0] = a0;
        if !steady {
            // Joseph form with R = 0: (I - k h') P (I - k h')'
            let mut m = vec![0.0; r * r];
            for i in 0..r {
                for j in 0..r {
                    m[i + j * r] = p[i + j * r] - gain[i] * ph[j];
                }
            }
            let mut pf = vec![0.0; r * r];
            for i in 0..r {
                for j in 0..r {
                    pf[i + j * r] = m[i + j * r] - ph[i] * gain[j] + gain[i] * s * gain[j];
                }
            }
            // F pf F' + e1 e1'
            let mut fp = vec![0.0; r * r];
            for j in 0..r {
                fp[j * r] = (0..r).map(|k| fr[k] * pf[k + j * r]).sum();
                for i in 1..r {
                    fp[i + j * r] = pf[i - 1 + j * r];
                }
            }
            for i in 0..r {
                pnew[i] = (0..r).map(|k| fp[i + k * r] * fr[k]).sum();
                for j in 1..r {
                    pnew[i + j * r] = fp[i + (j - 1) * r];
                }
            }
            pnew[0] += 1.0;
            for i in 0..r {
                for j in 0..i {
                    let v = 0.5 * (pnew[i + j * r] + pnew[j + i * r]);
                    pnew[i + j * r] = v;
                    pnew[j + i * r] = v;
                }
            }
            let diff = p
                .iter()
                .zip(&pnew)
                .map(|(x, z)| (x - z).abs())
                .fold(0.0, f64::max);
            std::mem::swap(&mut p, &mut pnew);
            if diff < 1e-14 {
                steady = true;
            }
        }
        if !v.is_finite() {
            return None;
        }
    }
    Some(ArmaFilter {
        errors,
        variances,
        next_state: a,
        next_covariance: p,
    })
}

/// ARMA(p,q) fitted by maximizing the filter likelihood over raw (φ, θ, σ).
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct StateSpaceArmaFit {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma: f64,
    pub loglik: f64,
    /// Standard errors in (φ, θ, σ) order.
    pub std_errors: Vec<f64>,
    pub optim: crate::optimize::OptimResult,
}

impl StateSpaceArmaFit {
    pub fn model(&self) -> Result<StateSpaceModel> {
        diffuse_initialization(&arma_to_state_space(&self.phi, &self.theta, self.sigma)?)
    }
}

/// Log-likelihood of a zero-mean ARMA through the general filter with stationary initialization.
pub fn arma_state_space_loglik(phi: &[f64], theta: &[f64], sigma: f64, y: &[f64]) -> f64 {
    let Ok(m) = arma_to_state_space(phi, theta, sigma.abs()) else {
        return f64::NAN;
    };
    let Ok(m) = diffuse_initialization(&m) else {
        return f64::NAN;
    };
    let obs = DMatrix::from_column_slice(y.len(), 1, y);
    kalman_filter(&m, &obs, None).map_or(f64::NAN, |o| o.loglik_total)
}

/// Maximizes the exact likelihood from `start` = (φ…, θ…, σ) with BFGS and numerical derivatives.
pub fn fit_state_space_arma(y: &[f64], p: usize, q: usize, start: &[f64]) -> Result<StateSpaceArmaFit> {
    if start.len() != p + q + 1 {
        return domain(format!("start needs {} values", p + q + 1));
    }
    let obj = |v: &[f64]| arma_state_space_loglik(&v[..p], &v[p..p + q], v[p + q], y);
    let res = crate::optimize::maximize(&obj, start, &crate::optimize::BfgsOptions::default())?;
    let v = &res.params;
    Ok(StateSpaceArmaFit {
        phi: v[..p].to_vec(),
        theta: v[p..p + q].to_vec(),
        sigma: v[p + q].abs(),
        loglik: res.loglik,
        std_errors: res.std_errors.clone(),
        optim: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_noise_reduces_to_iid_density() {
        let y = [0.3, -1.2, 0.5, 2.0, -0.7];
        let sigma: f64 = 1.7;
        let m = StateSpaceModel {
            f: DMatrix::zeros(1, 1),
            h: DMatrix::from_element(1, 1, 1.0),
            q: DMatrix::from_element(1, 1, sigma * sigma),
            r: DMatrix::zeros(1, 1),
            a: None,
            initial_state: DVector::zeros(1),
            initial_covariance: DMatrix::from_element(1, 1, sigma * sigma),
        };
        let out = kalman_filter(&m, &DMatrix::from_column_slice(5, 1, &y), None).unwrap();
        let direct: f64 = y
            .iter()
            .map(|v| -0.5 * (LN_2PI + 2.0 * sigma.ln() + v * v / (sigma * sigma)))
            .sum();
        assert!((out.loglik_total - direct).abs() < 1e-12);
        let sum: f64 = out.loglik_per_obs.iter().sum();
        assert_eq!(sum, out.loglik_total);
    }

    #[test]
    fn scalar_lyapunov_init() {
        let m = StateSpaceModel {
            f: DMatrix::from_element(1, 1, 0.5),
            h: DMatrix::from_element(1, 1, 1.0),
            q: DMatrix::from_element(1, 1, 1.0),
            r: DMatrix::zeros(1, 1),
            a: None,
            initial_state: DVector::zeros(1),
            initial_covariance: DMatrix::zeros(1, 1),
        };
        let m = diffuse_initialization(&m).unwrap();
        assert!((m.initial_covariance[(0, 0)] - 4.0 / 3.0).abs() < 1e-14);
        let mut unit = m.clone();
        unit.f[(0, 0)] = 1.0;
        assert!(diffuse_initialization(&unit).is_err());
    }

    #[test]
    fn degenerate_model_errors() {
        let m = StateSpaceModel {
            f: DMatrix::from_element(1, 1, 0.5),
            h: DMatrix::from_element(1, 1, 1.0),
            q: DMatrix::zeros(1, 1),
            r: DMatrix::zeros(1, 1),
            a: None,
            initial_state: DVector::zeros(1),
            initial_covariance: DMatrix::zeros(1, 1),
        };
        let y = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert!(kalman_filter(&m, &y, None).is_err());
    }

    #[test]
    fn fast_path_matches_general_filter() {
        let y = [0.5, -0.3, 1.2, 0.8, -1.1, 0.0, 0.4, 2.2, -0.6, 0.9];
        let (phi, theta, sigma) = ([0.6, -0.2], [0.4], 1.3);
        let m = diffuse_initialization(&arma_to_state_space(&phi, &theta, sigma).unwrap()).unwrap();
        let gen = kalman_filter(&m, &DMatrix::from_column_slice(10, 1, &y), None).unwrap();
        let fast = arma_filter(&phi, &theta, &y).unwrap();
        assert!((gen.loglik_total - fast.loglik(sigma)).abs() < 1e-10);
        for t in 0..10 {
            assert!((gen.prediction_errors[(t, 0)] - fast.errors[t]).abs() < 1e-10);
        }
    }
}
