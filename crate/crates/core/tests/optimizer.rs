use proptest::prelude::*;
use tsecon::optimize::{covariance_hessian, covariance_opg, maximize, BfgsOptions, Objective};
use tsecon::sim::standard_normal;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// i.i.d. N(μ, σ²) with parameters (μ, σ).
struct NormalMean {
    y: Vec<f64>,
}

impl NormalMean {
    fn terms(&self, x: &[f64]) -> Option<Vec<f64>> {
        let (mu, s) = (x[0], x[1]);
        (s > 0.0).then(|| {
            self.y
                .iter()
                .map(|v| -0.5 * (LN_2PI + 2.0 * s.ln() + ((v - mu) / s).powi(2)))
                .collect()
        })
    }
}

impl Objective for NormalMean {
    fn loglik(&self, x: &[f64]) -> f64 {
        self.terms(x).map_or(f64::NAN, |t| t.iter().sum())
    }

    fn loglik_obs(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.terms(x)
    }
}

#[test]
fn normal_mean_model_recovers_sample_moments() {
    let y: Vec<f64> = standard_normal(5000, 2).iter().map(|z| 3.0 + 2.0 * z).collect();
    let obj = NormalMean { y: y.clone() };
    let r = maximize(&obj, &[0.0, 1.0], &BfgsOptions::default()).unwrap();
    let n = y.len() as f64;
    let m = y.iter().sum::<f64>() / n;
    let s = (y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt();
    assert!(r.converged);
    assert!((r.params[0] - m).abs() < 1e-5 && (r.params[1] - s).abs() < 1e-5);
}

#[test]
fn information_matrix_equality() {
    let y: Vec<f64> = standard_normal(20_000, 9).iter().map(|z| 1.0 + 0.5 * z).collect();
    let obj = NormalMean { y };
    let r = maximize(&obj, &[0.0, 1.0], &BfgsOptions::default()).unwrap();
    let h = covariance_hessian(&obj, &r.params).unwrap();
    let o = covariance_opg(&obj, &r.params).unwrap();
    for i in 0..2 {
        assert!((o[(i, i)] / h[(i, i)] - 1.0).abs() < 0.10, "{i}: {} vs {}", o[(i, i)], h[(i, i)]);
    }
}

#[test]
fn single_observation_opg_is_singular() {
    let obj = NormalMean { y: vec![0.3] };
    assert!(covariance_opg(&obj, &[0.0, 1.0]).is_err());
}

#[test]
fn opg_needs_per_observation_terms() {
    let f = |x: &[f64]| -x[0] * x[0];
    assert!(covariance_opg(&f, &[0.0]).is_err());
}

#[test]
fn optimum_independent_of_parameter_order() {
    let f = |x: &[f64]| -(x[0] - 1.0).powi(2) - 3.0 * (x[1] + 2.0).powi(2) - 0.5 * (x[0] - 1.0) * (x[1] + 2.0) - (x[2] - 0.5).powi(4);
    let g = |x: &[f64]| f(&[x[2], x[0], x[1]]);
    let a = maximize(&f, &[0.0, 0.0, 0.0], &BfgsOptions::default()).unwrap();
    let b = maximize(&g, &[0.0, 0.0, 0.0], &BfgsOptions::default()).unwrap();
    assert!((a.params[0] - b.params[2]).abs() < 1e-4);
    assert!((a.params[1] - b.params[0]).abs() < 1e-4);
    assert!((a.params[2] - b.params[1]).abs() < 5e-2);
    assert!((a.loglik - b.loglik).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratics_reach_their_maximum(
        l in prop::array::uniform3(-2.0f64..2.0),
        d in prop::array::uniform2(0.2f64..5.0),
        c in prop::array::uniform2(-5.0f64..5.0),
    ) {
        // A = L Lᵀ with L lower triangular and a positive diagonal
        let a = [
            d[0] * d[0],
            d[0] * l[0],
            l[0] * l[0] + d[1] * d[1],
        ];
        let f = move |x: &[f64]| {
            let (u, v) = (x[0] - c[0], x[1] - c[1]);
            -(a[0] * u * u + 2.0 * a[1] * u * v + a[2] * v * v)
        };
        let r = maximize(&f, &[0.0, 0.0], &BfgsOptions::default()).unwrap();
        prop_assert!((r.params[0] - c[0]).abs() < 1e-4 && (r.params[1] - c[1]).abs() < 1e-4, "{:?} vs {:?}", r.params, c);
        prop_assert!(r.loglik.abs() < 1e-8);
        let cov = covariance_hessian(&f, &r.params).unwrap();
        prop_assert!((cov[(0, 1)] - cov[(1, 0)]).abs() < 1e-9 * (1.0 + cov[(0, 1)].abs()));
        prop_assert!(cov[(0, 0)] > 0.0 && cov[(1, 1)] > 0.0);
    }
}
