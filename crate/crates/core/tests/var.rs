mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use tsecon::sim::simulate_var;
use tsecon::var::{
    fevd, fit_var, forecast_var, granger_f_tests, impulse_response, portmanteau, select_lag_order, stability_roots,
};
use tsecon::{Period, TimeSeries};

fn columns(m: &DMatrix<f64>) -> Vec<TimeSeries> {
    (0..m.ncols())
        .map(|j| {
            let v: Vec<f64> = m.column(j).iter().copied().collect();
            TimeSeries::new(format!("y{}", j + 1), Period::new(1900, 1).unwrap(), v).unwrap()
        })
        .collect()
}

fn reference_fit() -> tsecon::var::VarFit {
    fit_var(&[common::d_gdp(), common::d_gce()], 1, true).unwrap()
}

#[test]
fn lag_selection_on_quarterly_differences() {
    let sel = select_lag_order(&[common::d_gdp(), common::d_gce()], 8, true).unwrap();
    assert_eq!(sel.rows.len(), 8);
    assert_eq!((sel.best_aic, sel.best_bic), (3, 1));
    assert!(sel.rows[0].lr_p_value.is_none());
}

#[test]
fn recovers_simulated_coefficients() {
    let fit = reference_fit();
    let y = simulate_var(&fit.c, &fit.a, &fit.sigma_ml, 10_000, 500, 21).unwrap();
    let sim = fit_var(&columns(&y), 1, true).unwrap();
    for eq in 0..2 {
        let truth = [fit.c[eq], fit.a[0][(eq, 0)], fit.a[0][(eq, 1)]];
        for (j, t) in truth.iter().enumerate() {
            let c = &sim.equations[eq].coefficients[j];
            assert!((c.value - t).abs() < 3.0 * c.std_error, "eq {eq} coef {j}: {} vs {t}", c.value);
        }
    }
}

#[test]
fn bic_rarely_overfits_white_noise() {
    let id = DMatrix::identity(2, 2);
    let over = (0..40u64)
        .filter(|&seed| {
            let y = simulate_var(&DVector::zeros(2), &[DMatrix::zeros(2, 2)], &id, 2000, 0, seed).unwrap();
            select_lag_order(&columns(&y), 4, true).unwrap().best_bic > 1
        })
        .count();
    assert!(over <= 2, "{over} of 40");
}

#[test]
fn single_lag_f_is_squared_t() {
    let fit = reference_fit();
    let g = granger_f_tests(&fit).unwrap();
    for eq in 0..2 {
        for v in 0..2 {
            let t = fit.equations[eq].coefficients[1 + v].stat;
            assert!((g[eq][v].statistic - t * t).abs() < 1e-8 * (1.0 + t * t));
        }
    }
}

#[test]
fn sigma_ml_is_residual_crossproduct() {
    let fit = reference_fit();
    let e = &fit.residuals;
    let s = e.transpose() * e / e.nrows() as f64;
    assert!((s - &fit.sigma_ml).abs().max() < 1e-8);
}

#[test]
fn random_walks_have_root_near_one() {
    let y = simulate_var(&DVector::zeros(2), &[DMatrix::identity(2, 2)], &DMatrix::identity(2, 2), 500, 0, 2).unwrap();
    let fit = fit_var(&columns(&y), 1, true).unwrap();
    assert!(stability_roots(&fit)[0] > 0.95);
    assert!(stability_roots(&reference_fit()).iter().all(|r| *r < 1.0));
}

#[test]
fn portmanteau_needs_lags_above_order() {
    assert!(portmanteau(&reference_fit(), 1).is_err());
}

#[test]
fn portmanteau_size_under_white_noise() {
    let id = DMatrix::identity(2, 2);
    let reps = 200u64;
    let rejected = (0..reps)
        .filter(|&seed| {
            let y = simulate_var(&DVector::zeros(2), &[DMatrix::zeros(2, 2)], &id, 500, 0, 1000 + seed).unwrap();
            let fit = fit_var(&columns(&y), 1, true).unwrap();
            portmanteau(&fit, 10).unwrap().p_value < 0.05
        })
        .count();
    let rate = rejected as f64 / reps as f64;
    assert!((0.01..=0.10).contains(&rate), "rejection rate {rate}");
}

#[test]
fn forecast_se_matches_fevd_std_error() {
    let fit = reference_fit();
    let fc = forecast_var(&fit, 12, 0.95).unwrap();
    let fv = fevd(&fit, 12, &[0, 1]).unwrap();
    for v in 0..2 {
        for h in 0..12 {
            assert!((fc[v].rows[h].std_error - fv[v].rows[h].std_error).abs() < 1e-8);
        }
    }
}

fn random_fit(a: [f64; 4], seed: u64) -> Option<tsecon::var::VarFit> {
    let a = DMatrix::from_row_slice(2, 2, &a);
    if a.complex_eigenvalues().iter().any(|z| z.norm() > 0.9) {
        return None;
    }
    let sigma = DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]);
    let y = simulate_var(&DVector::from_vec(vec![1.0, -0.5]), &[a], &sigma, 300, 100, seed).ok()?;
    fit_var(&columns(&y), 2, true).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn impact_responses_factor_sigma(a in prop::array::uniform4(-0.6f64..0.6), seed in 0u64..500, swap in any::<bool>()) {
        let Some(fit) = random_fit(a, seed) else { return Ok(()); };
        let ordering = if swap { [1, 0] } else { [0, 1] };
        let irf = impulse_response(&fit, 3, &ordering).unwrap();
        let mut p = DMatrix::zeros(2, 2);
        for t in &irf {
            let s = fit.variable_names.iter().position(|n| *n == t.shock).unwrap();
            let r = fit.variable_names.iter().position(|n| *n == t.response).unwrap();
            p[(r, s)] = t.values[0];
        }
        prop_assert!((&p * p.transpose() - &fit.sigma_ml).abs().max() < 1e-8);
        // the first variable in the ordering does not respond on impact to the second
        prop_assert_eq!(p[(ordering[0], ordering[1])], 0.0);
    }

    #[test]
    fn fevd_shares_are_percentages(a in prop::array::uniform4(-0.6f64..0.6), seed in 0u64..500) {
        let Some(fit) = random_fit(a, seed) else { return Ok(()); };
        for table in fevd(&fit, 10, &[0, 1]).unwrap() {
            for row in &table.rows {
                prop_assert!((row.shares.iter().sum::<f64>() - 100.0).abs() < 1e-6);
                prop_assert!(row.shares.iter().all(|s| *s >= 0.0));
            }
        }
    }

    #[test]
    fn forecast_se_never_shrinks(a in prop::array::uniform4(-0.6f64..0.6), seed in 0u64..500) {
        let Some(fit) = random_fit(a, seed) else { return Ok(()); };
        for v in forecast_var(&fit, 15, 0.9).unwrap() {
            prop_assert!(v.rows.windows(2).all(|w| w[1].std_error >= w[0].std_error - 1e-12));
            prop_assert!(v.rows.iter().all(|r| r.lower < r.point && r.point < r.upper));
        }
    }
}
