//! Out-of-sample forecast accuracy statistics.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::series::TimeSeries;

/// Accuracy measures for a forecast against realized values. Errors are
/// `actual - forecast`; percentage measures are in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastEvaluation {
    pub n: usize,
    pub me: f64,
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    pub mpe: f64,
    pub mape: f64,
    pub theil_u: f64,
    /// Bias proportion.
    pub um: f64,
    /// Regression proportion.
    pub ur: f64,
    /// Disturbance proportion.
    pub ud: f64,
    /// Set when the forecast reproduces the actuals exactly; the
    /// decomposition is then reported as zeros.
    pub perfect: bool,
}

/// Evaluates `forecast` against `actual` over their common periods.
pub fn evaluate_forecast(actual: &TimeSeries, forecast: &TimeSeries) -> Result<ForecastEvaluation> {
    if actual.start() != forecast.start() || actual.len() != forecast.len() {
        return domain(format!(
            "actual {} and forecast {} are not aligned",
            actual.range(),
            forecast.range()
        ));
    }
    evaluate(actual.values(), forecast.values())
}

pub fn evaluate(actual: &[f64], forecast: &[f64]) -> Result<ForecastEvaluation> {
    let n = actual.len();
    if n != forecast.len() {
        return domain("actual and forecast lengths differ");
    }
    if n < 2 {
        return domain("forecast evaluation needs at least two periods");
    }
    if actual.iter().any(|&y| y == 0.0) {
        return domain("zero actual value: percentage errors undefined");
    }
    let nf = n as f64;
    let e: Vec<f64> = actual.iter().zip(forecast).map(|(y, f)| y - f).collect();
    let me = e.iter().sum::<f64>() / nf;
    let mse = e.iter().map(|v| v * v).sum::<f64>() / nf;
    let mae = e.iter().map(|v| v.abs()).sum::<f64>() / nf;
    let mpe = 100.0 * e.iter().zip(actual).map(|(v, y)| v / y).sum::<f64>() / nf;
    let mape = 100.0 * e.iter().zip(actual).map(|(v, y)| (v / y).abs()).sum::<f64>() / nf;

    // U2: relative errors against the no-change forecast, starting with the
    // second period so that every term uses an in-window lagged actual.
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 1..n {
        let a = (forecast[t] - actual[t]) / actual[t - 1];
        let b = (actual[t] - actual[t - 1]) / actual[t - 1];
        num += a * a;
        den += b * b;
    }
    let theil_u = if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        (num / den).sqrt()
    };

    let perfect = mse == 0.0;
    let (um, ur, ud) = if perfect {
        (0.0, 0.0, 0.0)
    } else {
        let ybar = actual.iter().sum::<f64>() / nf;
        let fbar = forecast.iter().sum::<f64>() / nf;
        let syy = actual.iter().map(|y| (y - ybar).powi(2)).sum::<f64>() / nf;
        let sff = forecast.iter().map(|f| (f - fbar).powi(2)).sum::<f64>() / nf;
        let syf = actual
            .iter()
            .zip(forecast)
            .map(|(y, f)| (y - ybar) * (f - fbar))
            .sum::<f64>()
            / nf;
        let (sy, sf) = (syy.sqrt(), sff.sqrt());
        let r = if sy > 0.0 && sf > 0.0 { syf / (sy * sf) } else { 0.0 };
        (
            (fbar - ybar).powi(2) / mse,
            (sf - r * sy).powi(2) / mse,
            (1.0 - r * r) * syy / mse,
        )
    };

    Ok(ForecastEvaluation {
        n,
        me,
        mse,
        rmse: mse.sqrt(),
        mae,
        mpe,
        mape,
        theil_u,
        um,
        ur,
        ud,
        perfect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_forecast() {
        let y = [1.0, 2.0, 3.0, 5.0];
        let ev = evaluate(&y, &y).unwrap();
        assert!(ev.perfect);
        assert_eq!(ev.rmse, 0.0);
        assert_eq!(ev.theil_u, 0.0);
        assert_eq!((ev.um, ev.ur, ev.ud), (0.0, 0.0, 0.0));
    }

    #[test]
    fn decomposition_sums_to_one() {
        let y = [10.0, 11.0, 13.0, 12.0, 15.0];
        let f = [10.5, 10.0, 12.0, 14.0, 13.5];
        let ev = evaluate(&y, &f).unwrap();
        assert!((ev.um + ev.ur + ev.ud - 1.0).abs() < 1e-12);
        assert!(ev.mae >= ev.me.abs());
    }

    #[test]
    fn zero_actual_rejected() {
        assert!(evaluate(&[1.0, 0.0], &[1.0, 1.0]).is_err());
    }
}
