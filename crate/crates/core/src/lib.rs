//! Time-series econometrics: Box-Jenkins ARIMA by exact Kalman-filter maximum
//! likelihood, VAR/VARMA systems with impulse responses, unit-root and
//! cointegration tests, GARCH-family volatility models and forecast evaluation.

pub mod arima;
pub mod diagnostics;
pub mod error;
pub mod forecast_eval;
pub mod kalman;
pub mod linalg;
pub mod optimize;
pub mod series;
pub mod sim;
pub mod stats;
pub mod unitroot;
pub mod var;
pub mod volatility;

pub use error::{Error, Result};
pub use series::{load_csv, Period, SampleRange, TimeSeries};
pub use stats::{Coefficient, Criteria, Distribution, TestResult};
