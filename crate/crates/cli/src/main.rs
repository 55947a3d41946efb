use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tsecon::SampleRange;

mod commands;
mod report;

use report::Format;

#[derive(Parser)]
#[command(name = "tsecon", version, about = "Time-series econometrics from the command line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    /// Use the series as loaded.
    Level,
    /// First difference, named d_X.
    Diff,
    /// 100 times the log first difference.
    Ldiff100,
}

fn parse_range(s: &str) -> Result<SampleRange, String> {
    s.parse::<SampleRange>().map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// CSV file(s) with a date column and one column per series.
    #[arg(long)]
    pub data: Vec<PathBuf>,
    /// Series name(s), in the order the command expects.
    #[arg(long = "var")]
    pub vars: Vec<String>,
    /// Estimation range, e.g. 1980Q1:2006Q1.
    #[arg(long, value_parser = parse_range)]
    pub sample: Option<SampleRange>,
    /// Forecast range; must start after the estimation range.
    #[arg(long, value_parser = parse_range)]
    pub forecast: Option<SampleRange>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Directory for the rendered report and plot-data files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub max_lag: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Transformation applied to every selected series before estimation.
    #[arg(long, value_enum, default_value = "level")]
    pub transform: Transform,
    #[arg(long, default_value = "date")]
    pub date_col: String,
}

#[derive(Subcommand)]
enum Command {
    /// ACF, PACF and Ljung-Box Q table.
    Correlogram(Common),
    /// ARIMA fit, diagnostics, forecasts and evaluation; or model screening.
    Arima(commands::ArimaArgs),
    /// ARIMA with contemporaneous exogenous regressors.
    Armax(commands::ArmaxArgs),
    /// Two-step VARMA system with lagged ARIMA residuals as regressors.
    Varma(commands::VarmaArgs),
    /// Lag selection, VAR fit, Granger tests, IRF/FEVD and forecasts.
    Var(commands::VarArgs),
    /// Augmented Dickey-Fuller test.
    Adf(commands::AdfArgs),
    /// Engle-Granger cointegration test.
    Coint(commands::CointArgs),
    /// Volatility model fit, model comparison, or seeded simulate-and-fit.
    Garch(commands::GarchArgs),
    /// ARMA by maximum likelihood through the general state-space filter.
    Kalman(commands::KalmanArgs),
    /// Forecast accuracy of one series against another.
    Evaluate(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Correlogram(c) => (c, commands::correlogram(c)),
        Command::Arima(a) => (&a.common, commands::arima(a)),
        Command::Armax(a) => (&a.common, commands::armax(a)),
        Command::Varma(a) => (&a.common, commands::varma(a)),
        Command::Var(a) => (&a.common, commands::var(a)),
        Command::Adf(a) => (&a.common, commands::adf(a)),
        Command::Coint(a) => (&a.common, commands::coint(a)),
        Command::Garch(a) => (&a.common, commands::garch(a)),
        Command::Kalman(a) => (&a.common, commands::kalman(a)),
        Command::Evaluate(c) => (c, commands::evaluate(c)),
    };
    match result {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", report.render(common.format));
            if let Some(dir) = &common.out {
                if let Err(e) = report.write_to(dir, common.format) {
                    eprintln!("error: writing to {}: {e}", dir.display());
                    return ExitCode::FAILURE;
                }
            }
            ExitCode::SUCCESS
        }
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
