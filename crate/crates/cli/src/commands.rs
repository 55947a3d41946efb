//! One function per subcommand. Each loads its inputs, runs the estimators and
//! assembles a `Report`; nothing is printed here.

use std::fmt;
use std::str::FromStr;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use tsecon::arima::{self, ArimaFit, ArimaSpec};
use tsecon::diagnostics;
use tsecon::forecast_eval::{self, ForecastEvaluation};
use tsecon::kalman;
use tsecon::linalg::Regression;
use tsecon::series::load_csv_columns;
use tsecon::unitroot::{self, AdfResult, Deterministic};
use tsecon::var;
use tsecon::volatility::{self, GarchFit, GarchSpec, Innovation, Variant};
use tsecon::{sim, Coefficient, Criteria, Distribution, Period, SampleRange, TestResult, TimeSeries};

use crate::report::{fixed, g, pval, stars, PlotFile, Report, Section, Table};
use crate::{Common, Transform};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(tsecon::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<tsecon::Error> for CliError {
    fn from(e: tsecon::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

// ---------------------------------------------------------------------------
// Inputs

fn load_all(c: &Common) -> CliResult<Vec<TimeSeries>> {
    if c.data.is_empty() {
        return usage("at least one --data file is required");
    }
    let mut out = Vec::new();
    for path in &c.data {
        out.extend(load_csv_columns(path, &c.date_col)?);
    }
    Ok(out)
}

fn find(all: &[TimeSeries], name: &str) -> CliResult<TimeSeries> {
    match all.iter().find(|s| s.name() == name) {
        Some(s) => Ok(s.clone()),
        None => {
            let names: Vec<&str> = all.iter().map(|s| s.name()).collect();
            usage(format!("series '{name}' not found; available: {}", names.join(", ")))
        }
    }
}

fn transform(s: &TimeSeries, t: Transform) -> CliResult<TimeSeries> {
    Ok(match t {
        Transform::Level => s.clone(),
        Transform::Diff => s.diff(1)?,
        Transform::Ldiff100 => s.ldiff_scaled(100.0)?,
    })
}

/// Loads the `--var` series, checking the count against `min..=max`.
fn selected(c: &Common, min: usize, max: usize) -> CliResult<Vec<TimeSeries>> {
    if c.vars.len() < min || c.vars.len() > max {
        let want = if min == max {
            format!("exactly {min}")
        } else if max == usize::MAX {
            format!("at least {min}")
        } else {
            format!("{min} to {max}")
        };
        return usage(format!("this command needs {want} --var argument(s), got {}", c.vars.len()));
    }
    let all = load_all(c)?;
    c.vars.iter().map(|v| find(&all, v)).collect()
}

fn common_range(series: &[TimeSeries]) -> CliResult<SampleRange> {
    let from = series.iter().map(|s| s.start()).max().expect("non-empty");
    let to = series.iter().map(|s| s.end()).min().expect("non-empty");
    if to < from {
        return usage("the selected series do not overlap");
    }
    Ok(SampleRange::new(from, to)?)
}

/// Estimation range: `--sample` if given, else the common span of `series`.
/// Also validates the forecast range against it.
fn estimation_range(c: &Common, series: &[TimeSeries]) -> CliResult<SampleRange> {
    let r = match c.sample {
        Some(r) => r,
        None => common_range(series)?,
    };
    if let Some(f) = c.forecast {
        if f.from <= r.to {
            return usage(format!("forecast range {f} must start after the estimation range {r}"));
        }
    }
    Ok(r)
}

fn transformed_slices(c: &Common, raw: &[TimeSeries]) -> CliResult<(Vec<TimeSeries>, SampleRange)> {
    let t: Vec<TimeSeries> = raw.iter().map(|s| transform(s, c.transform)).collect::<CliResult<_>>()?;
    let r = estimation_range(c, &t)?;
    let sliced = t.iter().map(|s| s.slice(r)).collect::<tsecon::Result<Vec<_>>>()?;
    Ok((sliced, r))
}

fn max_lag(c: &Common) -> CliResult<Option<usize>> {
    match c.max_lag {
        Some(0) => usage("--max-lag must be at least 1"),
        m => Ok(m),
    }
}

/// 12·(T/100)^¼, the usual default lag ceiling for unit-root regressions.
fn default_adf_lag(n: usize) -> usize {
    ((12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize).max(1)
}

fn period_x(p: Period) -> f64 {
    p.year() as f64 + (p.quarter() as f64 - 1.0) / 4.0
}

fn series_x(s: &TimeSeries) -> Vec<f64> {
    (0..s.len()).map(|t| period_x(s.period_at(t))).collect()
}

fn histogram_bins(n: usize) -> usize {
    let b = (n as f64).sqrt().floor() as usize;
    if b % 2 == 0 {
        b + 1
    } else {
        b
    }
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

// ---------------------------------------------------------------------------
// Shared renderers

fn dist_label(d: &Distribution) -> String {
    match *d {
        Distribution::ChiSquare(k) => format!("Chi-square({k})"),
        Distribution::F(a, b) => format!("F({a}, {b})"),
        Distribution::StudentT(k) => format!("t({k})"),
        Distribution::Normal => "N(0,1)".into(),
        Distribution::DickeyFuller(n) => format!("DF tau (n={n})"),
    }
}

fn test_line(t: &TestResult) -> String {
    format!(
        "{}: {} = {}, p-value {}",
        t.name,
        dist_label(&t.distribution),
        g(t.statistic),
        pval(t.p_value)
    )
}

fn coefficient_table(coefs: &[Coefficient], stat_label: &str) -> Table {
    let mut t = Table::new(&["", "coefficient", "std. error", stat_label, "p-value", ""]);
    for c in coefs {
        t.row(vec![
            c.name.clone(),
            g(c.value),
            g(c.std_error),
            fixed(c.stat, 4),
            pval(c.p_value),
            stars(c.p_value).into(),
        ]);
    }
    t
}

fn criteria_lines(s: Section, ll: f64, cr: &Criteria) -> Section {
    s.note(format!("Log-likelihood      {}", fixed(ll, 4)))
        .note(format!("Akaike criterion    {}", fixed(cr.aic, 4)))
        .note(format!("Schwarz criterion   {}", fixed(cr.bic, 4)))
        .note(format!("Hannan-Quinn        {}", fixed(cr.hqc, 4)))
}

fn regression_section(title: String, r: &Regression) -> Section {
    let mut s = Section::new(title)
        .line(format!("Dependent variable: {}", r.dependent))
        .table(coefficient_table(&r.coefficients, "t-ratio"))
        .note(format!("Mean dependent var   {}   S.D. dependent var   {}", g(r.ymean), g(r.ysd)))
        .note(format!("Sum squared resid    {}   S.E. of regression   {}", g(r.ssr), g(r.se_regression)))
        .note(format!("R-squared            {}   Adjusted R-squared   {}", fixed(r.r2, 6), fixed(r.adj_r2, 6)));
    if let (Some(f), Some(p)) = (r.f_stat, r.f_p_value) {
        s = s.note(format!("F statistic          {}   P-value(F)           {}", g(f), pval(p)));
    }
    s.note(format!("Log-likelihood       {}   Durbin-Watson        {}", fixed(r.loglik, 4), fixed(r.durbin_watson, 6)))
        .note(format!("rho                  {}", fixed(r.rho, 6)))
}

fn evaluation_section(e: &ForecastEvaluation) -> Section {
    let mut t = Table::new(&["statistic", "value"]);
    for (k, v) in [
        ("Mean Error", e.me),
        ("Mean Squared Error", e.mse),
        ("Root Mean Squared Error", e.rmse),
        ("Mean Absolute Error", e.mae),
        ("Mean Percentage Error", e.mpe),
        ("Mean Absolute Percentage Error", e.mape),
        ("Theil's U", e.theil_u),
        ("Bias proportion, UM", e.um),
        ("Regression proportion, UR", e.ur),
        ("Disturbance proportion, UD", e.ud),
    ] {
        t.row(vec![k.into(), g(v)]);
    }
    Section::new(format!("Forecast evaluation statistics (T = {})", e.n)).table(t)
}

fn frequency_section(resid: &[f64]) -> CliResult<Section> {
    let bins = diagnostics::frequency_distribution(resid, histogram_bins(resid.len()))?;
    let mut t = Table::new(&["interval", "midpt", "frequency", "rel.", "cum."]);
    for b in &bins {
        let iv = match (b.lower, b.upper) {
            (None, Some(u)) => format!("< {}", g(u)),
            (Some(l), None) => format!(">= {}", g(l)),
            (Some(l), Some(u)) => format!("{} - {}", g(l), g(u)),
            (None, None) => "all".into(),
        };
        t.row(vec![
            iv,
            g(b.midpoint),
            b.count.to_string(),
            format!("{:.2}%", 100.0 * b.relative),
            format!("{:.2}%", 100.0 * b.cumulative),
        ]);
    }
    let (m, s) = mean_sd(resid);
    Ok(Section::new(format!("Frequency distribution of residuals ({} bins)", bins.len()))
        .line(format!("mean = {}, sd = {}", g(m), g(s)))
        .table(t))
}

// ---------------------------------------------------------------------------
// correlogram

#[derive(Serialize)]
struct CorrelogramOut<'a> {
    variable: &'a str,
    sample: SampleRange,
    rows: &'a [diagnostics::CorrelogramRow],
}

pub fn correlogram(c: &Common) -> CliResult<Report> {
    let lag = max_lag(c)?.unwrap_or(20);
    let raw = selected(c, 1, 1)?;
    let (s, r) = transformed_slices(c, &raw)?;
    let y = &s[0];
    let rows = diagnostics::acf(y.values(), lag)?;
    let mut rep = Report::new("correlogram", format!("Autocorrelation function for {}", y.name()));
    let mut t = Table::new(&["LAG", "ACF", "", "PACF", "", "Q-stat.", "[p-value]"]);
    for row in &rows {
        let mark = |b: bool| if b { "**" } else { "" }.to_string();
        t.row(vec![
            row.lag.to_string(),
            fixed(row.acf, 4),
            mark(row.acf_significant),
            fixed(row.pacf, 4),
            mark(row.pacf_significant),
            fixed(row.q_stat, 4),
            format!("[{}]", fixed(row.p_value, 3)),
        ]);
    }
    rep.push(
        Section::new(format!("Sample {r} (T = {}), maximum lag {lag}", y.len()))
            .table(t)
            .note(format!("** significant at the 5% level using ±1.96/T^0.5 = ±{}", fixed(1.96 / (y.len() as f64).sqrt(), 4))),
    );
    let lags: Vec<f64> = rows.iter().map(|r| r.lag as f64).collect();
    rep.plots.push(PlotFile::xy("acf", &lags, &rows.iter().map(|r| r.acf).collect::<Vec<_>>()));
    rep.plots.push(PlotFile::xy("pacf", &lags, &rows.iter().map(|r| r.pacf).collect::<Vec<_>>()));
    rep.result(
        "correlogram",
        &CorrelogramOut {
            variable: y.name(),
            sample: r,
            rows: &rows,
        },
    );
    Ok(rep)
}

// ---------------------------------------------------------------------------
// arima / armax

#[derive(Debug, Clone, Copy)]
pub struct Order(pub usize, pub usize, pub usize);

impl FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<usize> = s
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("order '{s}' is not p,d,q"))?;
        match v[..] {
            [p, d, q] => Ok(Order(p, d, q)),
            _ => Err(format!("order '{s}' is not p,d,q")),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ARIMA({},{},{})", self.0, self.1, self.2)
    }
}

const SCREEN_ORDERS: [Order; 5] = [Order(1, 1, 0), Order(0, 1, 1), Order(1, 1, 1), Order(2, 1, 0), Order(0, 1, 2)];

#[derive(Args, Debug, Clone)]
pub struct ArimaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long)]
    pub no_const: bool,
    /// Fit several orders and tabulate the diagnostic battery for each.
    #[arg(long)]
    pub screen: bool,
    /// Orders for --screen as p,d,q (repeatable).
    #[arg(long = "order")]
    pub orders: Vec<Order>,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    /// Residuals beyond this many standard deviations are flagged.
    #[arg(long, default_value_t = 2.5)]
    pub flag_sd: f64,
    #[arg(long, default_value_t = 4)]
    pub lb_lag: usize,
    #[arg(long, default_value_t = 4)]
    pub arch_lag: usize,
    /// Significance level for the screening verdict.
    #[arg(long, default_value_t = 0.02)]
    pub screen_level: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ArmaxArgs {
    #[command(flatten)]
    pub arima: ArimaArgs,
    /// Exogenous regressor(s), differenced like the dependent variable.
    #[arg(long, required = true)]
    pub exog: Vec<String>,
}

impl std::ops::Deref for ArmaxArgs {
    type Target = ArimaArgs;

    fn deref(&self) -> &ArimaArgs {
        &self.arima
    }
}

#[derive(Debug, Clone, Serialize)]
struct Battery {
    normality: TestResult,
    ljung_box: TestResult,
    arch: TestResult,
}

impl Battery {
    fn run(fit: &ArimaFit, lb_lag: usize, arch_lag: usize) -> CliResult<Self> {
        let e = fit.residuals.values();
        Ok(Battery {
            normality: diagnostics::doornik_hansen(&[e])?,
            ljung_box: diagnostics::ljung_box(e, lb_lag, fit.spec.p + fit.spec.q)?,
            arch: diagnostics::arch_lm(e, arch_lag)?.test,
        })
    }

    fn passes(&self, level: f64) -> bool {
        [&self.normality, &self.ljung_box, &self.arch].iter().all(|t| t.p_value > level)
    }
}

fn arima_level_series(c: &Common, name: &str) -> CliResult<(TimeSeries, Vec<TimeSeries>)> {
    let all = load_all(c)?;
    let y = transform(&find(&all, name)?, c.transform)?;
    Ok((y, all))
}

fn arima_spec(a: &ArimaArgs, o: Order) -> ArimaSpec {
    let s = ArimaSpec::new(o.0, o.1, o.2);
    if a.no_const {
        s.without_const()
    } else {
        s
    }
}

pub fn arima(a: &ArimaArgs) -> CliResult<Report> {
    let c = &a.common;
    if c.vars.len() != 1 {
        return usage("arima needs exactly one --var");
    }
    let (y, _) = arima_level_series(c, &c.vars[0])?;
    let range = estimation_range(c, std::slice::from_ref(&y))?;
    if a.screen {
        return screen(a, &y, range);
    }
    let fit = arima::fit_arima(&y, &arima_spec(a, Order(a.p, a.d, a.q)), range)?;
    arima_report("arima", a, &y, fit, &[])
}

pub fn armax(a: &ArmaxArgs) -> CliResult<Report> {
    let c = &a.common;
    if c.vars.len() != 1 {
        return usage("armax needs exactly one --var (the dependent series)");
    }
    let (y, all) = arima_level_series(c, &c.vars[0])?;
    let mut spec = arima_spec(a, Order(a.p, a.d, a.q));
    let mut exog = Vec::new();
    for name in &a.exog {
        let x = transform(&find(&all, name)?, c.transform)?;
        spec = spec.with_exog(x.clone());
        exog.push(x);
    }
    let range = estimation_range(c, std::slice::from_ref(&y))?;
    let fit = arima::fit_armax(&y, &spec, range)?;
    arima_report("armax", a, &y, fit, &exog)
}

fn screen(a: &ArimaArgs, y: &TimeSeries, range: SampleRange) -> CliResult<Report> {
    let orders: Vec<Order> = if a.orders.is_empty() {
        SCREEN_ORDERS.to_vec()
    } else {
        a.orders.clone()
    };
    let results: Vec<(Order, CliResult<(ArimaFit, Battery)>)> = orders
        .par_iter()
        .map(|&o| {
            let r = arima::fit_arima(y, &arima_spec(a, o), range)
                .map_err(CliError::from)
                .and_then(|f| Battery::run(&f, a.lb_lag, a.arch_lag).map(|b| (f, b)));
            (o, r)
        })
        .collect();
    let mut rep = Report::new("arima", format!("Model screening for {} over {range}", y.name()));
    let mut t = Table::new(&[
        "model",
        "loglik",
        "AIC",
        "BIC",
        "normality (p)",
        &format!("Ljung-Box({}) (p)", a.lb_lag),
        &format!("ARCH({}) (p)", a.arch_lag),
        "verdict",
    ]);
    let mut out = Vec::new();
    for (o, r) in &results {
        match r {
            Ok((f, b)) => {
                let pass = b.passes(a.screen_level);
                let cell = |t: &TestResult| format!("{} ({})", g(t.statistic), pval(t.p_value));
                t.row(vec![
                    o.to_string(),
                    fixed(f.loglik, 4),
                    fixed(f.criteria.aic, 3),
                    fixed(f.criteria.bic, 3),
                    cell(&b.normality),
                    cell(&b.ljung_box),
                    cell(&b.arch),
                    if pass { "pass" } else { "FAIL" }.into(),
                ]);
                out.push(json!({
                    "model": o.to_string(), "loglik": f.loglik, "criteria": f.criteria,
                    "battery": b, "pass": pass, "error": null,
                }));
            }
            Err(e) => {
                let mut row = vec![o.to_string()];
                row.extend(std::iter::repeat_n("N/A".to_string(), 6));
                row.push("error".into());
                t.row(row);
                rep.warnings.push(format!("{o}: {e}"));
                out.push(json!({ "model": o.to_string(), "error": e.to_string() }));
            }
        }
    }
    rep.push(
        Section::new(format!("Diagnostic battery (a model passes when every p-value exceeds {})", a.screen_level))
            .table(t)
            .note("normality: Doornik-Hansen; LB: Ljung-Box on residuals; ARCH: LM test on squared residuals"),
    );
    rep.result("screen", &out);
    Ok(rep)
}

fn arima_report(command: &str, a: &ArimaArgs, y: &TimeSeries, fit: ArimaFit, exog: &[TimeSeries]) -> CliResult<Report> {
    let c = &a.common;
    let label = {
        let base = format!("ARIMA({},{},{})", fit.spec.p, fit.spec.d, fit.spec.q);
        if exog.is_empty() {
            base
        } else {
            format!("{base}X")
        }
    };
    let mut rep = Report::new(
        command,
        format!("Model: {label}, using observations {} (T = {})", fit.sample, fit.nobs),
    );
    if !fit.converged {
        rep.warnings.push("the optimizer did not meet its convergence criteria".into());
    }
    let dep = match fit.spec.d {
        0 => y.name().to_string(),
        1 => format!("(1-L) {}", y.name()),
        d => format!("(1-L)^{d} {}", y.name()),
    };
    let w = fit.levels.values();
    let wd = if fit.spec.d == 0 {
        w.to_vec()
    } else {
        fit.levels.diff(fit.spec.d)?.into_values()
    };
    let (mdep, sdep) = mean_sd(&wd);
    let s = Section::new("Estimates")
        .line(format!("Estimated using the Kalman filter (exact ML); dependent variable: {dep}"))
        .table(coefficient_table(&fit.coefficients, "z"))
        .note(format!("Mean dependent var   {}   S.D. dependent var   {}", g(mdep), g(sdep)))
        .note(format!("Mean of innovations  {}   S.D. of innovations  {}", g(fit.mean_innovations), g(fit.sd_innovations)));
    rep.push(criteria_lines(s, fit.loglik, &fit.criteria));

    let mut roots = Table::new(&["", "real", "imaginary", "modulus", "frequency"]);
    for (kind, rs) in [("AR", &fit.ar_roots), ("MA", &fit.ma_roots)] {
        for (i, r) in rs.iter().enumerate() {
            roots.row(vec![
                format!("{kind} root {}", i + 1),
                fixed(r.real, 4),
                fixed(r.imaginary, 4),
                fixed(r.modulus, 4),
                fixed(r.frequency, 4),
            ]);
        }
    }
    if !roots.rows.is_empty() {
        rep.push(Section::new("Roots").table(roots));
    }

    let rows = arima::residual_report(&fit, a.flag_sd);
    let mut t = Table::new(&["period", "actual", "fitted", "residual", ""]);
    for r in &rows {
        t.row(vec![
            r.period.to_string(),
            g(r.actual),
            g(r.fitted),
            g(r.residual),
            if r.flagged { "*" } else { "" }.into(),
        ]);
    }
    rep.push(
        Section::new("Actual, fitted and residual values")
            .table(t)
            .note(format!("* residual exceeds {} standard errors", a.flag_sd)),
    );

    let battery = Battery::run(&fit, a.lb_lag, a.arch_lag)?;
    rep.push(
        Section::new("Residual diagnostics")
            .line(format!("Normality ({})", test_line(&battery.normality)))
            .line(format!("Autocorrelation ({})", test_line(&battery.ljung_box)))
            .line(format!("Heteroskedasticity ({})", test_line(&battery.arch))),
    );
    let resid = fit.residuals.values();
    rep.push(frequency_section(resid)?);
    rep.plots.push(PlotFile::xy("residuals", &series_x(&fit.residuals), resid));

    let mut forecast_rows = Vec::new();
    let mut evaluation = None;
    if let Some(fr) = c.forecast {
        let horizon = fr.to.since(&fit.sample.to) as usize;
        let all = arima::forecast_arima(&fit, horizon, a.confidence, exog)?;
        forecast_rows = all.into_iter().filter(|r| r.period >= fr.from).collect();
        let mut t = Table::new(&["period", "actual", "prediction", "std. error", "lower", "upper"]);
        let mut actual = Vec::new();
        for r in &forecast_rows {
            let act = y.get(r.period);
            if let Some(v) = act {
                actual.push(v);
            }
            t.row(vec![
                r.period.to_string(),
                act.map(g).unwrap_or_else(|| "N/A".into()),
                g(r.point),
                g(r.std_error),
                g(r.lower),
                g(r.upper),
            ]);
        }
        rep.push(
            Section::new(format!("Forecasts for {fr}"))
                .line(format!("{}% interval", 100.0 * a.confidence))
                .table(t),
        );
        if actual.len() == forecast_rows.len() {
            let pred: Vec<f64> = forecast_rows.iter().map(|r| r.point).collect();
            let e = forecast_eval::evaluate(&actual, &pred)?;
            rep.push(evaluation_section(&e));
            evaluation = Some(e);
        } else {
            rep.warnings.push("actual values do not cover the forecast range; evaluation skipped".into());
        }
        let x: Vec<f64> = forecast_rows.iter().map(|r| period_x(r.period)).collect();
        let col = |f: fn(&arima::ForecastRow) -> f64| forecast_rows.iter().map(f).collect::<Vec<_>>();
        rep.plots.push(PlotFile::banded("forecast", &x, &col(|r| r.point), &col(|r| r.lower), &col(|r| r.upper)));
    }

    rep.result("fit", &fit);
    rep.result("diagnostics", &battery);
    rep.result("forecast", &forecast_rows);
    rep.result("evaluation", &evaluation);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// varma

#[derive(Args, Debug, Clone)]
pub struct VarmaArgs {
    #[command(flatten)]
    pub common: Common,
    /// Lags of the saved univariate residuals in each equation (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub ma_lags: usize,
    /// Univariate model whose residuals feed the MA terms, as p,d,q;
    /// defaults to (1, 1, ma-lags).
    #[arg(long)]
    pub residual_order: Option<Order>,
}

pub fn varma(a: &VarmaArgs) -> CliResult<Report> {
    let c = &a.common;
    if !(1..=2).contains(&a.ma_lags) {
        return usage("--ma-lags must be 1 or 2");
    }
    let raw = selected(c, 2, usize::MAX)?;
    let o = a.residual_order.unwrap_or(Order(1, 1, a.ma_lags));
    let d: Vec<TimeSeries> = raw.iter().map(|s| s.diff(o.1.max(1))).collect::<tsecon::Result<_>>()?;
    let range = estimation_range(c, &d)?;
    let mut resid = Vec::new();
    for (i, s) in raw.iter().enumerate() {
        let f = arima::fit_arima(s, &ArimaSpec::new(o.0, o.1, o.2), range)?;
        resid.push(f.residuals.with_name(format!("uhat{}", i + 1)));
    }
    let data = d.iter().map(|s| s.slice(range)).collect::<tsecon::Result<Vec<_>>>()?;
    let sys = var::fit_varma_two_step(&data, &resid, a.ma_lags)?;
    let mut rep = Report::new(
        "varma",
        format!("Two-step VARMA(1,{}) system, OLS, observations {}", a.ma_lags, sys.sample),
    );
    rep.push(Section::new("MA regressors").line(format!(
        "uhat1..uhat{} are the residuals of univariate {o} fits over {range}",
        resid.len()
    )));
    for (i, eq) in sys.equations.iter().enumerate() {
        rep.push(regression_section(format!("Equation {}", i + 1), eq));
    }
    let n = sys.vcv.nrows();
    let mut t = Table::new(&[""]);
    t.headers.extend(sys.equations.iter().map(|e| e.dependent.clone()));
    for i in 0..n {
        let mut row = vec![sys.equations[i].dependent.clone()];
        for j in 0..n {
            row.push(if j < i { fixed(sys.correlations[(i, j)], 4) } else { g(sys.vcv[(i, j)]) });
        }
        t.row(row);
    }
    rep.push(
        Section::new("Cross-equation VCV for residuals (correlations below the diagonal)")
            .table(t)
            .note(format!("log determinant = {}", g(sys.log_determinant)))
            .note(format!("Test for diagonal covariance matrix, {}", test_line(&sys.breusch_pagan))),
    );
    rep.result("system", &sys);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// var

#[derive(Args, Debug, Clone)]
pub struct VarArgs {
    #[command(flatten)]
    pub common: Common,
    /// Lag order; defaults to the Schwarz choice when --max-lag is given, else 1.
    #[arg(long)]
    pub lags: Option<usize>,
    #[arg(long)]
    pub no_const: bool,
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    /// Portmanteau lag; defaults to T/4.
    #[arg(long)]
    pub portmanteau_lag: Option<usize>,
    /// Emit IRF and FEVD tables even when the system is not stable.
    #[arg(long)]
    pub force_irf: bool,
}

pub fn var(a: &VarArgs) -> CliResult<Report> {
    let c = &a.common;
    let ml = max_lag(c)?;
    if a.lags == Some(0) {
        return usage("--lags must be at least 1");
    }
    if a.horizon == 0 {
        return usage("--horizon must be at least 1");
    }
    let raw = selected(c, 2, usize::MAX)?;
    let (data, range) = transformed_slices(c, &raw)?;
    let konst = !a.no_const;
    let mut rep = Report::new("var", format!("VAR system over {range}"));

    let selection = match ml {
        Some(m) => Some(var::select_lag_order(&data, m, konst)?),
        None => None,
    };
    if let Some(sel) = &selection {
        let mut t = Table::new(&["lags", "loglik", "p(LR)", "AIC", "BIC", "HQC"]);
        for r in &sel.rows {
            let mark = |best: usize, v: f64| format!("{}{}", fixed(v, 6), if best == r.lag { "*" } else { " " });
            t.row(vec![
                r.lag.to_string(),
                fixed(r.loglik, 5),
                r.lr_p_value.map(pval).unwrap_or_default(),
                mark(sel.best_aic, r.aic),
                mark(sel.best_bic, r.bic),
                mark(sel.best_hqc, r.hqc),
            ]);
        }
        rep.push(
            Section::new(format!("VAR lag selection (maximum lag {})", sel.rows.len()))
                .table(t)
                .note("* marks the minimum of each criterion"),
        );
    }
    let p = a.lags.or(selection.as_ref().map(|s| s.best_bic)).unwrap_or(1);
    let fit = var::fit_var(&data, p, konst)?;
    rep.title = format!("VAR system, lag order {p}, observations {} (T = {})", fit.sample, fit.nobs);

    for (i, eq) in fit.equations.iter().enumerate() {
        rep.push(regression_section(format!("Equation {}: {}", i + 1, eq.dependent), eq));
    }
    let granger = var::granger_f_tests(&fit)?;
    let mut gt = Table::new(&["equation", "restriction", "F", "p-value"]);
    for (eq, row) in granger.iter().enumerate() {
        for t in row {
            gt.row(vec![fit.variable_names[eq].clone(), t.name.clone(), g(t.statistic), pval(t.p_value)]);
        }
    }
    rep.push(Section::new("F-tests of zero restrictions").table(gt));

    let pl = a.portmanteau_lag.unwrap_or((fit.nobs / 4).max(p + 1));
    let port = var::portmanteau(&fit, pl)?;
    let cols: Vec<Vec<f64>> = (0..fit.n()).map(|j| fit.residuals.column(j).iter().copied().collect()).collect();
    let col_refs: Vec<&[f64]> = cols.iter().map(|v| v.as_slice()).collect();
    let dh = diagnostics::doornik_hansen(&col_refs)?;
    let roots = var::stability_roots(&fit);
    let stable = roots.iter().all(|m| *m < 1.0);
    let crit = Criteria {
        aic: fit.aic,
        bic: fit.bic,
        hqc: fit.hqc,
    };
    let s = Section::new("System statistics")
        .line(format!("Determinant of covariance matrix = {}", g(fit.determinant())));
    let s = criteria_lines(s, fit.loglik, &crit)
        .note(test_line(&port))
        .note(format!("Multivariate normality ({})", test_line(&dh)))
        .note(format!(
            "Companion eigenvalue moduli: {}",
            roots.iter().map(|m| fixed(*m, 6)).collect::<Vec<_>>().join(", ")
        ));
    rep.push(s);

    let ordering: Vec<usize> = (0..fit.n()).collect();
    let mut irf = Vec::new();
    let mut decomposition = Vec::new();
    if !stable {
        rep.warnings.push(format!(
            "the VAR is not stable (largest root modulus {}); {}",
            fixed(roots.iter().cloned().fold(0.0, f64::max), 6),
            if a.force_irf {
                "impulse responses emitted because --force-irf was given"
            } else {
                "impulse responses suppressed; pass --force-irf to emit them"
            }
        ));
    }
    if stable || a.force_irf {
        irf = var::impulse_response(&fit, a.horizon, &ordering)?;
        for shock in &fit.variable_names {
            let tables: Vec<&var::IrfTable> = irf.iter().filter(|t| &t.shock == shock).collect();
            let mut t = Table::new(&["period"]);
            t.headers.extend(tables.iter().map(|t| t.response.clone()));
            for h in 0..a.horizon {
                let mut row = vec![(h + 1).to_string()];
                row.extend(tables.iter().map(|t| g(t.values[h])));
                t.row(row);
            }
            rep.push(Section::new(format!("Responses to a one-standard-error shock in {shock}")).table(t));
        }
        let periods: Vec<f64> = (1..=a.horizon).map(|h| h as f64).collect();
        for t in &irf {
            rep.plots.push(PlotFile::xy(&format!("irf_{}_{}", t.shock, t.response), &periods, &t.values));
        }
        decomposition = var::fevd(&fit, a.horizon, &ordering)?;
        for d in &decomposition {
            let mut t = Table::new(&["period", "std. error"]);
            t.headers.extend(d.shocks.iter().cloned());
            for r in &d.rows {
                let mut row = vec![r.period.to_string(), g(r.std_error)];
                row.extend(r.shares.iter().map(|v| fixed(*v, 4)));
                t.row(row);
            }
            rep.push(Section::new(format!("Decomposition of variance for {}", d.variable)).table(t));
        }
    }

    let mut forecasts = Vec::new();
    let mut evaluations = Vec::new();
    if let Some(fr) = c.forecast {
        let horizon = fr.to.since(&fit.sample.to) as usize;
        forecasts = var::forecast_var(&fit, horizon, a.confidence)?;
        for (i, f) in forecasts.iter_mut().enumerate() {
            f.rows.retain(|r| r.period >= fr.from);
            let full = transform(&raw[i], c.transform)?;
            let mut t = Table::new(&["period", "actual", "prediction", "std. error", "lower", "upper"]);
            let mut actual = Vec::new();
            for r in &f.rows {
                let act = full.get(r.period);
                actual.extend(act);
                t.row(vec![
                    r.period.to_string(),
                    act.map(g).unwrap_or_else(|| "N/A".into()),
                    g(r.point),
                    g(r.std_error),
                    g(r.lower),
                    g(r.upper),
                ]);
            }
            rep.push(
                Section::new(format!("Forecasts for {} over {fr}", f.variable))
                    .line(format!("{}% interval, t({}) critical value {}", 100.0 * a.confidence, fit.df_resid(), fixed(f.t_critical, 3)))
                    .table(t),
            );
            if actual.len() == f.rows.len() {
                let pred: Vec<f64> = f.rows.iter().map(|r| r.point).collect();
                let e = forecast_eval::evaluate(&actual, &pred)?;
                rep.push(evaluation_section(&e).note(format!("variable: {}", f.variable)));
                evaluations.push(json!({ "variable": f.variable, "evaluation": e }));
            }
            let x: Vec<f64> = f.rows.iter().map(|r| period_x(r.period)).collect();
            let col = |g: fn(&var::VarForecastRow) -> f64| f.rows.iter().map(g).collect::<Vec<_>>();
            rep.plots.push(PlotFile::banded(
                &format!("forecast_{}", f.variable),
                &x,
                &col(|r| r.point),
                &col(|r| r.lower),
                &col(|r| r.upper),
            ));
        }
    }

    rep.result("lag_selection", &selection);
    rep.result("fit", &fit);
    rep.result("granger", &granger);
    rep.result("portmanteau", &port);
    rep.result("normality", &dh);
    rep.result("stability_roots", &roots);
    rep.result("stable", &stable);
    rep.result("irf", &irf);
    rep.result("fevd", &decomposition);
    rep.result("forecast", &forecasts);
    rep.result("evaluation", &evaluations);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// adf / coint

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DeterministicArg {
    /// No constant.
    Nc,
    /// Constant.
    C,
    /// Constant and trend.
    Ct,
}

#[derive(Args, Debug, Clone)]
pub struct AdfArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "c")]
    pub deterministic: DeterministicArg,
    /// Use exactly --max-lag lagged differences instead of selecting by modified AIC.
    #[arg(long)]
    pub fixed_lag: bool,
}

fn adf_section(title: String, r: &AdfResult) -> Section {
    let det = match r.deterministic {
        Deterministic::None => "test without constant",
        Deterministic::Constant => "test with constant",
        Deterministic::ConstantTrend => "with constant and trend",
    };
    let mut s = Section::new(title)
        .line(format!("lag order {} (maximum {}), sample size {}", r.lags_used, r.max_lag, r.nobs))
        .line("unit-root null hypothesis: a = 1")
        .line(det)
        .line(format!("estimated value of (a - 1): {}", g(r.coefficient_minus_one)))
        .line(format!("test statistic: tau = {}", g(r.tau_statistic)))
        .line(format!("asymptotic p-value {}", g(r.p_value)))
        .line(format!("1st-order autocorrelation coeff. for e: {}", fixed(r.first_order_resid_autocorr, 3)));
    if let Some(f) = &r.lagged_diff_f {
        s = s.line(test_line(f));
    }
    s
}

pub fn adf(a: &AdfArgs) -> CliResult<Report> {
    let c = &a.common;
    let ml = max_lag(c)?;
    let raw = selected(c, 1, usize::MAX)?;
    let (data, range) = transformed_slices(c, &raw)?;
    let det = match a.deterministic {
        DeterministicArg::Nc => Deterministic::None,
        DeterministicArg::C => Deterministic::Constant,
        DeterministicArg::Ct => Deterministic::ConstantTrend,
    };
    let sel = if a.fixed_lag {
        unitroot::LagSelection::Fixed
    } else {
        unitroot::LagSelection::ModifiedAic
    };
    let mut rep = Report::new("adf", format!("Augmented Dickey-Fuller tests over {range}"));
    let mut results = Vec::new();
    for s in &data {
        let m = ml.unwrap_or_else(|| default_adf_lag(s.len()));
        let r = unitroot::adf_test(s, m, det, sel)?;
        rep.push(adf_section(format!("Augmented Dickey-Fuller test for {}", s.name()), &r));
        results.push(r);
    }
    rep.result("tests", &results);
    Ok(rep)
}

#[derive(Args, Debug, Clone)]
pub struct CointArgs {
    #[command(flatten)]
    pub common: Common,
    /// Significance level for the conclusion.
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
}

pub fn coint(a: &CointArgs) -> CliResult<Report> {
    let c = &a.common;
    let ml = max_lag(c)?;
    let raw = selected(c, 2, 2)?;
    let (data, range) = transformed_slices(c, &raw)?;
    let m = ml.unwrap_or_else(|| default_adf_lag(data[0].len()));
    let r = unitroot::engle_granger(&data[0], &data[1], m, a.level)?;
    let mut rep = Report::new("coint", format!("Engle-Granger cointegration test over {range}"));
    rep.push(adf_section(format!("Step 1: testing for a unit root in {}", data[0].name()), &r.step1));
    rep.push(adf_section(format!("Step 2: testing for a unit root in {}", data[1].name()), &r.step2));
    rep.push(regression_section("Step 3: cointegrating regression".into(), &r.step3));
    rep.push(adf_section("Step 4: testing for a unit root in uhat".into(), &r.step4));
    let verdict = match r.conclusion {
        unitroot::Conclusion::Cointegrated => "cointegrated",
        unitroot::Conclusion::NotCointegrated => "not cointegrated",
    };
    rep.push(
        Section::new("Conclusion")
            .line(format!("At the {}% level the series are {verdict}.", 100.0 * a.level))
            .note("Evidence for cointegration requires unit roots in both series (steps 1-2) and none in the residuals (step 4)."),
    );
    rep.result("report", &r);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// garch

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse::<Variant>().map_err(|e| e.to_string())
}

fn parse_innovation(s: &str) -> Result<Innovation, String> {
    s.parse::<Innovation>().map_err(|e| e.to_string())
}

fn parse_fix(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("'{s}' is not name=value"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("'{v}' is not a number"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Args, Debug, Clone)]
pub struct GarchArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "GARCH", value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long = "dist", default_value = "normal", value_parser = parse_innovation)]
    pub distribution: Innovation,
    #[arg(long, default_value_t = 1)]
    pub arch: usize,
    /// GARCH order; defaults to 0 for ARCH and 1 otherwise.
    #[arg(long)]
    pub garch: Option<usize>,
    /// Conditional variance enters the mean equation.
    #[arg(long)]
    pub in_mean: bool,
    /// In-mean model with the script conventions: residuals from the initial
    /// variance, Gaussian kernel likelihood, OPG standard errors.
    #[arg(long, conflicts_with = "in_mean")]
    pub script_in_mean: bool,
    /// Hold a parameter at a value, e.g. gamma_1=0 (repeatable).
    #[arg(long = "fix", value_parser = parse_fix)]
    pub fixed: Vec<(String, f64)>,
    /// Fit every variant under every distribution and tabulate the criteria.
    #[arg(long)]
    pub compare: bool,
    /// Simulate from --params with --seed instead of reading data.
    #[arg(long)]
    pub simulate: bool,
    #[arg(long, default_value_t = 500)]
    pub nobs: usize,
    #[arg(long, default_value_t = 200)]
    pub burn: usize,
    /// Simulation parameters in estimation order, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Vec<f64>,
}

fn default_sim_value(name: &str) -> f64 {
    match name {
        "const" => 0.5,
        "theta" => 0.05,
        "omega" => 0.1,
        "delta" => 1.5,
        "nu" => 8.0,
        "ged_shape" => 1.5,
        "skew" => 1.2,
        n if n.starts_with("alpha") => 0.1,
        n if n.starts_with("gamma") => 0.1,
        n if n.starts_with("beta") => 0.8,
        _ => 0.1,
    }
}

fn garch_spec(a: &GarchArgs) -> GarchSpec {
    let garch = a.garch.unwrap_or(usize::from(a.variant != Variant::Arch));
    let mut s = GarchSpec::new(a.variant, a.distribution).orders(a.arch, garch);
    if a.in_mean {
        s = s.in_mean();
    }
    if a.script_in_mean {
        s = s.script_in_mean();
    }
    for (k, v) in &a.fixed {
        s = s.fix(k, *v);
    }
    s
}

pub fn garch(a: &GarchArgs) -> CliResult<Report> {
    let c = &a.common;
    let spec = garch_spec(a);
    spec.validate()?;
    let mut rep = Report::new("garch", String::new());
    let y = if a.simulate {
        let names = spec.param_names();
        let params: Vec<f64> = if a.params.is_empty() {
            names.iter().map(|n| default_sim_value(n)).collect()
        } else if a.params.len() == names.len() {
            a.params.clone()
        } else {
            return usage(format!("--params needs {} values: {}", names.len(), names.join(", ")));
        };
        let v = sim::simulate_garch(&spec, &params, a.nobs, a.burn, c.seed)?;
        let mut t = Table::new(&["parameter", "true value"]);
        for (n, v) in names.iter().zip(&params) {
            t.row(vec![n.clone(), g(*v)]);
        }
        rep.push(
            Section::new(format!("Simulated {} data, T = {}, burn-in {}, seed {}", spec.label(), a.nobs, a.burn, c.seed))
                .table(t),
        );
        rep.result("simulation", &json!({ "params": params, "names": names, "seed": c.seed, "nobs": a.nobs }));
        TimeSeries::new("y", Period::new(2000, 1)?, v)?
    } else {
        let raw = selected(c, 1, 1)?;
        let (s, _) = transformed_slices(c, &raw)?;
        s.into_iter().next().expect("one series")
    };

    if a.compare {
        let mut specs = Vec::new();
        for v in Variant::ALL {
            for d in Innovation::ALL {
                specs.push(GarchSpec::new(v, d));
            }
        }
        let rows = volatility::compare_models(&y, &specs)?;
        rep.title = format!("Volatility model comparison for {} over {} (T = {})", y.name(), y.range(), y.len());
        let mut t = Table::new(&["model", "distribution", "loglik", "AIC", "BIC", "HQC", "all sig.", "converged"]);
        let mark = |v: f64, best: bool| format!("{}{}", fixed(v, 4), if best { "*" } else { " " });
        for r in &rows {
            let (ll, aic, bic, hqc) = match (r.loglik, r.criteria) {
                (Some(ll), Some(cr)) => (fixed(ll, 4), mark(cr.aic, r.best_aic), mark(cr.bic, r.best_bic), mark(cr.hqc, r.best_hqc)),
                _ => ("N/A".into(), "N/A".into(), "N/A".into(), "N/A".into()),
            };
            t.row(vec![
                r.model.clone(),
                r.distribution.to_string(),
                ll,
                aic,
                bic,
                hqc,
                if r.all_significant { "yes" } else { "no" }.into(),
                if r.converged { "yes" } else { "no" }.into(),
            ]);
            if let Some(e) = &r.error {
                rep.warnings.push(format!("{} {}: {e}", r.model, r.distribution));
            }
        }
        rep.push(
            Section::new("Goodness-of-fit comparison")
                .table(t)
                .note("* marks the minimum of each criterion; N/A marks fits that failed"),
        );
        rep.result("comparison", &rows);
        return Ok(rep);
    }

    let fit = volatility::fit_garch_series(&y, &spec)?;
    rep.title = format!("Model: {}, {} innovations, observations {} (T = {})", spec.label(), spec.distribution, fit.sample, fit.nobs);
    garch_sections(&mut rep, &fit);
    rep.result("fit", &fit);
    Ok(rep)
}

fn garch_sections(rep: &mut Report, fit: &GarchFit) {
    if !fit.converged {
        rep.warnings.push("the optimizer did not meet its convergence criteria".into());
    }
    let s = Section::new("Estimates")
        .line(format!("Dependent variable: {}", fit.dependent))
        .table(coefficient_table(&fit.coefficients, "z"))
        .note(format!("Mean dependent var   {}   S.D. dependent var   {}", g(fit.mean_dependent), g(fit.sd_dependent)));
    let mut s = criteria_lines(s, fit.loglik, &fit.criteria);
    if let Some(p) = fit.persistence {
        s = s.note(format!("Persistence         {}", fixed(p, 6)));
    }
    match fit.unconditional_variance {
        Some(v) => s = s.note(format!("Unconditional error variance = {}", g(v))),
        None if fit.persistence.is_some() => s = s.note("Unconditional error variance does not exist"),
        None => {}
    }
    s = s.note(format!(
        "Iterations {}, gradient norm {}, converged: {}",
        fit.iterations,
        g(fit.gradient_norm),
        if fit.converged { "yes" } else { "no" }
    ));
    rep.push(s);
    if let Some(alt) = &fit.alternative {
        rep.push(
            Section::new("Alternative parametrization: h = omega + alpha(|e| - gamma e)^2 + beta h")
                .table(coefficient_table(alt, "z")),
        );
    }
    let x = series_x(&fit.residuals);
    let sd: Vec<f64> = fit.conditional_variances.values().iter().map(|h| h.sqrt()).collect();
    let lo: Vec<f64> = sd.iter().map(|v| -v).collect();
    rep.plots.push(PlotFile::banded("cond_sd", &x, fit.residuals.values(), &lo, &sd));
    rep.plots.push(PlotFile::xy("residuals", &x, fit.residuals.values()));
}

// ---------------------------------------------------------------------------
// kalman

#[derive(Args, Debug, Clone)]
pub struct KalmanArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    /// Starting value for sigma; the AR and MA coefficients start at zero.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_start: f64,
}

pub fn kalman(a: &KalmanArgs) -> CliResult<Report> {
    let c = &a.common;
    if a.p + a.q == 0 {
        return usage("kalman needs p + q >= 1");
    }
    if !(a.sigma_start > 0.0) {
        return usage("--sigma-start must be positive");
    }
    let raw = selected(c, 1, 1)?;
    let (s, range) = transformed_slices(c, &raw)?;
    let y = &s[0];
    let mut start = vec![0.0; a.p + a.q];
    start.push(a.sigma_start);
    let fit = kalman::fit_state_space_arma(y.values(), a.p, a.q, &start)?;
    let mut rep = Report::new(
        "kalman",
        format!("ARMA({},{}) by state-space ML for {}, observations {range} (T = {})", a.p, a.q, y.name(), y.len()),
    );
    if !fit.optim.converged {
        rep.warnings.push("the optimizer did not meet its convergence criteria".into());
    }
    let mut names: Vec<String> = (1..=a.p).map(|i| format!("phi_{i}")).collect();
    names.extend((1..=a.q).map(|j| format!("theta_{j}")));
    names.push("sigma".into());
    let values: Vec<f64> = fit.phi.iter().chain(&fit.theta).copied().chain([fit.sigma]).collect();
    let coefs: Vec<Coefficient> = names
        .iter()
        .zip(values.iter().zip(&fit.std_errors))
        .map(|(n, (v, se))| Coefficient::normal(n.clone(), *v, *se))
        .collect();
    let crit = Criteria::new(fit.loglik, coefs.len(), y.len());
    let sec = Section::new("Estimates")
        .line("Standard errors based on the Hessian")
        .table(coefficient_table(&coefs, "z"));
    let sec = criteria_lines(sec, fit.loglik, &crit).note(format!(
        "Iterations {}, gradient norm {}, converged: {}",
        fit.optim.iterations,
        g(fit.optim.gradient_norm),
        if fit.optim.converged { "yes" } else { "no" }
    ));
    rep.push(sec);
    rep.result("fit", &fit);
    rep.result("criteria", &crit);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// evaluate

pub fn evaluate(c: &Common) -> CliResult<Report> {
    let raw = selected(c, 2, 2)?;
    let (s, range) = transformed_slices(c, &raw)?;
    let e = forecast_eval::evaluate_forecast(&s[0], &s[1])?;
    let mut rep = Report::new(
        "evaluate",
        format!("Accuracy of {} as a forecast of {} over {range}", s[1].name(), s[0].name()),
    );
    rep.push(evaluation_section(&e).note("errors are actual minus forecast"));
    rep.result("evaluation", &e);
    Ok(rep)
}
