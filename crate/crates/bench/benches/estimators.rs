use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, Criterion};
use tsecon::arima::{fit_arima, ArimaSpec};
use tsecon::diagnostics::acf;
use tsecon::kalman::fit_state_space_arma;
use tsecon::unitroot::{adf_test, Deterministic, LagSelection};
use tsecon::var::{fit_var, impulse_response, select_lag_order};
use tsecon::volatility::{fit_garch_series, simulate_garch, GarchSpec, Innovation, Variant};
use tsecon::{load_csv, Period, SampleRange, TimeSeries};

fn fixture(file: &str, col: &str) -> TimeSeries {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(file);
    load_csv(p, "date", col).unwrap()
}

fn sample() -> SampleRange {
    "1980Q1:2006Q1".parse().unwrap()
}

fn bench_arima(c: &mut Criterion) {
    let gdp = fixture("gdpc1q.csv", "GDPC1Q");
    let r = sample();
    c.bench_function("arima_111_exact_ml", |b| {
        b.iter(|| fit_arima(black_box(&gdp), &ArimaSpec::new(1, 1, 1), r).unwrap())
    });
    let d = gdp.diff(1).unwrap().slice(r).unwrap();
    c.bench_function("state_space_arma_11", |b| {
        b.iter(|| fit_state_space_arma(black_box(d.values()), 1, 1, &[0.0, 0.0, 1.0]).unwrap())
    });
    c.bench_function("correlogram_20", |b| b.iter(|| acf(black_box(gdp.values()), 20).unwrap()));
}

fn bench_var(c: &mut Criterion) {
    let r = sample();
    let data = [
        fixture("gdpc1q.csv", "GDPC1Q").diff(1).unwrap().slice(r).unwrap(),
        fixture("gcec1q.csv", "GCEC1Q").diff(1).unwrap().slice(r).unwrap(),
    ];
    c.bench_function("var_lag_selection_8", |b| b.iter(|| select_lag_order(black_box(&data), 8, true).unwrap()));
    let fit = fit_var(&data, 1, true).unwrap();
    c.bench_function("var_irf_20", |b| b.iter(|| impulse_response(black_box(&fit), 20, &[0, 1]).unwrap()));
    c.bench_function("adf_maic_12", |b| {
        b.iter(|| adf_test(black_box(&data[0]), 12, Deterministic::Constant, LagSelection::ModifiedAic).unwrap())
    });
}

fn bench_garch(c: &mut Criterion) {
    let spec = GarchSpec::new(Variant::Garch, Innovation::Normal);
    let y = simulate_garch(&spec, &[0.1, 0.1, 0.1, 0.8], 1000, 200, 1).unwrap();
    let s = TimeSeries::new("y", Period::new(1900, 1).unwrap(), y).unwrap();
    let mut g = c.benchmark_group("garch");
    g.sample_size(20);
    g.bench_function("garch11_normal_t1000", |b| b.iter(|| fit_garch_series(black_box(&s), &spec).unwrap()));
    let egarch = GarchSpec::new(Variant::Egarch, Innovation::StudentT);
    g.bench_function("egarch11_t_t1000", |b| b.iter(|| fit_garch_series(black_box(&s), &egarch)));
    g.finish();
}

criterion_group!(benches, bench_arima, bench_var, bench_garch);
criterion_main!(benches);
