#![allow(dead_code)]

use std::path::PathBuf;

use tsecon::{load_csv, SampleRange, TimeSeries};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn gdp() -> TimeSeries {
    load_csv(data_dir().join("gdpc1q.csv"), "date", "GDPC1Q").unwrap()
}

pub fn gce() -> TimeSeries {
    load_csv(data_dir().join("gcec1q.csv"), "date", "GCEC1Q").unwrap()
}

pub fn range(s: &str) -> SampleRange {
    s.parse().unwrap()
}

pub fn sample() -> SampleRange {
    range("1980Q1:2006Q1")
}

/// First differences over 1980Q1–2006Q1 (105 observations).
pub fn d_gdp() -> TimeSeries {
    gdp().diff(1).unwrap().slice(sample()).unwrap()
}

pub fn d_gce() -> TimeSeries {
    gce().diff(1).unwrap().slice(sample()).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
