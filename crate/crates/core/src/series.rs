//! Quarterly time series, period arithmetic and CSV ingestion.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A calendar quarter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Period {
    year: i32,
    quarter: u8,
}

impl Period {
    pub fn new(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return domain(format!("quarter {quarter} outside 1..4"));
        }
        Ok(Period { year, quarter })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn quarter(&self) -> u8 {
        self.quarter
    }

    fn ordinal(&self) -> i64 {
        self.year as i64 * 4 + (self.quarter as i64 - 1)
    }

    fn from_ordinal(n: i64) -> Self {
        Period {
            year: n.div_euclid(4) as i32,
            quarter: (n.rem_euclid(4) + 1) as u8,
        }
    }

    pub fn succ(&self) -> Self {
        self.add(1)
    }

    pub fn pred(&self) -> Self {
        self.add(-1)
    }

    pub fn add(&self, k: i64) -> Self {
        Self::from_ordinal(self.ordinal() + k)
    }

    /// Number of quarters from `other` to `self`.
    pub fn since(&self, other: &Period) -> i64 {
        self.ordinal() - other.ordinal()
    }
}

impl Ord for Period {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ordinal().cmp(&other.ordinal())
    }
}

impl PartialOrd for Period {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for Period {
    type Err = Error;

    /// Accepts `1980Q1`, `1980:1` and `1980-01` (month mapped to its quarter).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Domain(format!("unparseable period '{s}'"));
        let (y, rest, monthly) = if let Some((y, q)) = s.split_once(['Q', 'q']) {
            (y, q, false)
        } else if let Some((y, q)) = s.split_once(':') {
            (y, q, false)
        } else if let Some((y, m)) = s.split_once('-') {
            (y, m, true)
        } else {
            return Err(bad());
        };
        let year: i32 = y.parse().map_err(|_| bad())?;
        let n: u8 = rest.parse().map_err(|_| bad())?;
        let quarter = if monthly {
            if !(1..=12).contains(&n) {
                return Err(bad());
            }
            (n - 1) / 3 + 1
        } else {
            n
        };
        Period::new(year, quarter).map_err(|_| bad())
    }
}

/// Inclusive range of periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRange {
    pub from: Period,
    pub to: Period,
}

impl SampleRange {
    pub fn new(from: Period, to: Period) -> Result<Self> {
        if from > to {
            return domain(format!("empty range {from}..{to}"));
        }
        Ok(SampleRange { from, to })
    }

    pub fn len(&self) -> usize {
        (self.to.since(&self.from) + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl FromStr for SampleRange {
    type Err = Error;

    /// `1980Q1:2006Q1`, `1980Q1..2006Q1` or `1980:1-2006:1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts: Option<(&str, &str)> = if let Some(p) = s.split_once("..") {
            Some(p)
        } else if s.matches(':').count() == 1 {
            s.split_once(':')
        } else if s.matches(':').count() == 2 {
            s.split_once('-')
        } else {
            None
        };
        let (a, b) = parts.ok_or_else(|| Error::Domain(format!("unparseable range '{s}'")))?;
        SampleRange::new(a.parse()?, b.parse()?)
    }
}

impl fmt::Display for SampleRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.from, self.to)
    }
}

/// Quarterly real-valued series with no missing interior values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    name: String,
    start: Period,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, start: Period, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return domain("a series needs at least one value");
        }
        Ok(TimeSeries {
            name: name.into(),
            start,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn start(&self) -> Period {
        self.start
    }

    pub fn end(&self) -> Period {
        self.start.add(self.values.len() as i64 - 1)
    }

    pub fn range(&self) -> SampleRange {
        SampleRange {
            from: self.start,
            to: self.end(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn period_at(&self, t: usize) -> Period {
        self.start.add(t as i64)
    }

    pub fn index_of(&self, p: Period) -> Option<usize> {
        let k = p.since(&self.start);
        (k >= 0 && (k as usize) < self.values.len()).then_some(k as usize)
    }

    pub fn get(&self, p: Period) -> Option<f64> {
        self.index_of(p).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Period, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.period_at(i), v))
    }

    /// `d`-th difference; the result starts `d` periods later.
    pub fn diff(&self, d: usize) -> Result<TimeSeries> {
        if d == 0 {
            return domain("difference order must be at least 1");
        }
        if d >= self.values.len() {
            return domain(format!(
                "difference order {d} needs more than {} observations",
                self.values.len()
            ));
        }
        let mut v = self.values.clone();
        for _ in 0..d {
            v = v.windows(2).map(|w| w[1] - w[0]).collect();
        }
        let name = if d == 1 {
            format!("d_{}", self.name)
        } else {
            format!("d{d}_{}", self.name)
        };
        TimeSeries::new(name, self.start.add(d as i64), v)
    }

    /// `scale * (ln y_t - ln y_{t-1})`.
    pub fn ldiff_scaled(&self, scale: f64) -> Result<TimeSeries> {
        if let Some((p, v)) = self.iter().find(|&(_, v)| v <= 0.0 || v.is_nan()) {
            return domain(format!("non-positive value {v} at {p}"));
        }
        if self.values.len() < 2 {
            return domain("log difference needs at least two observations");
        }
        let v = self
            .values
            .windows(2)
            .map(|w| scale * (w[1].ln() - w[0].ln()))
            .collect();
        TimeSeries::new(format!("ld_{}", self.name), self.start.succ(), v)
    }

    pub fn slice(&self, range: SampleRange) -> Result<TimeSeries> {
        let (Some(a), Some(b)) = (self.index_of(range.from), self.index_of(range.to)) else {
            return domain(format!(
                "range {range} outside {} ({})",
                self.name,
                self.range()
            ));
        };
        TimeSeries::new(self.name.clone(), range.from, self.values[a..=b].to_vec())
    }

    /// Restricts to the overlap with `range`, tolerating ranges that extend past the series.
    pub fn clip(&self, range: SampleRange) -> Result<TimeSeries> {
        let from = range.from.max(self.start);
        let to = range.to.min(self.end());
        self.slice(SampleRange::new(from, to)?)
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Reads one value column keyed by a date column. Lines starting with `#` are comments.
pub fn load_csv(path: impl AsRef<Path>, date_column: &str, value_column: &str) -> Result<TimeSeries> {
    let all = load_csv_columns(path, date_column)?;
    all.into_iter()
        .find(|s| s.name() == value_column)
        .ok_or_else(|| Error::Ingest {
            row: 0,
            msg: format!("no column named '{value_column}'"),
        })
}

/// Reads every non-date column of a CSV into aligned series.
pub fn load_csv_columns(path: impl AsRef<Path>, date_column: &str) -> Result<Vec<TimeSeries>> {
    let file = std::fs::File::open(path.as_ref())?;
    read_csv(file, date_column)
}

pub fn read_csv<R: std::io::Read>(reader: R, date_column: &str) -> Result<Vec<TimeSeries>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Ingest {
            row: 0,
            msg: e.to_string(),
        })?
        .clone();
    let date_idx = headers
        .iter()
        .position(|h| h == date_column)
        .ok_or_else(|| Error::Ingest {
            row: 0,
            msg: format!("no date column named '{date_column}'"),
        })?;
    let names: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != date_idx)
        .map(|(i, h)| (i, h.to_string()))
        .collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    let mut start: Option<Period> = None;
    let mut prev: Option<Period> = None;
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| Error::Ingest {
            row,
            msg: e.to_string(),
        })?;
        let raw = rec.get(date_idx).unwrap_or("");
        let p: Period = raw.parse().map_err(|_| Error::Ingest {
            row,
            msg: format!("unparseable date '{raw}'"),
        })?;
        if let Some(q) = prev {
            if p == q {
                return Err(Error::Ingest {
                    row,
                    msg: format!("duplicate period {p}"),
                });
            }
            if p != q.succ() {
                return Err(Error::Ingest {
                    row,
                    msg: format!("non-consecutive period {p}: missing {}", q.succ()),
                });
            }
        } else {
            start = Some(p);
        }
        prev = Some(p);
        for (j, (i, name)) in names.iter().enumerate() {
            let cell = rec.get(*i).unwrap_or("");
            let v: f64 = cell.parse().map_err(|_| Error::Ingest {
                row,
                msg: format!("unparseable number '{cell}' in column '{name}'"),
            })?;
            cols[j].push(v);
        }
    }
    let start = start.ok_or_else(|| Error::Ingest {
        row: 0,
        msg: "no data rows".into(),
    })?;
    names
        .into_iter()
        .zip(cols)
        .map(|((_, name), v)| TimeSeries::new(name, start, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Period {
        s.parse().unwrap()
    }

    #[test]
    fn period_grammar() {
        assert_eq!(p("1980Q1"), p("1980:1"));
        assert_eq!(p("1980-05"), p("1980Q2"));
        assert_eq!(p("1980-12").to_string(), "1980Q4");
        assert!("1980Q5".parse::<Period>().is_err());
        assert!("1980-13".parse::<Period>().is_err());
        assert_eq!(p("1980Q4").succ(), p("1981Q1"));
        assert_eq!(p("1981Q1").pred(), p("1980Q4"));
    }

    #[test]
    fn range_grammar() {
        let r: SampleRange = "1980Q1:2006Q1".parse().unwrap();
        assert_eq!(r.len(), 105);
        let r2: SampleRange = "1980:1-2006:1".parse().unwrap();
        assert_eq!(r, r2);
        let r3: SampleRange = "1980Q1..2006Q1".parse().unwrap();
        assert_eq!(r, r3);
        assert!("2006Q1:1980Q1".parse::<SampleRange>().is_err());
    }

    #[test]
    fn csv_rows() {
        let s = read_csv("date,x\n2000Q1,1.0\n".as_bytes(), "date").unwrap();
        assert_eq!(s[0].len(), 1);
        let err = read_csv("date,x\n1980Q1,1\n1980Q3,2\n".as_bytes(), "date").unwrap_err();
        assert!(err.to_string().contains("1980Q2"), "{err}");
        let err = read_csv("date,x\n1980Q1,1\n1980Q1,2\n".as_bytes(), "date").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        let err = read_csv("date,x\n1980Q1,abc\n".as_bytes(), "date").unwrap_err();
        assert!(matches!(err, Error::Ingest { row: 1, .. }));
    }

    #[test]
    fn differences() {
        let s = TimeSeries::new("x", p("2000Q1"), vec![1.0, 3.0, 6.0, 10.0]).unwrap();
        let d2 = s.diff(2).unwrap();
        assert_eq!(d2.values(), &[1.0, 1.0]);
        assert_eq!(d2.start(), p("2000Q3"));
        assert!(s.diff(4).is_err());
        let e = TimeSeries::new("e", p("2000Q1"), vec![1.0, std::f64::consts::E]).unwrap();
        assert!((e.ldiff_scaled(1.0).unwrap().values()[0] - 1.0).abs() < 1e-15);
        let z = TimeSeries::new("z", p("2000Q1"), vec![1.0, 0.0]).unwrap();
        assert!(z.ldiff_scaled(100.0).unwrap_err().to_string().contains("2000Q2"));
    }
}
