//! Report assembly and emission: text, JSON and CSV renderings of the same
//! sections, plus whitespace-separated plot-data files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn render(&self, out: &mut String) {
        let ncol = self.headers.len();
        let mut w = vec![0usize; ncol];
        for (i, h) in self.headers.iter().enumerate() {
            w[i] = h.chars().count();
        }
        for r in &self.rows {
            for (i, c) in r.iter().enumerate().take(ncol) {
                w[i] = w[i].max(c.chars().count());
            }
        }
        let line = |cells: &[String], out: &mut String| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate().take(ncol) {
                let pad = w[i] - c.chars().count();
                if i == 0 {
                    s.push_str("  ");
                    s.push_str(c);
                    s.push_str(&" ".repeat(pad));
                } else {
                    s.push_str("  ");
                    s.push_str(&" ".repeat(pad));
                    s.push_str(c);
                }
            }
            out.push_str(s.trim_end());
            out.push('\n');
        };
        line(&self.headers, out);
        for r in &self.rows {
            line(r, out);
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Section {
    pub title: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lines: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn line(mut self, l: impl Into<String>) -> Self {
        self.lines.push(l.into());
        self
    }

    pub fn table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }

    pub fn note(mut self, l: impl Into<String>) -> Self {
        self.notes.push(l.into());
        self
    }
}

/// A plot-data file: either (x, y) or banded (x, y, lo, hi) columns.
#[derive(Debug, Clone)]
pub struct PlotFile {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl PlotFile {
    pub fn xy(name: &str, x: &[f64], y: &[f64]) -> Self {
        PlotFile {
            name: name.to_string(),
            columns: vec!["x", "y"],
            rows: x.iter().zip(y).map(|(a, b)| vec![*a, *b]).collect(),
        }
    }

    pub fn banded(name: &str, x: &[f64], y: &[f64], lo: &[f64], hi: &[f64]) -> Self {
        PlotFile {
            name: name.to_string(),
            columns: vec!["x", "y", "lo", "hi"],
            rows: (0..x.len()).map(|i| vec![x[i], y[i], lo[i], hi[i]]).collect(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("# {}\n", self.columns.join(" "));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:.6}")).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }
}

pub struct Report {
    pub command: String,
    pub title: String,
    pub sections: Vec<Section>,
    pub result: Value,
    pub plots: Vec<PlotFile>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, title: impl Into<String>) -> Self {
        Report {
            command: command.to_string(),
            title: title.into(),
            sections: Vec::new(),
            result: Value::Null,
            plots: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn push(&mut self, s: Section) {
        self.sections.push(s);
    }

    pub fn result<T: Serialize>(&mut self, key: &str, v: &T) {
        if !self.result.is_object() {
            self.result = json!({});
        }
        self.result[key] = serde_json::to_value(v).unwrap_or(Value::Null);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => {
                let v = json!({
                    "command": self.command,
                    "title": self.title,
                    "warnings": self.warnings,
                    "sections": self.sections,
                    "result": self.result,
                });
                let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let _ = writeln!(out, "{}", "=".repeat(self.title.chars().count()));
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for s in &self.sections {
            out.push('\n');
            let _ = writeln!(out, "{}", s.title);
            for l in &s.lines {
                let _ = writeln!(out, "  {l}");
            }
            if let Some(t) = &s.table {
                if !s.lines.is_empty() {
                    out.push('\n');
                }
                t.render(&mut out);
            }
            if !s.notes.is_empty() {
                out.push('\n');
                for l in &s.notes {
                    let _ = writeln!(out, "  {l}");
                }
            }
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let mut first = true;
        for s in &self.sections {
            let Some(t) = &s.table else { continue };
            if !first {
                let _ = w.write_record([""; 0]);
            }
            first = false;
            let _ = w.write_record([format!("# {}", s.title)]);
            let _ = w.write_record(&t.headers);
            for r in &t.rows {
                let _ = w.write_record(r);
            }
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }

    /// Writes the rendered report and every plot file into `dir`.
    pub fn write_to(&self, dir: &Path, format: Format) -> std::io::Result<Vec<String>> {
        fs::create_dir_all(dir)?;
        let ext = match format {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
        };
        let mut written = Vec::new();
        let name = format!("{}.{ext}", self.command);
        fs::write(dir.join(&name), self.render(format))?;
        written.push(name);
        for p in &self.plots {
            let name = format!("{}.dat", p.name);
            fs::write(dir.join(&name), p.render())?;
            written.push(name);
        }
        Ok(written)
    }
}

// ---------------------------------------------------------------------------
// Number formatting

/// Six significant digits, switching to exponent notation for very large or
/// very small magnitudes.
pub fn g(x: f64) -> String {
    sig(x, 6)
}

pub fn sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=8).contains(&mag) {
        return format!("{:.*e}", digits.saturating_sub(1), x);
    }
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.to_string()
        }
    } else {
        s
    }
}

pub fn fixed(x: f64, decimals: usize) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        format!("{x:.decimals$}")
    }
}

pub fn pval(p: f64) -> String {
    if p.is_nan() {
        "NA".into()
    } else if p < 1e-5 {
        "<0.00001".into()
    } else {
        format!("{p:.5}")
    }
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(g(66.26030), "66.2603");
        assert_eq!(g(-0.479305), "-0.479305");
        assert_eq!(g(1142.394), "1142.39");
        assert_eq!(g(0.0), "0");
        assert_eq!(g(1.5e-7), "1.50000e-7");
    }

    #[test]
    fn table_alignment() {
        let mut t = Table::new(&["name", "value"]);
        t.row(vec!["a".into(), "1".into()]);
        t.row(vec!["long".into(), "10.5".into()]);
        let mut s = String::new();
        t.render(&mut s);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[1].len(), lines[2].len());
    }
}
