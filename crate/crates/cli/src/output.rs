//! Report rendering: CSV with a `#` metadata preamble, JSON, and a plain
//! SVG line plot of the table.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::config::ResolvedConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn numeric_column(&self, idx: usize) -> Option<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| match r[idx] {
                Cell::Num(v) if v.is_finite() => Some(v),
                _ => None,
            })
            .collect()
    }
}

/// Which columns to draw: `x` against each of `y`.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub x: usize,
    pub y: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub scenario: String,
    /// Label of the figure the run reproduces.
    pub anchor: &'static str,
    pub summary: Vec<(String, Value)>,
    pub table: Table,
    /// Scenario-specific structured payload, JSON only.
    pub payload: Option<Value>,
    pub plot: Option<PlotSpec>,
}

impl Report {
    pub fn new(scenario: &str, anchor: &'static str, table: Table) -> Self {
        Self {
            scenario: scenario.to_string(),
            anchor,
            summary: Vec::new(),
            table,
            payload: None,
            plot: None,
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn value(&mut self, key: &str, v: f64) {
        self.note(key, number(v));
    }
}

/// Fifteen significant digits.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        // no "-0" in tables
        format!("{:.14e}", 0.0)
    } else if v.is_finite() {
        format!("{v:.14e}")
    } else {
        format!("{v}")
    }
}

/// A JSON number rounded to fifteen significant digits (`null` if not
/// finite).
pub fn number(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format_number(v).parse().expect("formatted float parses");
    json!(rounded)
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn metadata(report: &Report, cfg: &ResolvedConfig, seed: u64) -> Vec<(&'static str, String)> {
    vec![
        ("tool", format!("spinpart {VERSION}")),
        ("scenario", report.scenario.clone()),
        ("anchor", report.anchor.to_string()),
        ("config_sha256", cfg.hash()),
        ("seed", seed.to_string()),
        ("config", cfg.canonical()),
    ]
}

fn summary_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map(format_number).unwrap_or_else(|| n.to_string()),
        other => other.to_string(),
    }
}

pub fn render_csv(report: &Report, cfg: &ResolvedConfig, seed: u64) -> String {
    let mut out = String::new();
    for (k, v) in metadata(report, cfg, seed) {
        writeln!(out, "# {k}: {v}").unwrap();
    }
    for (k, v) in &report.summary {
        writeln!(out, "# summary.{k}: {}", summary_text(v)).unwrap();
    }
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    wtr.write_record(&report.table.columns).expect("in-memory write");
    for row in &report.table.rows {
        let fields = row.iter().map(|c| match c {
            Cell::Num(v) => format_number(*v),
            Cell::Text(s) => s.clone(),
        });
        wtr.write_record(fields).expect("in-memory write");
    }
    let body = wtr.into_inner().expect("in-memory flush");
    out.push_str(std::str::from_utf8(&body).expect("CSV of UTF-8 fields"));
    out
}

pub fn render_json(report: &Report, cfg: &ResolvedConfig, seed: u64) -> String {
    let mut meta = Map::new();
    for (k, v) in metadata(report, cfg, seed) {
        meta.insert(k.to_string(), Value::String(v));
    }
    meta.insert("seed".into(), json!(seed));
    meta.insert("config".into(), cfg.document.clone());
    let summary: Map<String, Value> = report.summary.iter().cloned().collect();
    let rows: Vec<Value> = report
        .table
        .rows
        .iter()
        .map(|r| {
            Value::Array(
                r.iter()
                    .map(|c| match c {
                        Cell::Num(v) => number(*v),
                        Cell::Text(s) => Value::String(s.clone()),
                    })
                    .collect(),
            )
        })
        .collect();
    let mut doc = json!({
        "metadata": meta,
        "summary": summary,
        "columns": report.table.columns,
        "rows": rows,
    });
    if let Some(p) = &report.payload {
        doc["report"] = p.clone();
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Line plot of the chosen columns; `None` when the table has nothing
/// numeric to draw.
pub fn render_svg(report: &Report) -> Option<String> {
    let spec = report.plot.as_ref()?;
    let t = &report.table;
    let xs = t.numeric_column(spec.x)?;
    let series: Vec<(usize, Vec<f64>)> = spec.y.iter().filter_map(|&c| Some((c, t.numeric_column(c)?))).collect();
    if xs.len() < 2 || series.is_empty() {
        return None;
    }
    let (w, h, m) = (640.0, 400.0, 56.0);
    let span = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = span(&mut xs.iter().copied());
    let (y0, y1) = span(&mut series.iter().flat_map(|(_, v)| v.iter().copied()));
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r##"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        w - 2.0 * m,
        h - 2.0 * m
    )
    .unwrap();
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: &str| {
        writeln!(s, r#"<text x="{x:.1}" y="{y:.1}" font-size="11" font-family="sans-serif" text-anchor="{anchor}">{text}</text>"#).unwrap();
    };
    label(&mut s, m, h - m + 16.0, "start", &format!("{x0:.4e}"));
    label(&mut s, w - m, h - m + 16.0, "end", &format!("{x1:.4e}"));
    label(&mut s, m - 4.0, h - m, "end", &format!("{y0:.3e}"));
    label(&mut s, m - 4.0, m + 10.0, "end", &format!("{y1:.3e}"));
    label(&mut s, w / 2.0, h - 12.0, "middle", &xml_escape(&t.columns[spec.x]));
    label(&mut s, w / 2.0, 24.0, "middle", &xml_escape(&report.scenario));
    for (k, (col, ys)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = xs.iter().zip(ys).map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" font-family="sans-serif" fill="{colour}">{}</text>"#,
            w - m + 4.0,
            m + 14.0 * (k as f64 + 1.0),
            xml_escape(&t.columns[*col])
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
