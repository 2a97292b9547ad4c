//! Result tables and their CSV / JSON serialization.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // non-finite values have no JSON number; keep them as strings
            Cell::Num(x) if !x.is_finite() => Value::String(fmt_f64(*x)),
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// Shortest round-trip decimal, with `inf`, `-inf` and `nan` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Completed,
    Inconclusive,
    Failed,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    /// Verdicts and headline numbers, printed and embedded in JSON.
    pub summary: Value,
    /// Full structured result.
    pub detail: Value,
    pub lines: Vec<String>,
    pub outcome: Outcome,
}

impl Report {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Report { columns, rows: Vec::new(), summary: Value::Object(Map::new()), detail: Value::Null, lines: Vec::new(), outcome: Outcome::Completed }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        if let Value::Object(m) = &mut self.summary {
            m.insert(key.to_string(), v);
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn inconclusive_if(&mut self, cond: bool) {
        if cond && self.outcome == Outcome::Completed {
            self.outcome = Outcome::Inconclusive;
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.columns).map_err(|e| e.to_string())?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv)).map_err(|e| e.to_string())?;
        }
        w.into_inner().map_err(|e| e.to_string())
    }

    pub fn to_json(&self, meta: &Value) -> Result<Vec<u8>, String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect()))
            .collect();
        let doc = json!({
            "meta": meta,
            "outcome": self.outcome,
            "summary": self.summary,
            "columns": self.columns,
            "rows": rows,
            "detail": self.detail,
        });
        let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| e.to_string())?;
        out.push(b'\n');
        Ok(out)
    }
}

/// Config echo, versions and seed. Contains nothing run-dependent, so equal
/// configs give equal headers.
pub fn meta(cfg: &RunConfig) -> Value {
    json!({
        "tool": "compop",
        "cli_version": env!("CARGO_PKG_VERSION"),
        "core_version": compop_core::VERSION,
        "command": cfg.command.name(),
        "seed": cfg.seed,
        "threads_env": std::env::var("RAYON_NUM_THREADS").ok(),
        "config": cfg,
    })
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes the report file (and for CSV the `.meta.json` header beside it).
/// Without a path the document goes to stdout.
pub fn emit(report: &Report, cfg: &RunConfig) -> Result<Vec<PathBuf>, String> {
    let meta = meta(cfg);
    let body = match cfg.output.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json(&meta)?,
    };
    match &cfg.output.path {
        None => {
            std::io::stdout().write_all(&body).map_err(|e| e.to_string())?;
            Ok(Vec::new())
        }
        Some(path) => {
            std::fs::write(path, &body).map_err(|e| format!("{}: {e}", path.display()))?;
            let mut written = vec![path.clone()];
            if cfg.output.format == Format::Csv {
                let side = sidecar(path);
                let mut text = serde_json::to_vec_pretty(&json!({ "meta": meta, "outcome": report.outcome, "summary": report.summary }))
                    .map_err(|e| e.to_string())?;
                text.push(b'\n');
                std::fs::write(&side, text).map_err(|e| format!("{}: {e}", side.display()))?;
                written.push(side);
            }
            Ok(written)
        }
    }
}
