use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::args::Format;
use crate::Failure;

/// Shortest round-trip text, switching to exponent form far from 1.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if v == 0.0 {
        "0".into()
    } else if (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(usize),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(n) => n.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(n) => json!(n),
        }
    }
}

/// Tabular output; JSON form is `{"columns": [...], "rows": [[...]]}`.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<Vec<u8>, Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(Failure::io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))
                .map_err(Failure::io)?;
        }
        w.into_inner().map_err(|e| Failure::io(e.into_error()))
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }
}

/// A flat JSON object; as CSV it becomes one header row and one data row.
pub struct Record(pub Value);

impl Record {
    fn to_csv(&self) -> Result<Vec<u8>, Failure> {
        let obj = self.0.as_object().expect("records are JSON objects");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(obj.keys()).map_err(Failure::io)?;
        w.write_record(obj.values().map(|v| match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            Value::Number(n) => n.as_f64().map(fmt_num).unwrap_or_else(|| n.to_string()),
            other => other.to_string(),
        }))
        .map_err(Failure::io)?;
        w.into_inner().map_err(|e| Failure::io(e.into_error()))
    }
}

pub enum Output {
    Table(Table),
    Record(Record),
}

impl Output {
    fn native(&self) -> Format {
        match self {
            Output::Table(_) => Format::Csv,
            Output::Record(_) => Format::Json,
        }
    }

    pub fn render(&self, format: Option<Format>) -> Result<Vec<u8>, Failure> {
        match (self, format.unwrap_or(self.native())) {
            (Output::Table(t), Format::Csv) => t.to_csv(),
            (Output::Table(t), Format::Json) => pretty(&t.to_json()),
            (Output::Record(r), Format::Csv) => r.to_csv(),
            (Output::Record(r), Format::Json) => pretty(&r.0),
        }
    }
}

pub fn pretty(v: &Value) -> Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| Failure::Validation(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(Failure::io)
        }
    }
}
