use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};

pub const SCHEMA_VERSION: &str = "kornlab/1";

#[derive(Clone, Debug, PartialEq)]
pub struct ReportError {
    /// `invariant` for a violated check, `module` for an evaluation failure.
    pub kind: &'static str,
    pub name: String,
    pub message: String,
}

impl ReportError {
    pub fn invariant(name: impl Into<String>, message: impl Into<String>) -> Self {
        ReportError {
            kind: "invariant",
            name: name.into(),
            message: message.into(),
        }
    }

    pub fn module(name: impl Into<String>, message: impl Into<String>) -> Self {
        ReportError {
            kind: "module",
            name: name.into(),
            message: message.into(),
        }
    }
}

/// One CSV table: header plus rows of already formatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub results: Value,
    pub table: Table,
    pub errors: Vec<ReportError>,
    pub timings_ms: Vec<(&'static str, f64)>,
}

impl Report {
    pub fn new(cfg: &RunConfig) -> Self {
        Report {
            command: cfg.command.as_str(),
            config: cfg.to_json(),
            results: Value::Null,
            table: Table::default(),
            errors: Vec::new(),
            timings_ms: Vec::new(),
        }
    }

    pub fn failed(&self) -> bool {
        !self.errors.is_empty()
    }

    pub fn to_value(&self) -> Value {
        let mut top = Map::new();
        top.insert("schema_version".into(), SCHEMA_VERSION.into());
        top.insert("command".into(), self.command.into());
        top.insert("config".into(), self.config.clone());
        top.insert("results".into(), self.results.clone());
        let errors = self
            .errors
            .iter()
            .map(|e| {
                let mut m = Map::new();
                m.insert("kind".into(), e.kind.into());
                m.insert("name".into(), e.name.clone().into());
                m.insert("message".into(), e.message.clone().into());
                Value::Object(m)
            })
            .collect();
        top.insert("errors".into(), Value::Array(errors));
        let mut t = Map::new();
        for (k, v) in &self.timings_ms {
            t.insert((*k).into(), float(*v));
        }
        top.insert("timings_ms".into(), Value::Object(t));
        Value::Object(top)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = String::new();
                write_json(&mut s, &self.to_value(), 0);
                s.push('\n');
                s
            }
            Format::Csv => render_csv(&self.table),
        }
    }

    pub fn emit(&self, format: Format, path: Option<&Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match path {
            Some(p) => std::fs::write(p, text),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()
            }
        }
    }
}

/// JSON number for finite values, `null` otherwise.
pub fn float(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Floats as 17 significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn write_json(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n("  ", n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) if !n.is_f64() => write!(out, "{i}").unwrap(),
            (_, Some(u), _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short arrays of scalars stay on one line
            if items.len() <= 6 && items.iter().all(|i| !i.is_array() && !i.is_object()) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_json(out, item, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_json(out, item, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(out, item, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(t: &Table) -> String {
    let mut s = t.header.join(",");
    s.push('\n');
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
