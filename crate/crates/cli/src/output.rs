use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A command's result: a table plus a free-form summary.
pub struct Report {
    pub command: &'static str,
    /// Parameters that determine the output, in display order.
    pub config: Vec<(&'static str, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Value,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self { command, config: Vec::new(), columns: Vec::new(), rows: Vec::new(), summary: Value::Null }
    }

    pub fn param(mut self, key: &'static str, v: impl ToString) -> Self {
        self.config.push((key, v.to_string()));
        self
    }

    pub fn header(&self) -> String {
        let mut s = format!("# cubic {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.config {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.header();
                s.push('\n');
                if !self.summary.is_null() {
                    s.push_str(&format!("# summary {}\n", self.summary));
                }
                s.push_str(&self.columns.join(","));
                s.push('\n');
                for r in &self.rows {
                    let cells: Vec<String> = r.iter().map(|c| csv_cell(c)).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let config: Map<String, Value> =
                    self.config.iter().map(|(k, v)| (k.to_string(), Value::String(v.clone()))).collect();
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let m: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(r)
                            .map(|(c, v)| (c.to_string(), cell(v)))
                            .collect();
                        Value::Object(m)
                    })
                    .collect();
                let doc = json!({
                    "cubic": env!("CARGO_PKG_VERSION"),
                    "command": self.command,
                    "config": config,
                    "summary": self.summary,
                    "rows": rows,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn csv_cell(v: &str) -> String {
    if v.contains([',', '"', '\n']) {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

// Integers stay exact; anything else is kept as a string.
fn cell(v: &str) -> Value {
    if let Ok(i) = v.parse::<i64>() {
        return Value::from(i);
    }
    if let Ok(x) = v.parse::<f64>() {
        if x.is_finite() && !v.contains('/') {
            return Value::from(x);
        }
    }
    Value::String(v.to_string())
}

pub fn emit(text: &str, out: Option<&Path>) -> cubic_core::Result<()> {
    match out {
        Some(path) => cubic_core::census::cache::write_atomic(path, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
