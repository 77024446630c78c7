//! Deterministic CSV and JSON writers.
//!
//! CSV: `#` comment lines carrying the command and the resolved config, then a
//! header line and one line per row. Numbers are written with 17 significant
//! digits in scientific notation. Secondary tables follow after a blank line
//! and a `# table: <name>` marker.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<String>) -> Self {
        Self {
            name: name.to_string(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Everything one command writes. The first table is the main one and is
/// named `rows`.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn main(&self) -> &Table {
        &self.tables[0]
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# realclock-qm {}", self.command);
        let _ = writeln!(
            out,
            "# config: {}",
            serde_json::to_string(&self.config).expect("config serializes")
        );
        for (k, table) in self.tables.iter().enumerate() {
            if k > 0 {
                let _ = writeln!(out);
                let _ = writeln!(out, "# table: {}", table.name);
            }
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("command".into(), Value::from(self.command.clone()));
        doc.insert("config".into(), self.config.clone());
        for table in &self.tables {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), json_number(*v)))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            doc.insert(table.name.clone(), Value::Array(rows));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<(), CliError> {
        std::fs::write(path, self.render(format))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    }
}

/// 17 significant digits, scientific notation.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut t = Table::new("rows", vec!["t".into(), "x".into()]);
        t.push(vec![0.0, 0.1]);
        t.push(vec![1.0, f64::NAN]);
        Report {
            command: "evolve".into(),
            config: json!({"seed": 3}),
            tables: vec![t, Table::new("extra", vec!["a".into()])],
        }
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let expected = "# realclock-qm evolve\n# config: {\"seed\":3}\nt,x\n\
            0.0000000000000000e0,1.0000000000000001e-1\n1.0000000000000000e0,NaN\n\n# table: extra\na\n";
        assert_eq!(csv, expected);
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_nulls_non_finite() {
        let doc: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(doc["rows"][1]["x"], Value::Null);
        assert_eq!(doc["config"]["seed"], 3);
        assert_eq!(doc["extra"], json!([]));
    }
}
