use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Add wall-clock columns. Off by default so reruns are byte-identical.
    #[arg(long)]
    pub timing: bool,
}

pub type Row = Vec<(String, Value)>;

pub fn cell(name: &str, value: impl Into<Value>) -> (String, Value) {
    (name.to_string(), value.into())
}

/// Rows of named cells. CSV gets a header row; JSON gets an array of
/// objects with the same keys in the same order.
#[derive(Debug, Default)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn push(&mut self, row: Row) {
        for (name, _) in &row {
            if !self.columns.iter().any(|c| c == name) {
                self.columns.push(name.clone());
            }
        }
        let mut cells = vec![Value::Null; self.columns.len()];
        for (name, v) in row {
            let i = self.columns.iter().position(|c| *c == name).unwrap();
            cells[i] = v;
        }
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(CliError::io)?;
                for row in &self.rows {
                    let mut cells: Vec<String> = row.iter().map(cell_text).collect();
                    cells.resize(self.columns.len(), String::new());
                    w.write_record(&cells).map_err(CliError::io)?;
                }
                w.into_inner().map_err(|e| CliError::io(e.to_string()))
            }
            Format::Json => {
                let objects: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = Map::new();
                        for (i, c) in self.columns.iter().enumerate() {
                            obj.insert(c.clone(), row.get(i).cloned().unwrap_or(Value::Null));
                        }
                        Value::Object(obj)
                    })
                    .collect();
                let mut out = serde_json::to_vec_pretty(&objects).map_err(CliError::io)?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }

    pub fn write(&self, args: &OutputArgs) -> Result<(), CliError> {
        let bytes = self.render(args.format)?;
        match &args.out {
            Some(path) => std::fs::write(path, bytes).map_err(CliError::io),
            None => std::io::stdout().write_all(&bytes).map_err(CliError::io),
        }
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Config fields as leading cells, minus any the row sets itself.
pub fn config_cells<T: Serialize>(cfg: &T, skip: &[&str]) -> Row {
    match serde_json::to_value(cfg) {
        Ok(Value::Object(map)) => map
            .into_iter()
            .filter(|(k, _)| !skip.contains(&k.as_str()))
            .collect(),
        _ => Vec::new(),
    }
}
