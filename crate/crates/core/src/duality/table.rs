use std::io::{Read, Write};

use crate::error::{invalid, Error, Result};
use crate::types::Point;

/// Values `f_r(x_c)` of finitely many functions (rows) at finitely many
/// points (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    values: Vec<Vec<f64>>,
    columns: Option<Vec<Point>>,
}

impl FunctionTable {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        let width = values.first().map_or(0, Vec::len);
        if values.iter().any(|r| r.len() != width) {
            return Err(invalid("rows have different lengths"));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("table values must be finite"));
        }
        Ok(Self {
            values,
            columns: None,
        })
    }

    /// Table with the column points attached.
    pub fn with_points(values: Vec<Vec<f64>>, points: Vec<Point>) -> Result<Self> {
        let mut t = Self::new(values)?;
        if !t.values.is_empty() && points.len() != t.n_cols() {
            return Err(invalid(format!(
                "{} points for {} columns",
                points.len(),
                t.n_cols()
            )));
        }
        t.columns = Some(points);
        Ok(t)
    }

    /// Evaluates functions on points.
    pub fn from_functions<F: Fn(&Point) -> f64>(functions: &[F], points: &[Point]) -> Result<Self> {
        let values = functions
            .iter()
            .map(|f| points.iter().map(f).collect())
            .collect();
        Self::with_points(values, points.to_vec())
    }

    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_cols(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row][col]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[col]).collect()
    }

    pub fn points(&self) -> Option<&[Point]> {
        self.columns.as_deref()
    }

    /// Transpose: points become functions of the original functions.
    pub fn dual(&self) -> FunctionTable {
        let values = (0..self.n_cols()).map(|c| self.column(c)).collect();
        FunctionTable {
            values,
            columns: None,
        }
    }

    /// Header row holds column points (coordinates joined by `;`) or
    /// `c0, c1, …` when no points are attached; one line per function.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let header: Vec<String> = match &self.columns {
            Some(points) => points
                .iter()
                .map(|p| {
                    p.coords()
                        .iter()
                        .map(f64::to_string)
                        .collect::<Vec<_>>()
                        .join(";")
                })
                .collect(),
            None => (0..self.n_cols()).map(|c| format!("c{c}")).collect(),
        };
        w.write_record(&header).map_err(csv_err)?;
        for row in &self.values {
            w.write_record(row.iter().map(f64::to_string))
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers().map_err(csv_err)?.clone();
        let points: Option<Vec<Point>> = header
            .iter()
            .map(|h| {
                let coords = h
                    .split(';')
                    .map(|c| c.trim().parse::<f64>().ok())
                    .collect::<Option<Vec<_>>>()?;
                Point::new(coords).ok()
            })
            .collect();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| invalid(format!("bad table value {v:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != header.len() {
                return Err(invalid("row length does not match header"));
            }
            values.push(row);
        }
        match points {
            Some(p) if !values.is_empty() => Self::with_points(values, p),
            _ => Self::new(values),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// A 0/1 matrix, stored row by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: Vec<Vec<u8>>,
}

impl BinaryMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(invalid("matrix needs at least one row"));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(invalid("rows have different lengths"));
        }
        if rows.iter().flatten().any(|&b| b > 1) {
            return Err(invalid("entries must be 0 or 1"));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.rows[row][col]
    }
}
