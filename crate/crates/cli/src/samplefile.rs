//! Labeled samples as CSV: columns `x0, …, x{d-1}, y`, one row per example.

use std::path::Path;

use medcomp_core::{LabeledSample, Point, TaskKind};

use crate::CliError;

pub fn write(path: &Path, sample: &LabeledSample) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(CliError::io)?;
    let mut header: Vec<String> = (0..sample.dim()).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    w.write_record(&header).map_err(CliError::io)?;
    for (x, y) in sample.iter() {
        // `{:?}` keeps the shortest round-trip representation of each f64.
        let mut rec: Vec<String> = x.coords().iter().map(|c| format!("{c:?}")).collect();
        rec.push(format!("{y:?}"));
        w.write_record(&rec).map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}

pub fn read(path: &Path, kind: TaskKind) -> Result<LabeledSample, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(CliError::io)?;
    let width = r.headers().map_err(CliError::io)?.len();
    if width < 2 {
        return Err(CliError::usage(format!(
            "{}: need at least one coordinate column and a label",
            path.display()
        )));
    }
    let mut items = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let nums = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| {
                CliError::usage(format!(
                    "{}: row {}: not a number",
                    path.display(),
                    line + 1
                ))
            })?;
        let (y, coords) = nums.split_last().expect("width checked");
        items.push((Point::new(coords.to_vec())?, *y));
    }
    Ok(LabeledSample::new(items, kind)?)
}
