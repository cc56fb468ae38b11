//! Multi-trajectory CSV files: a `t` column followed by one column per trajectory.
//!
//! Row numbers in errors are file line numbers; the header is row 1.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use super::report::format_float;
use crate::error::{Error, Result};
use crate::paths::{PathKind, SamplePath, TimeGrid, TrajectoryEnsemble};

/// An ensemble together with its column names.
#[derive(Debug, Clone)]
pub struct LabeledEnsemble {
    pub names: Vec<String>,
    pub ensemble: TrajectoryEnsemble,
}

pub fn ingest_csv(path: &Path) -> Result<TrajectoryEnsemble> {
    Ok(ingest_csv_labeled(path)?.ensemble)
}

pub fn ingest_csv_labeled(path: &Path) -> Result<LabeledEnsemble> {
    read_ensemble(File::open(path)?)
}

pub fn read_ensemble<R: Read>(reader: R) -> Result<LabeledEnsemble> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let width = header.len();
    if width < 2 || &header[0] != "t" {
        return Err(Error::Parse(format!(
            "header must be `t` followed by at least one trajectory column, got `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    if let Some(blank) = names.iter().position(|n| n.is_empty()) {
        return Err(Error::Parse(format!("trajectory column {} has an empty name", blank + 1)));
    }

    let mut times = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); width - 1];
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(times.len() + 2, |p| p.line() as usize);
        if record.len() != width {
            return Err(Error::Shape {
                row,
                expected: width,
                found: record.len(),
            });
        }
        let parse = |i: usize| -> Result<f64> {
            let cell = &record[i];
            if cell.is_empty() {
                return Err(Error::Parse(format!("row {row}: missing value in column `{}`", &header[i])));
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Parse(format!("row {row}: `{cell}` in column `{}` is not a number", &header[i])))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("row {row}: non-finite value in column `{}`", &header[i])));
            }
            Ok(v)
        };
        let t = parse(0)?;
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(Error::Grid {
                    row,
                    message: format!("t = {t} does not exceed the previous time {prev}"),
                });
            }
        }
        times.push(t);
        for (i, col) in columns.iter_mut().enumerate() {
            col.push(parse(i + 1)?);
        }
    }
    if times.len() < 2 {
        return Err(Error::Parse(format!("need at least 2 data rows, found {}", times.len())));
    }
    let grid = Arc::new(TimeGrid::new(times)?);
    let paths = columns
        .into_iter()
        .map(|values| SamplePath::new(Arc::clone(&grid), values, PathKind::Observed))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledEnsemble {
        names,
        ensemble: TrajectoryEnsemble::new(grid, paths, 0)?,
    })
}

/// Writes `t,traj_0,traj_1,...` with shortest round-trip number formatting.
pub fn write_ensemble<W: Write>(writer: W, ensemble: &TrajectoryEnsemble) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_owned()];
    header.extend((0..ensemble.len()).map(|i| format!("traj_{i}")));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(ensemble.len() + 1);
    for (k, t) in ensemble.shared_grid.points().iter().enumerate() {
        row.clear();
        row.push(format_float(*t));
        row.extend(ensemble.paths.iter().map(|p| format_float(p.values[k])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ensemble_file(path: &Path, ensemble: &TrajectoryEnsemble) -> Result<()> {
    write_ensemble(BufWriter::new(File::create(path)?), ensemble)
}
