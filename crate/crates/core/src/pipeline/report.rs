//! Serialization of command outputs. Everything here is deterministic: the
//! same value always produces the same bytes.

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::calibration::CalibrationReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// `.json` means JSON; anything else, including no path, means CSV.
    pub fn infer(path: Option<&Path>) -> Self {
        match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!("unknown output format '{other}', expected csv or json"))),
        }
    }
}

/// Shortest round-trip decimal, switching to exponent form for very large or small magnitudes.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes a header and rows of already formatted cells.
pub fn to_csv<S: AsRef<str>>(header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(AsRef::as_ref))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// `trajectory,alpha,lambda,beta`; a trajectory whose estimation failed has empty cells.
pub fn calibration_table(report: &CalibrationReport) -> Result<Vec<u8>> {
    to_csv(
        &["trajectory", "alpha", "lambda", "beta"],
        report.rows.iter().map(|row| match &row.estimate {
            Some(e) => vec![
                row.trajectory.clone(),
                format_float(e.alpha_hat),
                format_float(e.lambda_hat),
                format_float(e.beta_hat),
            ],
            None => vec![row.trajectory.clone(), String::new(), String::new(), String::new()],
        }),
    )
}

pub fn render_calibration(report: &CalibrationReport, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => to_json(report),
        OutputFormat::Csv => calibration_table(report),
    }
}

pub fn emit_report(report: &CalibrationReport, format: OutputFormat, path: &Path) -> Result<()> {
    write_output(&render_calibration(report, format)?, Some(path))
}

/// Writes to `path`, or to stdout when there is none.
pub fn write_output(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = File::create(p)?;
            f.write_all(bytes)?;
            f.flush()?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::calibration::{run_calibration, CalibrationConfig, ModelChoice};
    use crate::pipeline::csvio::read_ensemble;
    use crate::pipeline::Provenance;

    fn report() -> CalibrationReport {
        let mut text = String::from("t,a,b,c\n");
        for i in 0..60 {
            let x = i as f64;
            text.push_str(&format!("{i},{},{},{}\n", (0.7 * x).sin() * x, (1.3 * x).cos() * x, 0.5 * x));
        }
        let e = read_ensemble(text.as_bytes()).unwrap();
        let cfg = CalibrationConfig {
            model: ModelChoice::Nts,
            ..CalibrationConfig::default()
        };
        run_calibration(&e.ensemble, &e.names, &cfg, Provenance::new("estimate", None, Some("mem".into()))).unwrap()
    }

    #[test]
    fn format_inference() {
        assert_eq!(OutputFormat::infer(Some(Path::new("x/report.JSON"))), OutputFormat::Json);
        assert_eq!(OutputFormat::infer(Some(Path::new("out.csv"))), OutputFormat::Csv);
        assert_eq!(OutputFormat::infer(None), OutputFormat::Csv);
    }

    #[test]
    fn json_round_trips_and_csv_has_one_row_per_trajectory() {
        let r = report();
        let json = render_calibration(&r, OutputFormat::Json).unwrap();
        let back: CalibrationReport = serde_json::from_slice(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(render_calibration(&back, OutputFormat::Json).unwrap(), json);

        let csv = String::from_utf8(render_calibration(&r, OutputFormat::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "trajectory,alpha,lambda,beta");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn emission_is_repeatable() {
        let r = report();
        let dir = tempfile::tempdir().unwrap();
        let (p1, p2) = (dir.path().join("a.json"), dir.path().join("b.json"));
        emit_report(&r, OutputFormat::Json, &p1).unwrap();
        emit_report(&r, OutputFormat::Json, &p2).unwrap();
        assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap());
    }
}
