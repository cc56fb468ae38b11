//! CSV in, calibration report out: writes a simulated three-trajectory file,
//! reads it back, selects a model from the MSD and estimates every column.

use subordinated::params::ModelParams;
use subordinated::paths::{simulate_ensemble, PathKind, TimeGrid};
use subordinated::pipeline::report::render_calibration;
use subordinated::pipeline::{
    ingest_csv_labeled, run_calibration, write_ensemble_file, CalibrationConfig, ModelChoice, OutputFormat,
    Provenance, SelectedModel,
};

fn main() -> subordinated::error::Result<()> {
    let dir = std::env::temp_dir().join("subordinated-calibrate-example");
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("quotes.csv");

    let truth = ModelParams::new(0.26, 6.0, 0.11)?;
    let grid = TimeGrid::uniform(850.0, 851)?;
    write_ensemble_file(&input, &simulate_ensemble(PathKind::Nts, truth, &grid, 3, 11)?)?;

    let data = ingest_csv_labeled(&input)?;
    let provenance = Provenance::new("estimate", None, Some(input.display().to_string()));
    let mut cfg = CalibrationConfig::default();
    let mut report = run_calibration(&data.ensemble, &data.names, &cfg, provenance.clone())?;
    println!("selected: {:?} ({})", report.selection.selected, report.selection.reason);
    if report.selection.selected == SelectedModel::Undetermined {
        // three paths rarely pin down the large-lag regime; name the model instead
        cfg.model = ModelChoice::Nts;
        report = run_calibration(&data.ensemble, &data.names, &cfg, provenance)?;
    }
    print!("{}", String::from_utf8_lossy(&render_calibration(&report, OutputFormat::Csv)?));
    Ok(())
}
