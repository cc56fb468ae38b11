//! Calibration of an observed ensemble: MSD diagnostics, model selection and
//! per-trajectory estimation.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{empirical_msd, fit_msd_with, MsdCurve, MsdFit, MsdModel, MsdWarning, RegimeWindows};
use crate::error::{Error, Result};
use crate::estimation::{
    estimate_nts, estimate_subdiffusive, EstimationReport, IncrementSeries, NtsConfig, SubdiffusiveConfig,
};
use crate::paths::TrajectoryEnsemble;

use super::Provenance;

/// Which estimator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    /// Use the model picked by the MSD selection rule.
    Auto,
    Nts,
    Subdiffusive,
}

impl FromStr for ModelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ModelChoice::Auto),
            "nts" => Ok(ModelChoice::Nts),
            "subdiff" | "subdiffusive" => Ok(ModelChoice::Subdiffusive),
            other => Err(Error::Parse(format!("unknown model '{other}', expected auto, nts or subdiff"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectedModel {
    Nts,
    Subdiffusive,
    Undetermined,
}

/// Thresholds of the MSD model-selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionRule {
    /// The small-lag exponent must fall below this for a subdiffusive verdict.
    pub p_small_max: f64,
    /// The power law must beat the polynomial residual by this factor.
    pub residual_margin: f64,
}

impl Default for SelectionRule {
    fn default() -> Self {
        Self {
            p_small_max: 0.9,
            residual_margin: 1.5,
        }
    }
}

impl SelectionRule {
    /// The rule in words, as recorded in reports.
    pub fn describe(&self) -> String {
        format!(
            "residual = mean squared log residual over the lags of both power-law windows; \
             subdiffusive if p_small < {} and polynomial residual > {} x power-law residual; \
             nts otherwise; undetermined if the MSD is identically zero or a fit fails",
            self.p_small_max, self.residual_margin
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub model: ModelChoice,
    pub selection: SelectionRule,
    pub windows: RegimeWindows,
    pub nts: NtsConfig,
    pub subdiffusive: SubdiffusiveConfig,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            model: ModelChoice::Auto,
            selection: SelectionRule::default(),
            windows: RegimeWindows::default(),
            nts: NtsConfig::default(),
            subdiffusive: SubdiffusiveConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsdSummary {
    pub n_lags: usize,
    pub n_paths: usize,
    pub zero: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<MsdWarning>,
    pub polynomial: Option<MsdFit>,
    pub power: Option<MsdFit>,
    pub polynomial_log_residual: Option<f64>,
    pub power_log_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fit_errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub selected: SelectedModel,
    pub rule: String,
    pub reason: String,
}

/// One row per input trajectory; exactly one of `estimate` and `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub trajectory: String,
    pub estimate: Option<EstimationReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub provenance: Provenance,
    pub config: CalibrationConfig,
    pub n_observations: usize,
    pub sampling_step: Option<f64>,
    pub msd: MsdSummary,
    pub selection: Selection,
    /// Model whose estimator produced the rows, if any ran.
    pub estimator: Option<SelectedModel>,
    pub rows: Vec<TrajectoryRow>,
}

/// Mean squared `ln(value) - ln(fit)` over the lags inside the power-law windows.
fn log_residual(curve: &MsdCurve, fit: &MsdFit, windows: [(f64, f64); 2]) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (&t, &y) in curve.lags.iter().zip(&curve.values) {
        if y > 0.0 && windows.iter().any(|w| t >= w.0 && t <= w.1) {
            let p = fit.predict(t);
            if !(p > 0.0) {
                return None;
            }
            sum += (y.ln() - p.ln()).powi(2);
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

fn summarize_msd(curve: &MsdCurve, cfg: &CalibrationConfig) -> MsdSummary {
    let mut fit_errors = Vec::new();
    let mut fit = |model: MsdModel| match fit_msd_with(curve, model, cfg.windows) {
        Ok(f) => Some(f),
        Err(e) => {
            fit_errors.push(format!("{}: {e}", model.cli_name()));
            None
        }
    };
    let polynomial = fit(MsdModel::SecondOrderPolynomial);
    let power = fit(MsdModel::TwoRegimePower);
    let (polynomial_log_residual, power_log_residual) = match &power {
        Some(pw) => {
            let w = [pw.small_window.expect("power fit records windows"), pw.large_window.expect("power fit records windows")];
            (
                polynomial.as_ref().and_then(|p| log_residual(curve, p, w)),
                log_residual(curve, pw, w),
            )
        }
        None => (None, None),
    };
    MsdSummary {
        n_lags: curve.len(),
        n_paths: curve.n_paths,
        zero: curve.is_zero(),
        warnings: curve.warnings.clone(),
        polynomial,
        power,
        polynomial_log_residual,
        power_log_residual,
        fit_errors,
    }
}

/// Applies the selection rule to an MSD summary.
pub fn select_model(msd: &MsdSummary, rule: &SelectionRule) -> Selection {
    let verdict = |selected, reason: String| Selection {
        selected,
        rule: rule.describe(),
        reason,
    };
    if msd.zero {
        return verdict(SelectedModel::Undetermined, "MSD is identically zero".into());
    }
    let (Some(power), Some(r_poly), Some(r_pow)) = (&msd.power, msd.polynomial_log_residual, msd.power_log_residual)
    else {
        return verdict(
            SelectedModel::Undetermined,
            format!("MSD fits unavailable: {}", msd.fit_errors.join("; ")),
        );
    };
    let p_small = power.coefficients[1];
    if p_small < rule.p_small_max && r_poly > rule.residual_margin * r_pow {
        verdict(
            SelectedModel::Subdiffusive,
            format!(
                "p_small = {p_small:.4} < {} and polynomial residual {r_poly:.6e} > {} x power-law residual {r_pow:.6e}",
                rule.p_small_max, rule.residual_margin
            ),
        )
    } else if p_small >= rule.p_small_max {
        verdict(
            SelectedModel::Nts,
            format!("p_small = {p_small:.4} >= {}: no subdiffusive small-lag regime", rule.p_small_max),
        )
    } else {
        verdict(
            SelectedModel::Nts,
            format!(
                "polynomial residual {r_poly:.6e} <= {} x power-law residual {r_pow:.6e}",
                rule.residual_margin
            ),
        )
    }
}

fn estimate_row(values: &[f64], dt: f64, model: SelectedModel, cfg: &CalibrationConfig) -> Result<EstimationReport> {
    match model {
        SelectedModel::Nts => estimate_nts(&IncrementSeries::from_observations(values, dt)?, &cfg.nts),
        SelectedModel::Subdiffusive => estimate_subdiffusive(values, dt, &cfg.subdiffusive),
        SelectedModel::Undetermined => Err(Error::InvalidParameter(
            "no model selected; rerun with an explicit model".into(),
        )),
    }
}

/// Runs MSD diagnostics, model selection and per-trajectory estimation.
/// Estimation failures are recorded in their row and do not stop the others.
pub fn run_calibration(
    ensemble: &TrajectoryEnsemble,
    names: &[String],
    cfg: &CalibrationConfig,
    provenance: Provenance,
) -> Result<CalibrationReport> {
    if names.len() != ensemble.len() {
        return Err(Error::InvalidParameter(format!(
            "{} names for {} trajectories",
            names.len(),
            ensemble.len()
        )));
    }
    let curve = empirical_msd(ensemble);
    let msd = summarize_msd(&curve, cfg);
    let selection = select_model(&msd, &cfg.selection);
    let estimator = match cfg.model {
        ModelChoice::Auto => selection.selected,
        ModelChoice::Nts => SelectedModel::Nts,
        ModelChoice::Subdiffusive => SelectedModel::Subdiffusive,
    };
    let dt = ensemble.shared_grid.uniform_step(1e-9);
    let rows = ensemble
        .paths
        .par_iter()
        .zip(names)
        .map(|(path, name)| {
            let result = match dt {
                Some(dt) => estimate_row(&path.values, dt, estimator, cfg),
                None => Err(Error::Grid {
                    row: 0,
                    message: "estimation needs equally spaced observations".into(),
                }),
            };
            match result {
                Ok(r) => TrajectoryRow {
                    trajectory: name.clone(),
                    estimate: Some(r),
                    error: None,
                },
                Err(e) => TrajectoryRow {
                    trajectory: name.clone(),
                    estimate: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(CalibrationReport {
        provenance,
        config: cfg.clone(),
        n_observations: ensemble.shared_grid.len(),
        sampling_step: dt,
        msd,
        selection,
        estimator: (estimator != SelectedModel::Undetermined).then_some(estimator),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{PathKind, SamplePath, TimeGrid};
    use std::sync::Arc;

    fn ensemble(f: impl Fn(usize, f64) -> f64, n_paths: usize, n: usize) -> TrajectoryEnsemble {
        let grid = Arc::new(TimeGrid::regular(1.0, n).unwrap());
        let paths = (0..n_paths)
            .map(|j| {
                let v = grid.points().iter().map(|&t| f(j, t)).collect();
                SamplePath::new(grid.clone(), v, PathKind::Observed).unwrap()
            })
            .collect();
        TrajectoryEnsemble::new(grid, paths, 0).unwrap()
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("traj_{i}")).collect()
    }

    #[test]
    fn constant_ensemble_is_undetermined() {
        let e = ensemble(|_, _| 3.0, 3, 50);
        let r = run_calibration(&e, &names(3), &CalibrationConfig::default(), Provenance::new("estimate", None, None)).unwrap();
        assert_eq!(r.selection.selected, SelectedModel::Undetermined);
        assert!(r.msd.zero);
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows.iter().all(|row| row.error.is_some()));
    }

    #[test]
    fn power_law_msd_is_subdiffusive_and_quadratic_is_nts() {
        // deterministic shapes: |Y(t)| = t^0.3 and a ballistic-plus-diffusive drift
        let sub = ensemble(|j, t| if j % 2 == 0 { t.powf(0.3) } else { -t.powf(0.3) }, 2, 200);
        let msd = summarize_msd(&empirical_msd(&sub), &CalibrationConfig::default());
        assert_eq!(select_model(&msd, &SelectionRule::default()).selected, SelectedModel::Subdiffusive);

        let ballistic = ensemble(|j, t| if j % 2 == 0 { (0.01 * t * t + t).sqrt() } else { -(0.01 * t * t + t).sqrt() }, 2, 200);
        let msd = summarize_msd(&empirical_msd(&ballistic), &CalibrationConfig::default());
        assert!(msd.polynomial_log_residual.unwrap() < 1e-20);
        assert_eq!(select_model(&msd, &SelectionRule::default()).selected, SelectedModel::Nts);
    }

    #[test]
    fn rule_text_is_recorded() {
        let e = ensemble(|j, t| (j as f64 + 1.0) * t, 2, 40);
        let r = run_calibration(&e, &names(2), &CalibrationConfig::default(), Provenance::new("estimate", None, None)).unwrap();
        assert_eq!(r.selection.rule, SelectionRule::default().describe());
    }

    #[test]
    fn model_choice_names() {
        assert_eq!("subdiff".parse::<ModelChoice>().unwrap(), ModelChoice::Subdiffusive);
        assert!("gauss".parse::<ModelChoice>().is_err());
    }
}
