use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nts_fit::{estimate_nts, NtsConfig};
use super::waiting::{estimate_subdiffusive, SubdiffusiveConfig};
use super::{EstimationReport, EstimatorKind, IncrementSeries};
use crate::error::{Error, Result};
use crate::kernel::RandomStream;
use crate::params::ModelParams;
use crate::paths::{default_delta, simulate_nts, simulate_subdiffusive, TimeGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    /// Sampling step of the simulated observations.
    pub dt: f64,
    /// Clock step for the inverse subordinator; `None` means `dt / 10`.
    pub delta: Option<f64>,
    pub nts: NtsConfig,
    pub subdiffusive: SubdiffusiveConfig,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            dt: 1.0,
            delta: None,
            nts: NtsConfig::default(),
            subdiffusive: SubdiffusiveConfig::default(),
        }
    }
}

/// Boxplot statistics of one parameter over the successful replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary {
    pub min: f64,
    pub q10: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q90: f64,
    pub max: f64,
    pub mean: f64,
    pub sd: f64,
    /// `sd / sqrt(n)`.
    pub standard_error: f64,
}

impl ParameterSummary {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let sd = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self {
            min: v[0],
            q10: quantile(&v, 0.10),
            q25: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q75: quantile(&v, 0.75),
            q90: quantile(&v, 0.90),
            max: v[v.len() - 1],
            mean,
            sd,
            standard_error: sd / n.sqrt(),
        })
    }

    /// `q10 <= value <= q90`.
    pub fn brackets(&self, value: f64) -> bool {
        self.q10 <= value && value <= self.q90
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationEstimate {
    pub replication: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationFailure {
    pub replication: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub kind: EstimatorKind,
    pub true_params: ModelParams,
    pub n_reps: usize,
    pub path_len: usize,
    pub master_seed: u64,
    pub n_ok: usize,
    pub n_failed: usize,
    pub alpha: Option<ParameterSummary>,
    pub lambda: Option<ParameterSummary>,
    pub beta: Option<ParameterSummary>,
    pub estimates: Vec<ReplicationEstimate>,
    pub failures: Vec<ReplicationFailure>,
}

fn one_replication(
    kind: EstimatorKind,
    params: ModelParams,
    grid: &Arc<TimeGrid>,
    delta: f64,
    cfg: &ValidationConfig,
    mut stream: RandomStream,
) -> Result<EstimationReport> {
    match kind {
        EstimatorKind::Nts => {
            let path = simulate_nts(params, grid, &mut stream);
            let inc = IncrementSeries::from_observations(&path.values, cfg.dt)?;
            estimate_nts(&inc, &cfg.nts)
        }
        EstimatorKind::Subdiffusive => {
            let path = simulate_subdiffusive(params, grid, delta, &mut stream)?;
            estimate_subdiffusive(&path.values, cfg.dt, &cfg.subdiffusive)
        }
    }
}

/// Simulates `n_reps` trajectories of `path_len` observations, estimates each,
/// and summarizes the estimates. Replication `r` uses stream `(master_seed, r)`;
/// failed fits are counted and excluded.
pub fn validate_estimator(
    kind: EstimatorKind,
    true_params: ModelParams,
    n_reps: usize,
    path_len: usize,
    master_seed: u64,
    cfg: &ValidationConfig,
) -> Result<ValidationSummary> {
    true_params.validate()?;
    if n_reps < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 replications, got {n_reps}")));
    }
    let grid = Arc::new(TimeGrid::regular(cfg.dt, path_len)?);
    let delta = cfg.delta.unwrap_or_else(|| default_delta(&grid));
    let outcomes: Vec<Result<EstimationReport>> = (0..n_reps)
        .into_par_iter()
        .map(|r| {
            let stream = RandomStream::new(master_seed, r as u64);
            one_replication(kind, true_params, &grid, delta, cfg, stream)
        })
        .collect();

    let mut estimates = Vec::new();
    let mut failures = Vec::new();
    for (r, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(rep) => estimates.push(ReplicationEstimate {
                replication: r,
                alpha: rep.alpha_hat,
                lambda: rep.lambda_hat,
                beta: rep.beta_hat,
            }),
            Err(e) => failures.push(ReplicationFailure {
                replication: r,
                error: e.to_string(),
            }),
        }
    }
    let column = |f: fn(&ReplicationEstimate) -> f64| estimates.iter().map(f).collect::<Vec<_>>();
    Ok(ValidationSummary {
        kind,
        true_params,
        n_reps,
        path_len,
        master_seed,
        n_ok: estimates.len(),
        n_failed: failures.len(),
        alpha: ParameterSummary::from_values(&column(|e| e.alpha)),
        lambda: ParameterSummary::from_values(&column(|e| e.lambda)),
        beta: ParameterSummary::from_values(&column(|e| e.beta)),
        estimates,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 5.0);
        assert!((quantile(&v, 0.1) - 1.4).abs() < 1e-12);
        let s = ParameterSummary::from_values(&[2.0, 1.0]).unwrap();
        assert_eq!(s.median, 1.5);
        assert!(s.brackets(1.5));
    }

    #[test]
    fn two_replications_are_well_formed() {
        let p = ModelParams::new(0.26, 6.0, 0.11).unwrap();
        let s = validate_estimator(EstimatorKind::Nts, p, 2, 200, 9, &ValidationConfig::default()).unwrap();
        assert_eq!(s.n_ok + s.n_failed, 2);
        if let Some(a) = &s.alpha {
            assert!(a.min <= a.q10 && a.q10 <= a.median && a.median <= a.q90 && a.q90 <= a.max);
        }
    }

    #[test]
    fn single_replication_rejected() {
        let p = ModelParams::new(0.4, 0.2, 0.0).unwrap();
        assert!(validate_estimator(EstimatorKind::Subdiffusive, p, 1, 100, 1, &ValidationConfig::default()).is_err());
    }
}
