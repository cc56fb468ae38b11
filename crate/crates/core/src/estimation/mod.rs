//! Parameter estimation for the two subordinated models.
//!
//! * [`estimate_nts`]: least-squares match of the empirical Laplace transform of
//!   the increments to the analytic transform of `Y_T`.
//! * [`estimate_subdiffusive`]: split the series into constant periods and a
//!   motion component, fit the waiting times for `(alpha, lambda)` and take
//!   `beta` from the motion increments.

mod nts_fit;
pub mod simplex;
mod validation;
mod waiting;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use nts_fit::{empirical_laplace, estimate_nts, fit_nts_transform, z_domain_edge, NtsConfig};
pub use validation::{quantile, validate_estimator, ParameterSummary, ValidationConfig, ValidationSummary};
pub use waiting::{
    decompose_constant_periods, estimate_from_tail, estimate_subdiffusive, fit_jump_counts, fit_tail_survival,
    fit_waiting_jumps, fit_waiting_tail, run_length_probabilities, Decomposition, JumpFit, SubdiffusiveConfig, TailFit,
    TailMethod,
};

/// First differences of an equally spaced series.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSeries {
    values: Vec<f64>,
    dt: f64,
}

impl IncrementSeries {
    pub fn new(values: Vec<f64>, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("sampling step must be positive, got {dt}")));
        }
        if values.is_empty() {
            return Err(Error::InvalidParameter("increment series is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("increment series contains non-finite values".into()));
        }
        Ok(Self { values, dt })
    }

    /// Increments `y[i+1] - y[i]` of observations taken every `dt`.
    pub fn from_observations(y: &[f64], dt: f64) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::InvalidParameter("at least two observations are needed".into()));
        }
        Self::new(y.windows(2).map(|w| w[1] - w[0]).collect(), dt)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Sample variance with the `n - 1` denominator; zero for a single value.
    pub fn variance(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Nts,
    Subdiffusive,
}

/// The fitting design actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FitDesign {
    ZGrid {
        z_max: f64,
        n_points: usize,
        /// Grid refinement rounds performed.
        rounds: usize,
    },
    TailWindow {
        /// Smallest waiting time included in the tail regression.
        cutoff: f64,
        n_tail_points: usize,
        n_waiting_times: usize,
        epsilon: f64,
    },
    RunLengths {
        /// Shortest waiting time entering the likelihood.
        min_run: f64,
        n_runs: f64,
        epsilon: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Index of the winning multi-start point, if a multi-start was run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winning_start: Option<usize>,
    pub feasible_starts: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub method: EstimatorKind,
    pub alpha_hat: f64,
    pub lambda_hat: f64,
    pub beta_hat: f64,
    pub objective: f64,
    pub design: FitDesign,
    pub diagnostics: Diagnostics,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increments_from_observations() {
        let inc = IncrementSeries::from_observations(&[1.0, 3.0, 2.0, 2.0], 0.5).unwrap();
        assert_eq!(inc.values(), &[2.0, -1.0, 0.0]);
        assert_eq!(inc.dt(), 0.5);
        assert!((inc.mean() - 1.0 / 3.0).abs() < 1e-15);
        assert!(IncrementSeries::from_observations(&[1.0], 1.0).is_err());
        assert!(IncrementSeries::new(vec![1.0], 0.0).is_err());
        assert!(IncrementSeries::new(vec![f64::NAN], 1.0).is_err());
    }
}
