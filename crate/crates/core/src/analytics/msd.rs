//! Ensemble-averaged mean squared displacement and its two model fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::TrajectoryEnsemble;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MsdWarning {
    /// An ensemble average over a single trajectory is just one squared displacement.
    InsufficientPaths { n_paths: usize },
}

/// `E (Y(t_0 + lag) - Y(t_0))^2` estimated across trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsdCurve {
    pub lags: Vec<f64>,
    pub values: Vec<f64>,
    pub n_paths: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<MsdWarning>,
}

impl MsdCurve {
    pub fn new(lags: Vec<f64>, values: Vec<f64>, n_paths: usize) -> Result<Self> {
        if lags.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} lags but {} values",
                lags.len(),
                values.len()
            )));
        }
        if lags.windows(2).any(|w| !(w[1] > w[0])) || lags.first().is_some_and(|&l| !(l > 0.0)) {
            return Err(Error::InvalidParameter("lags must be positive and strictly increasing".into()));
        }
        if values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidParameter("MSD values must be non-negative".into()));
        }
        Ok(Self {
            lags,
            values,
            n_paths,
            warnings: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// Ensemble MSD at every grid point after the first, measured from the first.
pub fn empirical_msd(e: &TrajectoryEnsemble) -> MsdCurve {
    let times = e.shared_grid.points();
    let t0 = times[0];
    let n = e.len();
    let mut values = vec![0.0; times.len() - 1];
    for path in &e.paths {
        let y0 = path.values[0];
        for (acc, &y) in values.iter_mut().zip(&path.values[1..]) {
            let d = y - y0;
            *acc += d * d;
        }
    }
    for v in &mut values {
        *v /= n as f64;
    }
    let mut warnings = Vec::new();
    if n < 2 {
        log::warn!("ensemble MSD computed from a single trajectory");
        warnings.push(MsdWarning::InsufficientPaths { n_paths: n });
    }
    MsdCurve {
        lags: times[1..].iter().map(|t| t - t0).collect(),
        values,
        n_paths: n,
        warnings,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MsdModel {
    /// `a t^2 + b t`
    SecondOrderPolynomial,
    /// `c_small t^p_small` at small lags and `c_large t^p_large` at large lags
    TwoRegimePower,
}

impl MsdModel {
    pub fn cli_name(&self) -> &'static str {
        match self {
            MsdModel::SecondOrderPolynomial => "poly2",
            MsdModel::TwoRegimePower => "power2",
        }
    }
}

impl std::str::FromStr for MsdModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly2" | "second_order_polynomial" => Ok(MsdModel::SecondOrderPolynomial),
            "power2" | "two_regime_power" => Ok(MsdModel::TwoRegimePower),
            other => Err(Error::Parse(format!("unknown MSD model '{other}', expected poly2 or power2"))),
        }
    }
}

/// Lag windows `[lo, hi]` for the two power-law regimes. `None` selects the
/// lower and upper quartile of the lag points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RegimeWindows {
    pub small: Option<(f64, f64)>,
    pub large: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsdFit {
    pub model_kind: MsdModel,
    /// `[a, b]` for the polynomial, `[c_small, p_small, c_large, p_large]` for the power law.
    pub coefficients: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_lag: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_window: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub large_window: Option<(f64, f64)>,
    /// Sum of squared residuals: linear for the polynomial, logarithmic for the power law.
    pub residual: f64,
}

impl MsdFit {
    /// Fitted MSD at lag `t`. For the power law, the regime is chosen by `split_lag`.
    pub fn predict(&self, t: f64) -> f64 {
        let c = &self.coefficients;
        match self.model_kind {
            MsdModel::SecondOrderPolynomial => c[0] * t * t + c[1] * t,
            MsdModel::TwoRegimePower => {
                if t <= self.split_lag.unwrap_or(f64::INFINITY) {
                    c[0] * t.powf(c[1])
                } else {
                    c[2] * t.powf(c[3])
                }
            }
        }
    }
}

pub fn fit_msd(curve: &MsdCurve, model: MsdModel) -> Result<MsdFit> {
    fit_msd_with(curve, model, RegimeWindows::default())
}

pub fn fit_msd_with(curve: &MsdCurve, model: MsdModel, windows: RegimeWindows) -> Result<MsdFit> {
    if curve.is_zero() {
        return Err(Error::Fit("MSD curve is identically zero".into()));
    }
    match model {
        MsdModel::SecondOrderPolynomial => fit_polynomial(curve),
        MsdModel::TwoRegimePower => fit_two_regime(curve, windows),
    }
}

/// Non-negative least squares for `a t^2 + b t`.
fn fit_polynomial(curve: &MsdCurve) -> Result<MsdFit> {
    if curve.len() < 4 {
        return Err(Error::Fit(format!("polynomial fit needs at least 4 lags, got {}", curve.len())));
    }
    let (mut s22, mut s21, mut s11, mut sy2, mut sy1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &y) in curve.lags.iter().zip(&curve.values) {
        s22 += t.powi(4);
        s21 += t.powi(3);
        s11 += t * t;
        sy2 += y * t * t;
        sy1 += y * t;
    }
    let det = s22 * s11 - s21 * s21;
    let mut a = (sy2 * s11 - sy1 * s21) / det;
    let mut b = (s22 * sy1 - s21 * sy2) / det;
    if !(det > 0.0) || a < 0.0 || b < 0.0 {
        // the optimum lies on a face of the non-negative quadrant
        let only_b = ((sy1 / s11).max(0.0), 0.0);
        let only_a = (0.0, (sy2 / s22).max(0.0));
        let sse = |a: f64, b: f64| -> f64 {
            curve
                .lags
                .iter()
                .zip(&curve.values)
                .map(|(&t, &y)| (y - a * t * t - b * t).powi(2))
                .sum()
        };
        if sse(only_a.1, 0.0) < sse(0.0, only_b.0) {
            a = only_a.1;
            b = 0.0;
        } else {
            a = 0.0;
            b = only_b.0;
        }
    }
    let residual = curve
        .lags
        .iter()
        .zip(&curve.values)
        .map(|(&t, &y)| (y - a * t * t - b * t).powi(2))
        .sum();
    Ok(MsdFit {
        model_kind: MsdModel::SecondOrderPolynomial,
        coefficients: vec![a, b],
        split_lag: None,
        small_window: None,
        large_window: None,
        residual,
    })
}

/// Ordinary least squares line `y = intercept + slope x`; returns (intercept, slope, sse).
pub(crate) fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (intercept, slope, sse)
}

fn default_windows(curve: &MsdCurve) -> ((f64, f64), (f64, f64)) {
    let n = curve.len();
    let q = (n / 4).max(1);
    let small = (curve.lags[0], curve.lags[q - 1]);
    let large = (curve.lags[n - q], curve.lags[n - 1]);
    (small, large)
}

fn power_fit(curve: &MsdCurve, window: (f64, f64), label: &str) -> Result<(f64, f64, f64)> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = curve
        .lags
        .iter()
        .zip(&curve.values)
        .filter(|(&t, &y)| t >= window.0 && t <= window.1 && y > 0.0)
        .map(|(&t, &y)| (t.ln(), y.ln()))
        .unzip();
    if lx.len() < 6 {
        return Err(Error::Fit(format!(
            "{label} regime [{}, {}] has {} usable lags, at least 6 required",
            window.0,
            window.1,
            lx.len()
        )));
    }
    let (intercept, slope, sse) = line_fit(&lx, &ly);
    if !(slope > 0.0 && slope <= 2.5) {
        return Err(Error::Fit(format!("{label} regime exponent {slope} outside (0, 2.5]")));
    }
    Ok((intercept.exp(), slope, sse))
}

fn fit_two_regime(curve: &MsdCurve, windows: RegimeWindows) -> Result<MsdFit> {
    if curve.len() < 2 {
        return Err(Error::Fit("two-regime fit needs at least 2 lags".into()));
    }
    let (ds, dl) = default_windows(curve);
    let small = windows.small.unwrap_or(ds);
    let large = windows.large.unwrap_or(dl);
    let (c_small, p_small, r_small) = power_fit(curve, small, "small-lag")?;
    let (c_large, p_large, r_large) = power_fit(curve, large, "large-lag")?;
    Ok(MsdFit {
        model_kind: MsdModel::TwoRegimePower,
        coefficients: vec![c_small, p_small, c_large, p_large],
        split_lag: Some(small.1),
        small_window: Some(small),
        large_window: Some(large),
        residual: r_small + r_large,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{PathKind, SamplePath, TimeGrid};
    use std::sync::Arc;

    #[test]
    fn constant_ensemble_is_zero() {
        let grid = Arc::new(TimeGrid::uniform(1.0, 11).unwrap());
        let paths = (0..3)
            .map(|_| SamplePath::new(grid.clone(), vec![2.5; 11], PathKind::Nts).unwrap())
            .collect();
        let e = TrajectoryEnsemble::new(grid, paths, 0).unwrap();
        let c = empirical_msd(&e);
        assert!(c.is_zero());
        assert_eq!(c.len(), 10);
        assert!(c.warnings.is_empty());
        assert!(matches!(fit_msd(&c, MsdModel::TwoRegimePower), Err(Error::Fit(_))));
    }

    #[test]
    fn single_path_warns() {
        let grid = Arc::new(TimeGrid::uniform(1.0, 5).unwrap());
        let p = SamplePath::new(grid.clone(), vec![0.0, 1.0, 2.0, 3.0, 4.0], PathKind::Abm).unwrap();
        let e = TrajectoryEnsemble::new(grid, vec![p], 0).unwrap();
        let c = empirical_msd(&e);
        assert_eq!(c.warnings, vec![MsdWarning::InsufficientPaths { n_paths: 1 }]);
        assert_eq!(c.values, vec![1.0, 4.0, 9.0, 16.0]);
    }

    #[test]
    fn exact_polynomial_recovered() {
        let lags: Vec<f64> = (1..=50).map(|i| i as f64 * 0.3).collect();
        let values = lags.iter().map(|t| 0.37 * t * t + 1.9 * t).collect();
        let c = MsdCurve::new(lags, values, 10).unwrap();
        let f = fit_msd(&c, MsdModel::SecondOrderPolynomial).unwrap();
        assert!((f.coefficients[0] - 0.37).abs() < 1e-8);
        assert!((f.coefficients[1] - 1.9).abs() < 1e-8);
        assert!((f.predict(2.0) - (0.37 * 4.0 + 3.8)).abs() < 1e-8);
    }

    #[test]
    fn polynomial_coefficients_stay_non_negative() {
        let lags: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let values = lags.iter().map(|t| t.sqrt()).collect();
        let c = MsdCurve::new(lags, values, 10).unwrap();
        let f = fit_msd(&c, MsdModel::SecondOrderPolynomial).unwrap();
        assert!(f.coefficients.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn exact_power_law_recovered() {
        let lags: Vec<f64> = (1..=40).map(|i| 10f64.powf(-3.0 + 0.15 * i as f64)).collect();
        let values = lags
            .iter()
            .map(|&t| if t < 0.1 { 2.0 * t.powf(0.7) } else { 0.5 * t })
            .collect();
        let c = MsdCurve::new(lags, values, 10).unwrap();
        let f = fit_msd(&c, MsdModel::TwoRegimePower).unwrap();
        assert!((f.coefficients[1] - 0.7).abs() < 1e-6);
        assert!((f.coefficients[3] - 1.0).abs() < 1e-6);
        assert!((f.coefficients[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn short_regime_rejected() {
        let lags: Vec<f64> = (1..=12).map(|i| i as f64).collect();
        let values = lags.clone();
        let c = MsdCurve::new(lags, values, 10).unwrap();
        assert!(matches!(fit_msd(&c, MsdModel::TwoRegimePower), Err(Error::Fit(_))));
        assert!(fit_msd(&c, MsdModel::SecondOrderPolynomial).is_ok());
    }

    #[test]
    fn model_names() {
        assert_eq!("poly2".parse::<MsdModel>().unwrap(), MsdModel::SecondOrderPolynomial);
        assert_eq!("power2".parse::<MsdModel>().unwrap(), MsdModel::TwoRegimePower);
        assert!("cubic".parse::<MsdModel>().is_err());
    }
}
