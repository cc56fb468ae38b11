use serde::{Deserialize, Serialize};

use super::simplex::{nelder_mead, SimplexOptions, SimplexResult};
use super::{Diagnostics, EstimationReport, EstimatorKind, FitDesign};
use crate::analytics::quad::{integrate, QuadConfig};
use crate::error::{Error, Result};

/// Bounds applied to the raw regression estimate of alpha.
const ALPHA_FLOOR: f64 = 1e-6;
const ALPHA_CEIL: f64 = 1.0 - 1e-6;

/// How `(alpha, lambda)` are read off the waiting times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    /// Maximum likelihood for the run lengths produced by jumps of the subordinator
    /// seen on the sampling grid.
    JumpLikelihood,
    /// Least squares of the log empirical survival on `(-x, -ln x, 1)` over the tail window.
    SurvivalRegression,
}

impl TailMethod {
    pub fn cli_name(self) -> &'static str {
        match self {
            TailMethod::JumpLikelihood => "jump-likelihood",
            TailMethod::SurvivalRegression => "survival-regression",
        }
    }
}

impl std::str::FromStr for TailMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jump-likelihood" => Ok(TailMethod::JumpLikelihood),
            "survival-regression" => Ok(TailMethod::SurvivalRegression),
            other => Err(Error::Parse(format!(
                "unknown tail method '{other}', expected jump-likelihood or survival-regression"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubdiffusiveConfig {
    pub tail_method: TailMethod,
    /// Consecutive observations closer than this count as one constant period.
    pub epsilon: f64,
    /// Fewer constant periods than this means the series has no subdiffusive signature.
    pub min_runs: usize,
    /// Fraction of the largest waiting times used in the tail regression
    /// (survival regression only; the likelihood uses every waiting time).
    pub tail_fraction: f64,
    pub min_tail_points: usize,
}

impl Default for SubdiffusiveConfig {
    fn default() -> Self {
        Self {
            tail_method: TailMethod::JumpLikelihood,
            epsilon: 0.0,
            min_runs: 10,
            tail_fraction: 0.3,
            min_tail_points: 10,
        }
    }
}

/// A series split into constant periods and the motion between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Durations of the maximal constant runs, `run length * dt`.
    pub waiting_times: Vec<f64>,
    /// One value per run (its first value) plus every non-constant point.
    pub motion_series: Vec<f64>,
    /// Number of original observations each motion point stands for.
    pub run_lengths: Vec<usize>,
    pub tolerance: f64,
    pub dt: f64,
}

impl Decomposition {
    /// Expands every motion point back over its run.
    pub fn reassemble(&self) -> Vec<f64> {
        self.motion_series
            .iter()
            .zip(&self.run_lengths)
            .flat_map(|(&v, &k)| std::iter::repeat_n(v, k))
            .collect()
    }

    pub fn original_len(&self) -> usize {
        self.run_lengths.iter().sum()
    }
}

pub fn decompose_constant_periods(series: &[f64], dt: f64, epsilon: f64, min_runs: usize) -> Result<Decomposition> {
    if series.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "decomposition needs at least 3 observations, got {}",
            series.len()
        )));
    }
    if !(dt > 0.0) || !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and epsilon >= 0, got dt={dt}, epsilon={epsilon}"
        )));
    }
    let mut waiting_times = Vec::new();
    let mut motion_series = Vec::new();
    let mut run_lengths = Vec::new();
    let mut i = 0;
    while i < series.len() {
        let mut j = i + 1;
        while j < series.len() && (series[j] - series[j - 1]).abs() <= epsilon {
            j += 1;
        }
        let k = j - i;
        if k >= 2 {
            waiting_times.push(k as f64 * dt);
        }
        motion_series.push(series[i]);
        run_lengths.push(k);
        i = j;
    }
    if waiting_times.len() < min_runs {
        return Err(Error::NoConstantPeriods {
            found: waiting_times.len(),
            required: min_runs,
        });
    }
    Ok(Decomposition {
        waiting_times,
        motion_series,
        run_lengths,
        tolerance: epsilon,
        dt,
    })
}

/// Result of the regression `ln S(x) = -lambda x - alpha ln x + ln C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub alpha: f64,
    pub lambda: f64,
    pub log_c: f64,
    /// Unclamped regression coefficients.
    pub raw_alpha: f64,
    pub raw_lambda: f64,
    pub cutoff: f64,
    pub n_points: usize,
    /// Sum of squared log residuals.
    pub sse: f64,
}

/// Least squares for an `n x 3` design via Householder QR.
fn lstsq3(rows: &[[f64; 3]], y: &[f64]) -> Option<[f64; 3]> {
    let n = rows.len();
    let mut a: Vec<[f64; 3]> = rows.to_vec();
    let mut b = y.to_vec();
    for col in 0..3 {
        let norm = (col..n).map(|r| a[r][col] * a[r][col]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let alpha = if a[col][col] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (col..n).map(|r| a[r][col]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in col..3 {
            let dot: f64 = (col..n).map(|r| v[r - col] * a[r][c]).sum();
            let f = 2.0 * dot / vnorm2;
            for r in col..n {
                a[r][c] -= f * v[r - col];
            }
        }
        let dot: f64 = (col..n).map(|r| v[r - col] * b[r]).sum();
        let f = 2.0 * dot / vnorm2;
        for r in col..n {
            b[r] -= f * v[r - col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut s = b[i];
        for j in i + 1..3 {
            s -= a[i][j] * x[j];
        }
        if a[i][i].abs() < 1e-300 {
            return None;
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// Regresses log survival values on `(-x, -ln x, 1)`; alpha is clamped to `(0, 1)`
/// and lambda to `[0, inf)`.
pub fn fit_tail_survival(xs: &[f64], survival: &[f64]) -> Result<TailFit> {
    if xs.len() != survival.len() {
        return Err(Error::InvalidParameter("abscissae and survival values differ in length".into()));
    }
    if xs.iter().any(|&x| !(x > 0.0)) || survival.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
        return Err(Error::InvalidParameter("tail points need x > 0 and survival in (0, 1]".into()));
    }
    let mut distinct: Vec<f64> = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Fit(format!(
            "tail has {} distinct waiting times, at least 3 required",
            distinct.len()
        )));
    }
    let rows: Vec<[f64; 3]> = xs.iter().map(|&x| [-x, -x.ln(), 1.0]).collect();
    let ly: Vec<f64> = survival.iter().map(|s| s.ln()).collect();
    let [lambda, alpha, log_c] =
        lstsq3(&rows, &ly).ok_or_else(|| Error::Fit("tail regression is rank deficient".into()))?;
    let sse = rows
        .iter()
        .zip(&ly)
        .map(|(r, y)| (y - (r[0] * lambda + r[1] * alpha + log_c)).powi(2))
        .sum();
    Ok(TailFit {
        alpha: alpha.clamp(ALPHA_FLOOR, ALPHA_CEIL),
        lambda: lambda.max(0.0),
        log_c,
        raw_alpha: alpha,
        raw_lambda: lambda,
        cutoff: distinct[0],
        n_points: xs.len(),
        sse,
    })
}

/// Tail regression on the empirical survival `#{w >= x} / n` of the largest waiting times.
pub fn fit_waiting_tail(waiting_times: &[f64], cfg: &SubdiffusiveConfig) -> Result<TailFit> {
    let n = waiting_times.len();
    if n < 10 {
        return Err(Error::Fit(format!("{n} waiting times, at least 10 required")));
    }
    let mut w = waiting_times.to_vec();
    w.sort_by(f64::total_cmp);
    let tail = ((cfg.tail_fraction * n as f64).ceil() as usize).max(cfg.min_tail_points).min(n);
    let cutoff = w[n - tail];
    let mut xs = Vec::new();
    let mut surv = Vec::new();
    let mut i = n - tail;
    // step back so the cutoff value's whole tie group is counted
    while i > 0 && w[i - 1] == cutoff {
        i -= 1;
    }
    while i < n {
        let x = w[i];
        xs.push(x);
        surv.push((n - i) as f64 / n as f64);
        while i < n && w[i] == x {
            i += 1;
        }
    }
    if xs.len() < 3 {
        return Err(Error::Fit(format!(
            "tail above {cutoff} has {} distinct waiting times, at least 3 required",
            xs.len()
        )));
    }
    fit_tail_survival(&xs, &surv)
}

/// Jump sizes follow the Levy density `u^(-alpha-1) exp(-lambda u)`. A jump of size
/// `u` at a uniformly random grid offset covers `k` sampling points with probability
/// `tent_k(u / dt)`, the unit hat function centred at `k`.
struct RunLengthLaw {
    alpha: f64,
    /// `lambda * dt`.
    mu: f64,
    /// Reference scale, the left edge of the shortest run's support.
    scale: f64,
}

impl RunLengthLaw {
    const CFG: QuadConfig = QuadConfig {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_intervals: 200,
    };

    fn new(alpha: f64, mu: f64, min_steps: usize) -> Self {
        Self {
            alpha,
            mu,
            scale: (min_steps - 1) as f64,
        }
    }

    /// Levy density in steps, divided by its value at `scale`.
    fn density(&self, v: f64) -> f64 {
        ((-self.alpha - 1.0) * (v / self.scale).ln() - self.mu * (v - self.scale)).exp()
    }

    /// Unnormalized probability of a run of exactly `k` points.
    fn mass(&self, k: usize) -> Result<f64> {
        let k = k as f64;
        let up = integrate(|v| self.density(v) * (v - k + 1.0), k - 1.0, k, Self::CFG)?;
        let down = integrate(|v| self.density(v) * (k + 1.0 - v), k, k + 1.0, Self::CFG)?;
        Ok(up.value + down.value)
    }

    /// Unnormalized probability of a run of at least `min_steps` points.
    fn at_least_min(&self) -> Result<f64> {
        let c = self.scale;
        let ramp = integrate(|v| self.density(v) * (v - c), c, c + 1.0, Self::CFG)?;
        let b = c + 1.0;
        // u = b e^s
        let a = self.alpha;
        let mb = self.mu * b;
        let s_max = if mb > 0.0 { (1.0 + 40.0 / mb).ln() } else { f64::INFINITY }.min(40.0 / a);
        let tail = integrate(|s| (-a * s - mb * s.exp_m1()).exp(), 0.0, s_max, Self::CFG)?;
        Ok(ramp.value + b * self.density(b) * tail.value)
    }
}

/// Probabilities of runs of `min_steps..=max_steps` points among runs of at least
/// `min_steps` points (`min_steps >= 2`).
pub fn run_length_probabilities(
    alpha: f64,
    lambda: f64,
    dt: f64,
    min_steps: usize,
    max_steps: usize,
) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0 && lambda >= 0.0 && dt > 0.0) || min_steps < 2 || max_steps < min_steps {
        return Err(Error::InvalidParameter(format!(
            "run-length law needs 0 < alpha < 1, lambda >= 0, dt > 0, 2 <= min <= max; got \
             alpha={alpha}, lambda={lambda}, dt={dt}, steps {min_steps}..={max_steps}"
        )));
    }
    let law = RunLengthLaw::new(alpha, lambda * dt, min_steps);
    let total = law.at_least_min()?;
    (min_steps..=max_steps).map(|k| Ok(law.mass(k)? / total)).collect()
}

/// Maximum-likelihood fit of the run-length law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpFit {
    pub alpha: f64,
    pub lambda: f64,
    pub neg_log_likelihood: f64,
    /// Shortest run length, in sampling steps, entering the likelihood.
    pub min_steps: usize,
    /// Total weight of the runs.
    pub n_runs: f64,
    pub iterations: usize,
    pub winning_start: usize,
    pub feasible_starts: usize,
    pub converged: bool,
}

fn decode_jump(x: &[f64; 2]) -> Option<(f64, f64)> {
    if !(x[0].abs() <= 30.0 && x[1] >= -40.0 && x[1] <= 10.0) {
        return None;
    }
    Some((1.0 / (1.0 + (-x[0]).exp()), x[1].exp()))
}

/// Fits `(alpha, lambda)` to weighted run lengths; `steps[i]` points observed `counts[i]` times.
pub fn fit_jump_counts(steps: &[usize], counts: &[f64], dt: f64) -> Result<JumpFit> {
    if steps.len() != counts.len() || steps.is_empty() {
        return Err(Error::InvalidParameter("run lengths and counts must be non-empty and match".into()));
    }
    if !(dt > 0.0) || counts.iter().any(|&c| !(c >= 0.0 && c.is_finite())) {
        return Err(Error::InvalidParameter("need dt > 0 and finite non-negative counts".into()));
    }
    let min_steps = *steps.iter().min().expect("non-empty");
    if min_steps < 2 {
        return Err(Error::InvalidParameter("a run has at least 2 points".into()));
    }
    let used: Vec<(usize, f64)> = steps.iter().copied().zip(counts.iter().copied()).filter(|&(_, c)| c > 0.0).collect();
    let mut distinct: Vec<usize> = used.iter().map(|&(k, _)| k).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Fit(format!(
            "{} distinct run lengths, at least 3 required",
            distinct.len()
        )));
    }
    let n_runs: f64 = used.iter().map(|&(_, c)| c).sum();
    let nll = |x: &[f64; 2]| -> f64 {
        let Some((alpha, mu)) = decode_jump(x) else {
            return f64::INFINITY;
        };
        let law = RunLengthLaw::new(alpha, mu, min_steps);
        let Ok(total) = law.at_least_min() else {
            return f64::INFINITY;
        };
        let mut sum = 0.0;
        for &(k, c) in &used {
            match law.mass(k) {
                Ok(m) if m > 0.0 => sum -= c * (m / total).ln(),
                _ => return f64::INFINITY,
            }
        }
        sum
    };
    let opts = SimplexOptions::default();
    let mut iterations = 0;
    let mut feasible_starts = 0;
    let mut best: Option<(usize, SimplexResult<2>)> = None;
    let mut k = 0;
    for &a0 in &[0.2, 0.5, 0.8] {
        for &m0 in &[0.01, 0.1, 1.0] {
            let x0 = [(a0 / (1.0 - a0) as f64).ln(), (m0 as f64).ln()];
            let r = nelder_mead(nll, x0, [0.5, 0.5], opts);
            iterations += r.iterations;
            if r.f.is_finite() {
                feasible_starts += 1;
                if best.as_ref().is_none_or(|(_, b)| r.f < b.f) {
                    best = Some((k, r));
                }
            }
            k += 1;
        }
    }
    let (winning_start, mut best) =
        best.ok_or_else(|| Error::Optimization("run-length likelihood is not finite at any start".into()))?;
    for _ in 0..3 {
        let r = nelder_mead(nll, best.x, [0.05, 0.05], opts);
        iterations += r.iterations;
        let improved = best.f - r.f > opts.ftol * (best.f.abs() + opts.ftol);
        if r.f <= best.f {
            best = r;
        }
        if !improved {
            break;
        }
    }
    let (alpha, mu) = decode_jump(&best.x).expect("finite objective implies a decodable point");
    Ok(JumpFit {
        alpha,
        lambda: mu / dt,
        neg_log_likelihood: best.f,
        min_steps,
        n_runs,
        iterations,
        winning_start,
        feasible_starts,
        converged: best.converged,
    })
}

/// Run-length likelihood on waiting times that are whole multiples of `dt`.
pub fn fit_waiting_jumps(waiting_times: &[f64], dt: f64) -> Result<JumpFit> {
    if waiting_times.len() < 10 {
        return Err(Error::Fit(format!("{} waiting times, at least 10 required", waiting_times.len())));
    }
    let mut steps: Vec<usize> = waiting_times.iter().map(|w| (w / dt).round() as usize).collect();
    steps.sort_unstable();
    let mut ks = Vec::new();
    let mut counts = Vec::new();
    for chunk in steps.chunk_by(|a, b| a == b) {
        ks.push(chunk[0]);
        counts.push(chunk.len() as f64);
    }
    fit_jump_counts(&ks, &counts, dt)
}

fn motion_drift(motion: &[f64]) -> Result<f64> {
    if motion.len() < 2 {
        return Err(Error::Fit("motion component has fewer than two points".into()));
    }
    Ok((motion[motion.len() - 1] - motion[0]) / (motion.len() - 1) as f64)
}

fn tail_report(fit: &TailFit, beta: f64, n_waiting: usize, epsilon: f64) -> EstimationReport {
    EstimationReport {
        method: EstimatorKind::Subdiffusive,
        alpha_hat: fit.alpha,
        lambda_hat: fit.lambda,
        beta_hat: beta,
        objective: fit.sse,
        design: FitDesign::TailWindow {
            cutoff: fit.cutoff,
            n_tail_points: fit.n_points,
            n_waiting_times: n_waiting,
            epsilon,
        },
        diagnostics: Diagnostics {
            iterations: 1,
            winning_start: None,
            feasible_starts: 1,
            converged: true,
        },
    }
}

/// Decomposition estimator: waiting-time tail for `(alpha, lambda)`, mean motion
/// increment per operational step for `beta`.
pub fn estimate_subdiffusive(series: &[f64], dt: f64, cfg: &SubdiffusiveConfig) -> Result<EstimationReport> {
    let d = decompose_constant_periods(series, dt, cfg.epsilon, cfg.min_runs)?;
    let beta = motion_drift(&d.motion_series)?;
    match cfg.tail_method {
        TailMethod::SurvivalRegression => {
            let fit = fit_waiting_tail(&d.waiting_times, cfg)?;
            Ok(tail_report(&fit, beta, d.waiting_times.len(), cfg.epsilon))
        }
        TailMethod::JumpLikelihood => {
            let fit = fit_waiting_jumps(&d.waiting_times, dt)?;
            Ok(jump_report(&fit, beta, dt, cfg.epsilon))
        }
    }
}

fn jump_report(fit: &JumpFit, beta: f64, dt: f64, epsilon: f64) -> EstimationReport {
    EstimationReport {
        method: EstimatorKind::Subdiffusive,
        alpha_hat: fit.alpha,
        lambda_hat: fit.lambda,
        beta_hat: beta,
        objective: fit.neg_log_likelihood,
        design: FitDesign::RunLengths {
            min_run: fit.min_steps as f64 * dt,
            n_runs: fit.n_runs,
            epsilon,
        },
        diagnostics: Diagnostics {
            iterations: fit.iterations,
            winning_start: Some(fit.winning_start),
            feasible_starts: fit.feasible_starts,
            converged: fit.converged,
        },
    }
}

/// The same estimator fed directly with tail survival points and a motion series.
pub fn estimate_from_tail(xs: &[f64], survival: &[f64], motion: &[f64]) -> Result<EstimationReport> {
    let fit = fit_tail_survival(xs, survival)?;
    let beta = motion_drift(motion)?;
    Ok(tail_report(&fit, beta, xs.len(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_traced_decomposition() {
        let d = decompose_constant_periods(&[1.0, 1.0, 1.0, 2.0, 2.0, 5.0], 1.0, 0.0, 1).unwrap();
        assert_eq!(d.waiting_times, vec![3.0, 2.0]);
        assert_eq!(d.motion_series, vec![1.0, 2.0, 5.0]);
        assert_eq!(d.run_lengths, vec![3, 2, 1]);
        assert_eq!(d.reassemble(), vec![1.0, 1.0, 1.0, 2.0, 2.0, 5.0]);
    }

    #[test]
    fn monotone_series_has_no_constant_periods() {
        let s: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert!(matches!(
            decompose_constant_periods(&s, 1.0, 0.0, 10),
            Err(Error::NoConstantPeriods { found: 0, required: 10 })
        ));
    }

    #[test]
    fn tolerance_merges_small_moves() {
        let s = [0.0, 0.01, 0.02, 1.0, 1.0, 3.0];
        let d = decompose_constant_periods(&s, 0.5, 0.05, 1).unwrap();
        assert_eq!(d.waiting_times, vec![1.5, 1.0]);
        assert_eq!(d.original_len(), 6);
    }

    #[test]
    fn noiseless_survival_is_recovered() {
        let (a, l, c): (f64, f64, f64) = (0.4, 0.2, 0.7);
        let xs: Vec<f64> = (0..25).map(|i| 5.0 + 2.0 * i as f64).collect();
        let s: Vec<f64> = xs.iter().map(|&x| c * (-l * x).exp() * x.powf(-a)).collect();
        let f = fit_tail_survival(&xs, &s).unwrap();
        assert!((f.alpha - a).abs() < 1e-6 && (f.lambda - l).abs() < 1e-6);
        assert!((f.log_c - c.ln()).abs() < 1e-6);
    }

    #[test]
    fn equal_waiting_times_are_degenerate() {
        assert!(matches!(
            fit_waiting_tail(&[4.0; 30], &SubdiffusiveConfig::default()),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn clamping() {
        // survival rising in x forces a negative alpha
        let xs = [1.0, 2.0, 3.0, 4.0];
        let s = [0.1, 0.2, 0.3, 0.4];
        let f = fit_tail_survival(&xs, &s).unwrap();
        assert!(f.alpha > 0.0 && f.alpha < 1.0);
        assert!(f.lambda >= 0.0);
    }

    #[test]
    fn drift_from_motion() {
        let motion: Vec<f64> = (0..20).map(|i| 0.25 * i as f64).collect();
        let xs = [3.0, 4.0, 6.0, 9.0];
        let s: Vec<f64> = xs.iter().map(|&x: &f64| (-0.1 * x).exp() * x.powf(-0.5)).collect();
        let r = estimate_from_tail(&xs, &s, &motion).unwrap();
        assert!((r.beta_hat - 0.25).abs() < 1e-12);
        assert!((r.alpha_hat - 0.5).abs() < 1e-8);
    }

    #[test]
    fn run_length_law_normalizes() {
        let p = run_length_probabilities(0.4, 0.2, 1.0, 2, 400).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(p.windows(2).all(|w| w[1] < w[0]));
        // only lambda * dt matters once times are in steps
        let q = run_length_probabilities(0.4, 0.4, 0.5, 2, 10).unwrap();
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn run_length_tail_tends_to_levy_tail() {
        // far from the grid scale, P(K = k) ~ k^(-alpha-1) exp(-lambda k dt)
        let (a, l) = (0.3, 0.05);
        let p = run_length_probabilities(a, l, 1.0, 2, 400).unwrap();
        let ratio = |k: usize| p[k - 2] / ((k as f64).powf(-a - 1.0) * (-l * k as f64).exp());
        assert!((ratio(300) / ratio(200) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn noiseless_run_lengths_are_recovered() {
        for &(a, l) in &[(0.4, 0.2), (0.7, 1.0), (0.2, 0.05)] {
            let k_max = 2 + (40.0 / l) as usize;
            let p = run_length_probabilities(a, l, 1.0, 2, k_max).unwrap();
            let ks: Vec<usize> = (2..=k_max).collect();
            let counts: Vec<f64> = p.iter().map(|q| 1e4 * q).collect();
            let f = fit_jump_counts(&ks, &counts, 1.0).unwrap();
            assert!((f.alpha - a).abs() < 1e-4, "alpha {} vs {a}", f.alpha);
            assert!((f.lambda - l).abs() < 1e-4, "lambda {} vs {l}", f.lambda);
        }
    }

    #[test]
    fn tail_method_names() {
        for m in [TailMethod::JumpLikelihood, TailMethod::SurvivalRegression] {
            assert_eq!(m.cli_name().parse::<TailMethod>().unwrap(), m);
        }
        assert!("mle".parse::<TailMethod>().is_err());
    }
}
