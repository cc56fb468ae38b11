use serde::{Deserialize, Serialize};

use super::simplex::{nelder_mead, SimplexOptions, SimplexResult};
use super::{Diagnostics, EstimationReport, EstimatorKind, FitDesign, IncrementSeries};
use crate::error::{Error, Result};

/// Largest `exp` argument allowed when forming the empirical transform.
const EXP_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NtsConfig {
    /// Number of equally spaced points in `(0, z_max]`.
    pub n_z: usize,
    /// Upper end of the z-grid before the domain cap; `None` means `1 / std(increments)`.
    pub z_max: Option<f64>,
    /// The grid stops at this fraction of the transform's domain edge at the current estimate.
    /// Below one half, `exp(-z dy)` has finite variance.
    pub domain_fraction: f64,
    /// Maximum number of grid refinement rounds.
    pub max_rounds: usize,
    pub alpha_starts: Vec<f64>,
    pub lambda_starts: Vec<f64>,
    pub max_iter: usize,
    pub ftol: f64,
    pub min_length: usize,
}

impl Default for NtsConfig {
    fn default() -> Self {
        Self {
            n_z: 50,
            z_max: None,
            domain_fraction: 0.45,
            max_rounds: 4,
            alpha_starts: vec![0.15, 0.35, 0.55, 0.75],
            lambda_starts: vec![0.1, 1.0, 10.0],
            max_iter: 500,
            ftol: 1e-10,
            min_length: 30,
        }
    }
}

/// `phi(z) = mean(exp(-z dy))` over the increments.
pub fn empirical_laplace(inc: &IncrementSeries, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(1.0);
    }
    let min = inc.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let max = inc.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if -z * min > EXP_LIMIT || -z * max > EXP_LIMIT {
        return Err(Error::Overflow(format!(
            "exp(-z dy) overflows at z = {z} for increments in [{min}, {max}]; use a smaller z-grid"
        )));
    }
    Ok(inc.values().iter().map(|v| (-z * v).exp()).sum::<f64>() / inc.len() as f64)
}

/// Positive root of `lambda + beta z - z^2/2`, the edge of the real domain of the transform.
pub fn z_domain_edge(lambda: f64, beta: f64) -> f64 {
    beta + (beta * beta + 2.0 * lambda).sqrt()
}

/// Internal coordinates: `alpha = logistic(u)`, `lambda = exp(v)`, `beta`.
fn decode(x: &[f64; 3]) -> (f64, f64, f64) {
    (1.0 / (1.0 + (-x[0]).exp()), x[1].exp(), x[2])
}

fn encode(alpha: f64, lambda: f64, beta: f64) -> [f64; 3] {
    [(alpha / (1.0 - alpha)).ln(), lambda.ln(), beta]
}

struct Objective<'a> {
    z: &'a [f64],
    phi: &'a [f64],
    dt: f64,
}

impl Objective<'_> {
    /// Squared transform distance plus a penalty for grid points outside the domain.
    fn value(&self, x: &[f64; 3]) -> f64 {
        let (a, l, b) = decode(x);
        if !(a > 0.0 && a < 1.0 && l > 0.0 && l.is_finite()) {
            return f64::INFINITY;
        }
        let la = l.powf(a);
        let mut sum = 0.0;
        let mut penalty = 0.0;
        for (&z, &phi) in self.z.iter().zip(self.phi) {
            let base = l + b * z - 0.5 * z * z;
            if base < 0.0 {
                penalty += 1.0 - base;
                continue;
            }
            let r = phi - (self.dt * (la - base.powf(a))).exp();
            sum += r * r;
        }
        sum + 1e3 * penalty
    }

    fn feasible(&self, x: &[f64; 3]) -> bool {
        let (_, l, b) = decode(x);
        self.z.iter().all(|&z| l + b * z - 0.5 * z * z >= 0.0)
    }
}

struct GridFit {
    x: [f64; 3],
    f: f64,
    iterations: usize,
    winning_start: Option<usize>,
    feasible_starts: usize,
    converged: bool,
}

fn polish(obj: &Objective, mut best: SimplexResult<3>, opts: SimplexOptions) -> (SimplexResult<3>, usize) {
    let mut iterations = 0;
    for _ in 0..5 {
        let step = [0.05, 0.05, 0.01 * best.x[2].abs().max(0.01)];
        let r = nelder_mead(|x| obj.value(x), best.x, step, opts);
        iterations += r.iterations;
        let improved = best.f - r.f > opts.ftol * (best.f.abs() + opts.ftol);
        if r.f <= best.f {
            best = SimplexResult {
                iterations: best.iterations,
                ..r
            };
        }
        if !improved {
            break;
        }
    }
    (best, iterations)
}

fn fit_on_grid(obj: &Objective, starts: &[[f64; 3]], cfg: &NtsConfig) -> Result<GridFit> {
    let opts = SimplexOptions {
        max_iter: cfg.max_iter,
        ftol: cfg.ftol,
        xtol: 1e-9,
    };
    let mut iterations = 0;
    let mut best: Option<(usize, SimplexResult<3>)> = None;
    let mut feasible_starts = 0;
    for (k, &x0) in starts.iter().enumerate() {
        let step = [0.5, 0.5, 0.1 * x0[2].abs().max(0.1)];
        let r = nelder_mead(|x| obj.value(x), x0, step, opts);
        iterations += r.iterations;
        if !obj.feasible(&r.x) || !r.f.is_finite() {
            continue;
        }
        feasible_starts += 1;
        if best.as_ref().is_none_or(|(_, b)| r.f < b.f) {
            best = Some((k, r));
        }
    }
    let (k, best) = best.ok_or_else(|| {
        Error::Optimization(format!(
            "none of {} starting points reached a point inside the transform domain",
            starts.len()
        ))
    })?;
    let (r, extra) = polish(obj, best, opts);
    Ok(GridFit {
        x: r.x,
        f: r.f,
        iterations: iterations + extra,
        winning_start: Some(k),
        feasible_starts,
        converged: r.converged,
    })
}

fn multistart(cfg: &NtsConfig, beta0: f64) -> Vec<[f64; 3]> {
    let mut starts = Vec::new();
    for &a in &cfg.alpha_starts {
        for &l in &cfg.lambda_starts {
            starts.push(encode(a, l, beta0));
        }
    }
    starts
}

fn check_config(cfg: &NtsConfig) -> Result<()> {
    if cfg.n_z < 3 {
        return Err(Error::InvalidParameter(format!("z-grid needs at least 3 points, got {}", cfg.n_z)));
    }
    if !(cfg.domain_fraction > 0.0 && cfg.domain_fraction < 1.0) {
        return Err(Error::InvalidParameter("domain fraction must lie in (0, 1)".into()));
    }
    if cfg.alpha_starts.iter().any(|&a| !(a > 0.0 && a < 1.0)) || cfg.lambda_starts.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidParameter("starting values must satisfy 0 < alpha < 1, lambda > 0".into()));
    }
    if cfg.alpha_starts.is_empty() || cfg.lambda_starts.is_empty() {
        return Err(Error::InvalidParameter("at least one starting point is required".into()));
    }
    Ok(())
}

fn report(fit: &GridFit, z_max: f64, n_z: usize, rounds: usize, iterations: usize) -> EstimationReport {
    let (a, l, b) = decode(&fit.x);
    EstimationReport {
        method: EstimatorKind::Nts,
        alpha_hat: a,
        lambda_hat: l,
        beta_hat: b,
        objective: fit.f,
        design: FitDesign::ZGrid {
            z_max,
            n_points: n_z,
            rounds,
        },
        diagnostics: Diagnostics {
            iterations,
            winning_start: fit.winning_start,
            feasible_starts: fit.feasible_starts,
            converged: fit.converged,
        },
    }
}

fn grid(z_max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| z_max * i as f64 / n as f64).collect()
}

/// Fits `(alpha, lambda, beta)` so that `exp(dt (lambda^alpha - (lambda + beta z - z^2/2)^alpha))`
/// matches the given transform values on a fixed z-grid.
pub fn fit_nts_transform(z: &[f64], phi: &[f64], dt: f64, cfg: &NtsConfig) -> Result<EstimationReport> {
    check_config(cfg)?;
    if z.len() != phi.len() || z.len() < 3 {
        return Err(Error::InvalidParameter("z-grid and transform values must match, at least 3 points".into()));
    }
    if z.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter("z-grid points must be positive".into()));
    }
    // small-z expansion ln phi = -m z + v z^2 / 2 gives beta ~ m / v
    let k = z.len().min(5);
    let (mut szz, mut szzz, mut sz4, mut sly, mut slyz) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..k {
        let (zi, ly) = (z[i], phi[i].ln());
        szz += zi * zi;
        szzz += zi.powi(3);
        sz4 += zi.powi(4);
        sly += ly * zi;
        slyz += ly * zi * zi;
    }
    let det = szz * sz4 - szzz * szzz;
    let c1 = (sly * sz4 - slyz * szzz) / det;
    let c2 = (szz * slyz - szzz * sly) / det;
    let beta0 = if c2 > 0.0 && c1.is_finite() { -c1 / (2.0 * c2) } else { 0.0 };
    let obj = Objective { z, phi, dt };
    let fit = fit_on_grid(&obj, &multistart(cfg, beta0), cfg)?;
    let iterations = fit.iterations;
    Ok(report(&fit, z[z.len() - 1], z.len(), 1, iterations))
}

/// Empirical-Laplace-transform least-squares estimate of `(alpha, lambda, beta)`.
pub fn estimate_nts(inc: &IncrementSeries, cfg: &NtsConfig) -> Result<EstimationReport> {
    check_config(cfg)?;
    if inc.len() < cfg.min_length {
        return Err(Error::InvalidParameter(format!(
            "{} increments, at least {} required",
            inc.len(),
            cfg.min_length
        )));
    }
    let var = inc.variance();
    if !(var > 0.0) {
        return Err(Error::Fit("increments have zero variance".into()));
    }
    let extreme = inc.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z_cap = cfg.z_max.unwrap_or(1.0 / var.sqrt());
    if !(z_cap > 0.0) {
        return Err(Error::InvalidParameter(format!("z_max must be positive, got {z_cap}")));
    }
    // keep exp(-z dy) finite on the whole sample
    z_cap = z_cap.min(0.99 * EXP_LIMIT / extreme);
    let beta0 = inc.mean() / var;

    let mut z_max = z_cap;
    let mut rounds = 0;
    let mut iterations = 0;
    let mut starts = multistart(cfg, beta0);
    let mut last: Option<GridFit> = None;
    while rounds < cfg.max_rounds.max(1) {
        rounds += 1;
        let z = grid(z_max, cfg.n_z);
        let phi = z.iter().map(|&zi| empirical_laplace(inc, zi)).collect::<Result<Vec<_>>>()?;
        let obj = Objective { z: &z, phi: &phi, dt: inc.dt() };
        let fit = fit_on_grid(&obj, &starts, cfg)?;
        iterations += fit.iterations;
        let (_, l, b) = decode(&fit.x);
        let next = z_cap.min(cfg.domain_fraction * z_domain_edge(l, b));
        let settled = (next - z_max).abs() <= 0.01 * z_max;
        starts = vec![fit.x];
        last = Some(fit);
        if settled {
            break;
        }
        z_max = next;
    }
    let fit = last.expect("at least one round runs");
    Ok(report(&fit, z_max, cfg.n_z, rounds, iterations))
}
