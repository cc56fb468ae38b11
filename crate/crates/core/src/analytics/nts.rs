//! Normal tempered stable process `Y_T(t) = beta T(t) + B(T(t))`.

use std::f64::consts::PI;

use crate::analytics::quad::{ErrorSlot, LogGridTable};
use crate::analytics::stable::{tempered_density_with, StableDensity};
use crate::analytics::LaplaceQuery;
use crate::error::{Error, Result};
use crate::params::{ModelParams, TemperParams};

/// `E exp(-z Y_T(t)) = exp(t (lambda^alpha - (lambda + beta z - z^2/2)^alpha))`.
pub fn laplace_nts(p: ModelParams, q: LaplaceQuery) -> Result<f64> {
    let z = q.z();
    let base = p.lambda + p.beta * z - 0.5 * z * z;
    if base < 0.0 {
        return Err(Error::Domain(format!(
            "lambda + beta z - z^2/2 = {base:e} < 0 at z = {z}"
        )));
    }
    Ok((q.t() * (p.lambda.powf(p.alpha) - base.powf(p.alpha))).exp())
}

fn require_tempered(p: &ModelParams) -> Result<()> {
    if p.lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain("moments of Y_T are infinite for lambda = 0".into()))
    }
}

/// `E Y_T(t) = beta t alpha lambda^(alpha-1)`.
pub fn mean_nts(p: ModelParams, t: f64) -> Result<f64> {
    require_tempered(&p)?;
    Ok(p.beta * t * p.alpha * p.lambda.powf(p.alpha - 1.0))
}

/// `Cov(Y_T(t), Y_T(s)) = min(s, t) (alpha lambda^(alpha-1) + beta^2 alpha (1-alpha) lambda^(alpha-2))`.
pub fn cov_nts(p: ModelParams, t: f64, s: f64) -> Result<f64> {
    require_tempered(&p)?;
    let (a, l, b) = (p.alpha, p.lambda, p.beta);
    Ok(t.min(s) * (a * l.powf(a - 1.0) + b * b * a * (1.0 - a) * l.powf(a - 2.0)))
}

/// Second moment `E Y_T(t)^2`, a second-order polynomial in `t`.
pub fn msd_nts(p: ModelParams, t: f64) -> Result<f64> {
    let m = mean_nts(p, t)?;
    Ok(m * m + cov_nts(p, t, t)?)
}

pub(crate) fn gaussian_kernel(x: f64, mean: f64, var: f64) -> f64 {
    if var <= 0.0 {
        return 0.0;
    }
    let d = x - mean;
    (-0.5 * d * d / var).exp() / (2.0 * PI * var).sqrt()
}

/// Law of `T(t)` tabulated once on a log-scale quadrature grid.
#[derive(Debug, Clone)]
pub struct TemperedStableLaw {
    params: TemperParams,
    t: f64,
    kernel: StableDensity,
    table: LogGridTable,
}

impl TemperedStableLaw {
    pub fn new(params: TemperParams, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("tempered stable law requires t > 0, got {t}")));
        }
        let kernel = StableDensity::new(params.stable());
        let slot = ErrorSlot::default();
        let scale = if params.lambda_pow_alpha() * t > 1.0 {
            params.alpha() * params.lambda().powf(params.alpha() - 1.0) * t
        } else {
            t.powf(1.0 / params.alpha())
        };
        let table = LogGridTable::build(
            |x| slot.unwrap_or(tempered_density_with(&kernel, params, t, x), 0.0),
            scale,
            0.5,
            1e-10,
        );
        slot.check()?;
        Ok(Self {
            params,
            t,
            kernel,
            table: table?,
        })
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Ok(0.0);
        }
        tempered_density_with(&self.kernel, self.params, self.t, x)
    }

    /// Total tabulated mass; 1 up to quadrature and truncation error.
    pub fn mass(&self) -> f64 {
        self.table.mass()
    }

    /// `E h(T(t))` with the Kronrod/Gauss error estimate.
    pub fn expect<H: FnMut(f64) -> f64>(&self, h: H) -> (f64, f64) {
        self.table.expect(h)
    }

    /// Density of `beta T(t) + B(T(t))` at `x`.
    pub fn subordinated_pdf(&self, beta: f64, x: f64) -> f64 {
        self.table.expect(|s| gaussian_kernel(x, beta * s, s)).0
    }
}

/// Density of `Y_T(t)` from the Gaussian mixture over the law of `T(t)`.
pub fn nts_pdf(p: ModelParams, t: f64, x: f64) -> Result<f64> {
    p.validate()?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("density argument must be finite, got {x}")));
    }
    Ok(TemperedStableLaw::new(p.temper(), t)?.subordinated_pdf(p.beta, x))
}
