//! Parameter types shared by the samplers, analytic formulas and estimators.
//!
//! `alpha` is the stability index of the driving one-sided stable motion,
//! `lambda` the exponential tempering rate and `beta` the drift of the
//! arithmetic Brownian motion that is being time-changed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must lie in the open interval (0, 1), got {alpha}"
        )))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "lambda must be finite and non-negative, got {lambda}"
        )))
    }
}

/// Stability index of a totally skewed stable law with Laplace transform
/// `exp(-z^alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    alpha: f64,
}

impl StableParams {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Tempered stable subordinator parameters. `lambda == 0` is the pure stable case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperParams {
    alpha: f64,
    lambda: f64,
}

impl TemperParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_lambda(lambda)?;
        Ok(Self { alpha, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn stable(&self) -> StableParams {
        StableParams { alpha: self.alpha }
    }

    /// `lambda^alpha`, the constant in the Laplace exponent.
    pub fn lambda_pow_alpha(&self) -> f64 {
        self.lambda.powf(self.alpha)
    }

    /// Laplace exponent `(lambda + z)^alpha - lambda^alpha`.
    pub fn laplace_exponent(&self, z: f64) -> f64 {
        (self.lambda + z).powf(self.alpha) - self.lambda_pow_alpha()
    }
}

/// Full model: subordinator parameters plus the ABM drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, lambda: f64, beta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_lambda(lambda)?;
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite, got {beta}"
            )));
        }
        Ok(Self {
            alpha,
            lambda,
            beta,
        })
    }

    /// Re-checks the invariants; useful after deserialization.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.alpha, self.lambda, self.beta).map(|_| ())
    }

    pub fn temper(&self) -> TemperParams {
        TemperParams {
            alpha: self.alpha,
            lambda: self.lambda,
        }
    }

    pub fn stable(&self) -> StableParams {
        StableParams { alpha: self.alpha }
    }
}
