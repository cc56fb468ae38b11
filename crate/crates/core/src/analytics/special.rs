//! Gamma function and the generalized Mittag-Leffler function
//! `E_{a,b}(x) = sum_k x^k / Gamma(a k + b)`.


use crate::error::{Error, Result};

pub use statrs::function::gamma::{gamma, ln_gamma};

/// `1 / Gamma(x)`, zero at the poles `x = 0, -1, -2, ...`.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else if x > 171.0 {
        (-ln_gamma(x)).exp()
    } else {
        1.0 / gamma(x)
    }
}

/// Above this value of `|x|^(1/a)` the exponential asymptotic is used.
const ASYMPTOTIC_SWITCH: f64 = 30.0;
/// Negative arguments switch to the algebraic expansion earlier, where the
/// alternating series starts losing digits.
const NEGATIVE_SWITCH: f64 = 20.0;
const MAX_TERMS: usize = 200_000;

/// `E_{a,b}(x)`.
pub fn mittag_leffler(a: f64, b: f64, x: f64) -> Result<f64> {
    mittag_leffler_scaled(a, b, x, 0.0)
}

/// `exp(-shift) * E_{a,b}(x)`, evaluated without forming `E_{a,b}(x)` itself, so
/// the product stays finite when both factors would overflow/underflow.
pub fn mittag_leffler_scaled(a: f64, b: f64, x: f64, shift: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Mittag-Leffler indices must be positive, got a={a}, b={b}"
        )));
    }
    if x.is_nan() {
        return Err(Error::Domain("Mittag-Leffler argument is NaN".into()));
    }
    if x == 0.0 {
        return Ok(recip_gamma(b) * (-shift).exp());
    }
    let y = x.abs().powf(1.0 / a);
    if x > 0.0 {
        if y >= ASYMPTOTIC_SWITCH && a < 1.0 {
            return Ok(positive_asymptotic(a, b, x, shift));
        }
        return positive_series(a, b, x, shift);
    }
    if a < 1.0 && y > NEGATIVE_SWITCH {
        return Ok(algebraic_tail(a, b, x) * (-shift).exp());
    }
    alternating_series(a, b, x).map(|v| v * (-shift).exp())
}

fn positive_series(a: f64, b: f64, x: f64, shift: f64) -> Result<f64> {
    let lx = x.ln();
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut peaked = false;
    let mut prev = f64::NEG_INFINITY;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let arg = a * kf + b;
        let log_term = kf * lx - ln_gamma(arg) - shift;
        let term = log_term.exp();
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if log_term < prev {
            peaked = true;
        }
        prev = log_term;
        if peaked && term <= 1e-17 * (sum + comp).abs() {
            return Ok(sum + comp);
        }
    }
    Err(Error::Convergence(format!(
        "series for E_({a},{b})({x}) did not converge in {MAX_TERMS} terms"
    )))
}

fn alternating_series(a: f64, b: f64, x: f64) -> Result<f64> {
    let lx = x.abs().ln();
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut max_term: f64 = 0.0;
    let mut peaked = false;
    let mut prev = f64::NEG_INFINITY;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let arg = a * kf + b;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let log_mag = kf * lx - ln_gamma(arg);
        let term = sign * log_mag.exp();
        max_term = max_term.max(term.abs());
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if log_mag < prev {
            peaked = true;
        }
        prev = log_mag;
        let total = sum + comp;
        if peaked && term.abs() <= 1e-17 * total.abs().max(1e-300) {
            if max_term * 1e-15 > 1e-7 * total.abs() {
                return Err(Error::Convergence(format!(
                    "cancellation in the series for E_({a},{b})({x}): largest term {max_term:e}, result {total:e}"
                )));
            }
            return Ok(total);
        }
    }
    Err(Error::Convergence(format!(
        "series for E_({a},{b})({x}) did not converge in {MAX_TERMS} terms"
    )))
}

/// `-sum_{k>=1} x^{-k} / Gamma(b - a k)` truncated at its smallest term.
fn algebraic_tail(a: f64, b: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut best = f64::INFINITY;
    let mut xpow = 1.0;
    for k in 1..400 {
        xpow /= x;
        let term = xpow * recip_gamma(b - a * k as f64);
        if term != 0.0 {
            if term.abs() > best {
                break;
            }
            best = term.abs();
        }
        sum -= term;
    }
    sum
}

fn positive_asymptotic(a: f64, b: f64, x: f64, shift: f64) -> f64 {
    let y = x.powf(1.0 / a);
    let lead = ((1.0 - b) / a * x.ln() + y - shift).exp() / a;
    lead + algebraic_tail(a, b, x) * (-shift).exp()
}
