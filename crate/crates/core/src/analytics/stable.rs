//! Densities and transforms of the one-sided stable law `U(1)` and of the
//! tempered stable subordinator `T(t)`.
//!
//! `U(1)` has Laplace transform `exp(-z^alpha)`. Its density is computed from
//! the Zolotarev/Kanter integral representation
//!
//! ```text
//! f(x) = k / (pi x) * int_0^pi  y(w) exp(-y(w)) dw,   y(w) = A(w) x^{-k},  k = alpha / (1 - alpha)
//! A(w) = sin(alpha w)^k sin((1 - alpha) w) / sin(w)^{1/(1-alpha)}
//! ```
//!
//! and, far in the right tail, from the convergent series
//! `f(x) = (1/pi) sum_k (-1)^{k+1} Gamma(k alpha + 1) / k! sin(k pi alpha) x^{-k alpha - 1}`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::analytics::quad::{integrate_vec, QuadConfig};
use crate::analytics::LaplaceQuery;
use crate::analytics::special::ln_gamma;
use crate::error::{Error, Result};
use crate::params::{StableParams, TemperParams};

/// `x^alpha` above which the tail series replaces the integral.
const SERIES_SWITCH: f64 = 100.0;

/// Density of `U(1)` for a fixed stability index.
#[derive(Debug, Clone, Copy)]
pub struct StableDensity {
    alpha: f64,
    k: f64,
    rel_tol: f64,
}

impl StableDensity {
    pub fn new(p: StableParams) -> Self {
        Self::with_tolerance(p, 1e-10)
    }

    pub fn with_tolerance(p: StableParams, rel_tol: f64) -> Self {
        let alpha = p.alpha();
        Self {
            alpha,
            k: alpha / (1.0 - alpha),
            rel_tol,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ln A(w)` given `w` and the complementary angle `pi - w`, each supplied
    /// exactly so that `sin(w)` keeps full precision near both ends.
    fn ln_a(&self, w: f64, w_comp: f64) -> f64 {
        let a = self.alpha;
        let sin_w = if w < FRAC_PI_2 { w.sin() } else { w_comp.sin() };
        self.k * (a * w).sin().ln() + ((1.0 - a) * w).sin().ln() - sin_w.ln() / (1.0 - a)
    }

    /// Density at `x`; zero for `x <= 0`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Ok(0.0);
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        if x.powf(self.alpha) >= SERIES_SWITCH {
            return Ok(self.tail_series(x));
        }
        let lx = x.ln();
        let k = self.k;
        let cfg = QuadConfig::relative(self.rel_tol);
        let kernel = |ln_a: f64| {
            let ln_y = ln_a - k * lx;
            if ln_y > 6.6 {
                // exp(-y) underflows well below any representable contribution
                0.0
            } else {
                (ln_y - ln_y.exp()).exp()
            }
        };
        // w in (0, pi/2] directly and t = pi - w in (0, pi/2] for the upper half
        let (lower, _) = integrate_vec(|w| [kernel(self.ln_a(w, PI - w))], &[0.0, FRAC_PI_2], cfg)?;
        let (upper, _) = integrate_vec(
            |t| [kernel(self.ln_a(PI - t, t))],
            &[0.0, 0.25 * FRAC_PI_2, FRAC_PI_2],
            cfg,
        )?;
        Ok(k / (PI * x) * (lower[0] + upper[0]))
    }

    fn tail_series(&self, x: f64) -> f64 {
        let a = self.alpha;
        let lx = x.ln();
        let mut sum = 0.0;
        for k in 1..200 {
            let kf = k as f64;
            let log_mag = ln_gamma(kf * a + 1.0) - ln_gamma(kf + 1.0) - (kf * a + 1.0) * lx;
            let mag = log_mag.exp();
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * mag * (kf * PI * a).sin();
            if k > 2 && mag < 1e-17 * sum.abs() {
                break;
            }
        }
        sum / PI
    }
}

/// Density of `U(1)`, the totally skewed stable law with Laplace transform `exp(-z^alpha)`.
pub fn stable_pdf(p: StableParams, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("stable density requires x > 0, got {x}")));
    }
    StableDensity::new(p).pdf(x)
}

/// Density of `T(t)` through exponential tilting of the scaled stable density:
/// `f_T(t)(x) = exp(-lambda x + lambda^alpha t) t^{-1/alpha} f_U(1)(x t^{-1/alpha})`.
pub fn tempered_stable_pdf(p: TemperParams, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("tempered stable density requires t > 0, got {t}")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("tempered stable density requires x > 0, got {x}")));
    }
    let kernel = StableDensity::new(p.stable());
    tempered_density_with(&kernel, p, t, x)
}

pub(crate) fn tempered_density_with(kernel: &StableDensity, p: TemperParams, t: f64, x: f64) -> Result<f64> {
    let scale = t.powf(1.0 / p.alpha());
    let f = kernel.pdf(x / scale)?;
    if f == 0.0 {
        return Ok(0.0);
    }
    Ok((f.ln() - p.lambda() * x + p.lambda_pow_alpha() * t - scale.ln()).exp())
}

/// `E exp(-z T(t)) = exp(t (lambda^alpha - (lambda + z)^alpha))`.
pub fn laplace_subordinator(p: TemperParams, q: LaplaceQuery) -> f64 {
    (-q.t() * p.laplace_exponent(q.z())).exp()
}

/// Right-tail approximant `exp(-lambda x + lambda^alpha t) (t/x)^alpha` of `1 - F_T(t)(x)`.
/// Only meaningful for large `x`; the stable tail constant is not included.
pub fn survival_ts_asymptotic(p: TemperParams, t: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!(
            "tail approximant needs x > 0 and t > 0, got t={t}, x={x}"
        )));
    }
    Ok((-p.lambda() * x + p.lambda_pow_alpha() * t + p.alpha() * (t / x).ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::quad::integrate_positive_axis;

    fn levy(x: f64) -> f64 {
        (-0.25 / x).exp() / (2.0 * PI.sqrt() * x.powf(1.5))
    }

    #[test]
    fn half_stable_matches_levy_density() {
        let p = StableParams::new(0.5).unwrap();
        assert!((stable_pdf(p, 1.0).unwrap() - 0.219_695_644_733_861).abs() < 1e-12);
        for &x in &[0.01, 0.1, 0.5, 2.0, 10.0, 50.0, 1e3, 1e5, 1e7] {
            let v = stable_pdf(p, x).unwrap();
            assert!((v / levy(x) - 1.0).abs() < 1e-8, "x={x}: {v} vs {}", levy(x));
        }
    }

    #[test]
    fn series_and_integral_agree_at_switch() {
        for &alpha in &[0.2, 0.45, 0.8] {
            let d = StableDensity::new(StableParams::new(alpha).unwrap());
            let x = SERIES_SWITCH.powf(1.0 / alpha);
            let integral = {
                let mut q = d;
                q.rel_tol = 1e-12;
                // force the integral branch by evaluating slightly below the switch
                q.pdf(x * 0.999_999).unwrap()
            };
            let series = d.tail_series(x * 0.999_999);
            assert!((integral / series - 1.0).abs() < 1e-8, "alpha={alpha}");
        }
    }

    #[test]
    fn normalization_over_alpha() {
        for &alpha in &[0.2, 0.4, 0.6, 0.8, 0.9] {
            let d = StableDensity::new(StableParams::new(alpha).unwrap());
            let q = integrate_positive_axis(|x| d.pdf(x).unwrap(), 1.0, QuadConfig::relative(1e-10)).unwrap();
            assert!((q.value - 1.0).abs() < 1e-6, "alpha={alpha}: {}", q.value);
        }
    }

    #[test]
    fn tail_exponent() {
        let alpha = 0.6;
        let p = StableParams::new(alpha).unwrap();
        let xs: Vec<f64> = (0..=8).map(|i| 10f64.powf(2.0 + 0.25 * i as f64)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| stable_pdf(p, x).unwrap().ln()).collect();
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let n = xs.len() as f64;
        let mx = lx.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = lx.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((slope + alpha + 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn tempered_density_reductions() {
        let p0 = TemperParams::new(0.7, 0.0).unwrap();
        let t: f64 = 2.0;
        let s = t.powf(1.0 / 0.7);
        for &x in &[0.5, 2.0, 8.0] {
            let a = tempered_stable_pdf(p0, t, x).unwrap();
            let b = stable_pdf(p0.stable(), x / s).unwrap() / s;
            assert!((a / b - 1.0).abs() < 1e-12);
        }
        let p = TemperParams::new(0.8, 1.0).unwrap();
        let q = integrate_positive_axis(|x| tempered_stable_pdf(p, 1.0, x).unwrap(), 1.0, QuadConfig::relative(1e-10))
            .unwrap();
        assert!((q.value - 1.0).abs() < 1e-5, "{}", q.value);
    }

    #[test]
    fn density_laplace_duality() {
        let p = TemperParams::new(0.8, 1.0).unwrap();
        for &z in &[0.5, 1.0, 2.5] {
            let q = integrate_positive_axis(
                |x| (-z * x).exp() * tempered_stable_pdf(p, 1.0, x).unwrap(),
                1.0,
                QuadConfig::relative(1e-10),
            )
            .unwrap();
            let exact = laplace_subordinator(p, LaplaceQuery::new(z, 1.0).unwrap());
            assert!((q.value - exact).abs() < 1e-4 * exact.max(1e-3), "z={z}");
        }
    }

    #[test]
    fn subordinator_laplace_values() {
        let p = TemperParams::new(0.5, 1.0).unwrap();
        let q = |z, t| LaplaceQuery::new(z, t).unwrap();
        assert_eq!(laplace_subordinator(p, q(0.0, 3.0)), 1.0);
        assert!((laplace_subordinator(p, q(3.0, 1.0)) - (-1.0f64).exp()).abs() < 1e-15);
        let p0 = TemperParams::new(0.5, 0.0).unwrap();
        let v = laplace_subordinator(p0, q(4.0, 0.5));
        assert!((v - (-0.5f64 * 2.0).exp()).abs() < 1e-15);
        assert!(LaplaceQuery::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn tail_approximant() {
        let p0 = TemperParams::new(0.3, 0.0).unwrap();
        let v = survival_ts_asymptotic(p0, 2.0, 50.0).unwrap();
        assert!((v - (2.0f64 / 50.0).powf(0.3)).abs() < 1e-15);
        let p = TemperParams::new(0.26, 6.0).unwrap();
        let v = survival_ts_asymptotic(p, 1.0, 10.0).unwrap();
        let expected = (-60.0 + 6f64.powf(0.26)).exp() * 10f64.powf(-0.26);
        assert!((v / expected - 1.0).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let x = 0.05 * i as f64;
            let s = survival_ts_asymptotic(p, 1.0, x).unwrap();
            assert!(s < prev);
            prev = s;
        }
    }
}
