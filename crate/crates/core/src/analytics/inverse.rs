//! Inverse tempered stable subordinator `S(tau)` and the subdiffusive process
//! `Y_S(tau) = beta S(tau) + B(S(tau))`.
//!
//! The density of `S(tau)` is
//!
//! ```text
//! f_S(x) = tau f_{T(x)}(tau) / (alpha x)
//!        + lambda / (alpha x) * int_0^tau u f_{T(x)}(u) du
//!        - lambda^alpha       * int_0^tau f_{T(x)}(u) du
//! ```
//!
//! Both inner integrals are taken in the variable `s = ln(u / x^(1/alpha))`,
//! where the stable factor `f_U(1)(e^s) e^s` no longer depends on `x` or `tau`.
//! That factor is tabulated once on fixed Gauss-Kronrod panels and reused for
//! every `x`; only the tilting weight is recomputed.

use std::cell::RefCell;

use crate::analytics::nts::gaussian_kernel;
use crate::analytics::quad::{
    integrate, integrate_positive_axis, integrate_vec, ErrorSlot, LogGridTable, QuadConfig, WG, WGK, XGK,
};
use crate::analytics::special::{gamma, mittag_leffler_scaled};
use crate::analytics::stable::{tempered_density_with, StableDensity};
use crate::error::{Error, Result};
use crate::params::{ModelParams, TemperParams};

/// Width of the fixed panels in `s`.
const PANEL: f64 = 0.25;
/// Integrand magnitudes below `e^-CUT` are dropped at both ends.
const CUT: f64 = 60.0;

/// Stable factor at the Gauss-Kronrod nodes of panels `[j PANEL, (j+1) PANEL]`
/// for `j` in `first..first + log_g.len()`.
#[derive(Debug, Default)]
struct NodeTable {
    first: i64,
    log_g: Vec<[f64; 21]>,
}

/// Pointwise evaluator of the density of `S(tau)`.
#[derive(Debug)]
pub struct InverseSubordinatorDensity {
    params: TemperParams,
    tau: f64,
    kernel: StableDensity,
    nodes: RefCell<NodeTable>,
}

impl InverseSubordinatorDensity {
    pub fn new(params: TemperParams, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("inverse subordinator density requires tau > 0, got {tau}")));
        }
        Ok(Self {
            params,
            tau,
            kernel: StableDensity::with_tolerance(params.stable(), 1e-11),
            nodes: RefCell::new(NodeTable::default()),
        })
    }

    fn log_g(&self, s: f64) -> Result<f64> {
        let f = self.kernel.pdf(s.exp())?;
        Ok(if f > 0.0 { f.ln() + s } else { f64::NEG_INFINITY })
    }

    /// Makes panels `lo..hi` available.
    fn ensure_panels(&self, lo: i64, hi: i64) -> Result<()> {
        let fill = |j: i64| -> Result<[f64; 21]> {
            let c = (j as f64 + 0.5) * PANEL;
            let mut out = [0.0; 21];
            for (k, v) in out.iter_mut().enumerate() {
                *v = self.log_g(c + 0.5 * PANEL * node(k).0)?;
            }
            Ok(out)
        };
        let mut t = self.nodes.borrow_mut();
        if t.log_g.is_empty() {
            t.first = lo;
        }
        if lo < t.first {
            let mut head = (lo..t.first).map(fill).collect::<Result<Vec<_>>>()?;
            head.append(&mut t.log_g);
            t.log_g = head;
            t.first = lo;
        }
        let end = t.first + t.log_g.len() as i64;
        for j in end..hi {
            let v = fill(j)?;
            t.log_g.push(v);
        }
        Ok(())
    }

    /// Left end of the range where the stable factor, lifted by `e^lift`, still matters.
    fn lower_cut(&self, lift: f64) -> Result<f64> {
        let a = self.params.alpha();
        let k = a / (1.0 - a);
        // leading behavior ln g(s) ~ -A(0) e^{-k s} with A(0) = alpha^k (1 - alpha)
        let a0 = a.powf(k) * (1.0 - a);
        let target = -CUT - lift;
        let mut s = -((CUT + lift) / a0).ln() / k + 2.0;
        let mut steps = 0;
        while self.log_g(s)? > target {
            s -= 0.5;
            steps += 1;
            if steps > 4000 {
                return Err(Error::Quadrature("stable density has no negligible lower tail".into()));
            }
        }
        Ok(s)
    }

    /// `(int f_{T(x)}(u) du, int u f_{T(x)}(u) du)` over `u = x^(1/alpha) e^s`, `s in [lo, hi]`.
    fn moments_over(&self, x: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
        if hi <= lo {
            return Ok((0.0, 0.0));
        }
        let p = self.params;
        let c = x.powf(1.0 / p.alpha());
        let lam = p.lambda();
        let lift = p.lambda_pow_alpha() * x;
        let weight = |s: f64, lg: f64| {
            let e = (lift - lam * c * s.exp() + lg).exp();
            [e, e * c * s.exp()]
        };
        // fixed panels lying inside [lo, hi]
        let first = (lo / PANEL).ceil() as i64;
        let last = (hi / PANEL).floor() as i64;
        let (mut k0, mut k1, mut g0, mut g1) = (0.0, 0.0, 0.0, 0.0);
        if last > first {
            self.ensure_panels(first, last)?;
            let t = self.nodes.borrow();
            for j in first..last {
                let lg = &t.log_g[(j - t.first) as usize];
                let centre = (j as f64 + 0.5) * PANEL;
                for (k, &l) in lg.iter().enumerate() {
                    let (xk, wk, wg) = node(k);
                    let [a, b] = weight(centre + 0.5 * PANEL * xk, l);
                    k0 += wk * a;
                    k1 += wk * b;
                    g0 += wg * a;
                    g1 += wg * b;
                }
            }
            let h = 0.5 * PANEL;
            k0 *= h;
            k1 *= h;
            g0 *= h;
            g1 *= h;
        }
        let cfg = QuadConfig::relative(1e-10);
        let slot = ErrorSlot::default();
        let mut direct = |s: f64| weight(s, slot.unwrap_or(self.log_g(s), f64::NEG_INFINITY));
        let resolved = (k0 - g0).abs() <= 1e-9 * k0.abs() && (k1 - g1).abs() <= 1e-9 * k1.abs();
        let out = if last <= first || !resolved {
            // no whole panel fits, or the fixed panels miss this weight
            let (v, _) = integrate_vec(&mut direct, &unit_breaks(lo, hi), cfg)?;
            (v[0], v[1])
        } else {
            let floor = cfg.with_abs(1e-16 * (k0.abs() + k1.abs()));
            let a = PANEL * first as f64;
            let b = PANEL * last as f64;
            let (head, _) = integrate_vec(&mut direct, &[lo, a], floor)?;
            let (tail, _) = integrate_vec(&mut direct, &[b, hi], floor)?;
            (k0 + head[0] + tail[0], k1 + head[1] + tail[1])
        };
        slot.check()?;
        Ok(out)
    }

    /// Density of `S(tau)` at `x` for `lambda > 0`.
    ///
    /// Since `lambda E T(x) / (alpha x) = lambda^alpha`, the two integrals over
    /// `[0, tau]` may be replaced by minus their complements over `[tau, inf)`.
    /// The smaller side is used so that nothing cancels against a unit mass.
    fn tempered_terms(&self, x: f64) -> Result<f64> {
        let p = self.params;
        let a = p.alpha();
        let lam = p.lambda();
        let lift = p.lambda_pow_alpha() * x;
        let c = x.powf(1.0 / a);
        let split = (self.tau / c).ln();
        // beyond u = (lift + CUT) / lambda the integrand is below e^-CUT
        let top = ((lift + CUT) / (lam * c)).ln();
        let bottom = self.lower_cut(lift)?;
        let (m0, m1) = self.moments_over(x, bottom, split.min(top))?;
        if m0 <= 0.5 {
            return Ok(lam / (a * x) * m1 - p.lambda_pow_alpha() * m0);
        }
        let (r0, r1) = self.moments_over(x, split.max(bottom), top)?;
        Ok(p.lambda_pow_alpha() * r0 - lam / (a * x) * r1)
    }

    /// Density of `S(tau)` at `x`; zero for `x <= 0`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Ok(0.0);
        }
        let p = self.params;
        let a = p.alpha();
        let first = self.tau / (a * x) * tempered_density_with(&self.kernel, p, x, self.tau)?;
        if p.lambda() == 0.0 {
            return Ok(first);
        }
        Ok((first + self.tempered_terms(x)?).max(0.0))
    }
}

fn node(k: usize) -> (f64, f64, f64) {
    if k < 10 {
        (-XGK[k], WGK[k], if k % 2 == 1 { WG[k / 2] } else { 0.0 })
    } else if k == 10 {
        (0.0, WGK[10], 0.0)
    } else {
        let j = 20 - k;
        (XGK[j], WGK[j], if j % 2 == 1 { WG[j / 2] } else { 0.0 })
    }
}

fn unit_breaks(a: f64, b: f64) -> Vec<f64> {
    let n = (b - a).ceil().max(1.0) as usize;
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Law of `S(tau)` tabulated once on a log-scale quadrature grid.
#[derive(Debug)]
pub struct InverseSubordinatorLaw {
    params: TemperParams,
    tau: f64,
    density: InverseSubordinatorDensity,
    table: LogGridTable,
}

impl InverseSubordinatorLaw {
    pub fn new(params: TemperParams, tau: f64) -> Result<Self> {
        let density = InverseSubordinatorDensity::new(params, tau)?;
        let hint = mean_of_s(params, tau)?;
        let slot = ErrorSlot::default();
        let table = LogGridTable::build(|x| slot.unwrap_or(density.pdf(x), 0.0), hint, 0.5, 1e-9);
        slot.check()?;
        Ok(Self {
            params,
            tau,
            density,
            table: table?,
        })
    }

    pub fn params(&self) -> TemperParams {
        self.params
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.density.pdf(x)
    }

    pub fn mass(&self) -> f64 {
        self.table.mass()
    }

    /// `E h(S(tau))` with the Kronrod/Gauss error estimate.
    pub fn expect<H: FnMut(f64) -> f64>(&self, h: H) -> (f64, f64) {
        self.table.expect(h)
    }

    pub fn mean(&self) -> f64 {
        self.table.expect(|x| x).0
    }

    pub fn second_moment(&self) -> f64 {
        self.table.expect(|x| x * x).0
    }

    /// `E exp(-z S(tau))` for `z >= 0`.
    pub fn laplace(&self, z: f64) -> Result<f64> {
        if !(z >= 0.0) {
            return Err(Error::Domain(format!("transform of S requires z >= 0, got {z}")));
        }
        Ok(self.table.expect(|x| (-z * x).exp()).0)
    }

    /// `E exp(-z (beta S + B(S))) = E exp(-(beta z - z^2/2) S)`.
    pub fn laplace_subordinated(&self, beta: f64, z: f64) -> Result<f64> {
        let growth = 0.5 * z * z - beta * z;
        if growth <= 0.0 {
            return Ok(self.table.expect(|x| (growth * x).exp()).0);
        }
        // the weight grows, so the tabulated support of f_S is not enough
        let slot = ErrorSlot::default();
        let q = integrate_positive_axis(
            |x| {
                let f = slot.unwrap_or(self.density.pdf(x), 0.0);
                if f > 0.0 {
                    (growth * x + f.ln()).exp()
                } else {
                    0.0
                }
            },
            self.table.largest_node().max(self.tau),
            QuadConfig::relative(1e-9),
        );
        slot.check()?;
        match q {
            Ok(q) if q.value.is_finite() => Ok(q.value),
            Ok(_) => Err(Error::Domain(format!("transform of Y_S diverges at z = {z}"))),
            Err(Error::Quadrature(m)) => Err(Error::Domain(format!(
                "transform of Y_S is not finite at z = {z}: {m}"
            ))),
            Err(e) => Err(e),
        }
    }

    /// Density of `beta S(tau) + B(S(tau))` at `x`.
    pub fn subordinated_pdf(&self, beta: f64, x: f64) -> f64 {
        self.table.expect(|s| gaussian_kernel(x, beta * s, s)).0
    }
}

/// Density of `S(tau)`.
pub fn inverse_subordinator_pdf(p: TemperParams, tau: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("inverse subordinator density requires x > 0, got {x}")));
    }
    InverseSubordinatorDensity::new(p, tau)?.pdf(x)
}

/// `E exp(-z S(tau))`.
pub fn laplace_inverse_subordinator(p: TemperParams, tau: f64, z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("transform of S requires z >= 0, got {z}")));
    }
    InverseSubordinatorLaw::new(p, tau)?.laplace(z)
}

/// `E exp(-z Y_S(tau))`.
pub fn laplace_ys(p: ModelParams, tau: f64, z: f64) -> Result<f64> {
    p.validate()?;
    if z == 0.0 {
        return Ok(1.0);
    }
    InverseSubordinatorLaw::new(p.temper(), tau)?.laplace_subordinated(p.beta, z)
}

/// Density of `Y_S(tau)`.
pub fn ys_pdf(p: ModelParams, tau: f64, x: f64) -> Result<f64> {
    p.validate()?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("density argument must be finite, got {x}")));
    }
    Ok(InverseSubordinatorLaw::new(p.temper(), tau)?.subordinated_pdf(p.beta, x))
}

/// Renewal density `u(r) = e^{-lambda r} r^(alpha-1) E_{alpha,alpha}((lambda r)^alpha)`,
/// the derivative of `E S(r)`.
pub fn renewal_density(p: TemperParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("renewal density requires r > 0, got {r}")));
    }
    let a = p.alpha();
    let lr = p.lambda() * r;
    Ok(r.powf(a - 1.0) * mittag_leffler_scaled(a, a, lr.powf(a), lr)?)
}

/// `E S(tau) = int_0^tau e^{-lambda u} u^(alpha-1) E_{alpha,alpha}((lambda u)^alpha) du`.
pub fn mean_of_s(p: TemperParams, tau: f64) -> Result<f64> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("mean of S requires tau >= 0, got {tau}")));
    }
    let a = p.alpha();
    if tau == 0.0 {
        return Ok(0.0);
    }
    if p.lambda() == 0.0 {
        return Ok(tau.powf(a) / gamma(1.0 + a));
    }
    // u = tau s^(1/alpha) removes the endpoint singularity
    let lt = p.lambda() * tau;
    let slot = ErrorSlot::default();
    let q = integrate(
        |s| slot.unwrap_or(mittag_leffler_scaled(a, a, lt.powf(a) * s, lt * s.powf(1.0 / a)), f64::NAN),
        0.0,
        1.0,
        QuadConfig::relative(1e-11),
    );
    slot.check()?;
    Ok(tau.powf(a) / a * q?.value)
}

/// `E Y_S(tau) = beta E S(tau)`.
pub fn mean_ys(p: ModelParams, tau: f64) -> Result<f64> {
    if p.beta == 0.0 {
        return Ok(0.0);
    }
    Ok(p.beta * mean_of_s(p.temper(), tau)?)
}

/// `E S(tau)^2` by quadrature of the density.
pub fn second_moment_s(p: TemperParams, tau: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("second moment of S requires tau >= 0, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    Ok(InverseSubordinatorLaw::new(p, tau)?.second_moment())
}

/// `E Y_S(tau)^2 = beta^2 E S(tau)^2 + E S(tau)`.
pub fn msd_ys(p: ModelParams, tau: f64) -> Result<f64> {
    let t = p.temper();
    if p.beta == 0.0 {
        return mean_of_s(t, tau);
    }
    Ok(p.beta * p.beta * second_moment_s(t, tau)? + mean_of_s(t, tau)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(a: f64, l: f64) -> TemperParams {
        TemperParams::new(a, l).unwrap()
    }

    #[test]
    fn untempered_reduction() {
        let p = tp(0.5, 0.0);
        // S(tau) for alpha = 1/2 is |N(0, 2 tau)|... scaled: f(x) = exp(-x^2/(4 tau)) / sqrt(pi tau)
        let tau: f64 = 1.3;
        for &x in &[0.1, 0.7, 2.0, 4.0] {
            let v = inverse_subordinator_pdf(p, tau, x).unwrap();
            let exact = (-x * x / (4.0 * tau)).exp() / (std::f64::consts::PI * tau).sqrt();
            assert!((v / exact - 1.0).abs() < 1e-8, "x={x}: {v} vs {exact}");
        }
    }

    #[test]
    fn law_normalizes() {
        for &(a, l, tau) in &[(0.4, 0.2, 1.0), (0.8, 1.0, 0.5), (0.26, 6.0, 3.0), (0.7, 0.0, 2.0)] {
            let law = InverseSubordinatorLaw::new(tp(a, l), tau).unwrap();
            assert!((law.mass() - 1.0).abs() < 1e-6, "({a},{l},{tau}): {}", law.mass());
        }
    }

    #[test]
    fn mean_matches_renewal_integral_and_density() {
        for &(a, l, tau) in &[(0.4, 0.2, 1.0), (0.8, 1.0, 2.0), (0.26, 6.0, 0.5)] {
            let p = tp(a, l);
            let m = mean_of_s(p, tau).unwrap();
            let law = InverseSubordinatorLaw::new(p, tau).unwrap();
            assert!((law.mean() / m - 1.0).abs() < 1e-6, "({a},{l}): {} vs {m}", law.mean());
            let direct = integrate(
                |r| renewal_density(p, r).unwrap(),
                0.0,
                tau,
                QuadConfig::relative(1e-9),
            )
            .unwrap();
            assert!((direct.value / m - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn untempered_moments_closed_form() {
        let p = tp(0.6, 0.0);
        let tau: f64 = 2.0;
        let m = mean_of_s(p, tau).unwrap();
        assert!((m - tau.powf(0.6) / gamma(1.6)).abs() < 1e-14);
        let s2 = second_moment_s(p, tau).unwrap();
        let exact = 2.0 * tau.powf(1.2) / gamma(2.2);
        assert!((s2 / exact - 1.0).abs() < 1e-6, "{s2} vs {exact}");
    }

    #[test]
    fn transforms() {
        let p = ModelParams::new(0.4, 0.2, 0.0).unwrap();
        assert_eq!(laplace_ys(p, 1.0, 0.0).unwrap(), 1.0);
        let law = InverseSubordinatorLaw::new(p.temper(), 1.0).unwrap();
        let mut prev = 1.0 + 1e-9;
        for i in 0..10 {
            let v = law.laplace(0.3 * i as f64).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        // with beta = 0 the Gaussian part raises the transform: E exp(z^2 S / 2)
        let up = law.laplace_subordinated(0.0, 1.0).unwrap();
        assert!(up > 1.0);
        let (direct, _) = law.expect(|x| (0.5 * x).exp());
        assert!((up / direct - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ys_density_normalizes() {
        let p = ModelParams::new(0.8, 1.0, 1.0).unwrap();
        let law = InverseSubordinatorLaw::new(p.temper(), 1.0).unwrap();
        let cfg = QuadConfig::relative(1e-7).with_abs(1e-10);
        let mass = integrate(|x| law.subordinated_pdf(1.0, x), -12.0, 15.0, cfg).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-4, "{}", mass.value);
    }

    #[test]
    fn msd_reductions() {
        let p0 = ModelParams::new(0.8, 1.0, 0.0).unwrap();
        assert_eq!(msd_ys(p0, 0.7).unwrap(), mean_of_s(p0.temper(), 0.7).unwrap());
        assert_eq!(mean_ys(p0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn density_is_derivative_of_passage_probability() {
        // f_S(x) = -d/dx P(T(x) <= tau), with the probability integrated directly
        let p = tp(0.26, 6.0);
        let tau = 3.0;
        let d = InverseSubordinatorDensity::new(p, tau).unwrap();
        let cdf = |y: f64| {
            let c = y.powf(1.0 / 0.26);
            d.moments_over(y, -200.0, (tau / c).ln()).unwrap().0
        };
        for &x in &[20.0, 40.0, 60.0, 100.0] {
            let h = 1e-5 * x;
            let oracle = -(cdf(x + h) - cdf(x - h)) / (2.0 * h);
            let v = d.pdf(x).unwrap();
            assert!((v / oracle - 1.0).abs() < 1e-6, "x={x}: {v} vs {oracle}");
        }
    }
}
