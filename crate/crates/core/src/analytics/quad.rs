//! Adaptive Gauss-Kronrod (10/21) quadrature and a log-scale integrator for
//! densities on the positive half-line.

use crate::error::{Error, Result};

pub(crate) const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

pub(crate) const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_608_108,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], ..., XGK[9]`.
pub(crate) const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Tolerances for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

impl QuadConfig {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Result of a scalar integration.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    /// Bound on the mass discarded by truncating an infinite range.
    pub tail_bound: f64,
    pub evaluations: usize,
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

fn gk21<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Panel<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    for i in 0..N {
        kron[i] = WGK[10] * fc[i];
    }
    for (j, (&x, &wk)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            kron[i] += wk * s;
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for i in 0..N {
        value[i] = kron[i] * half;
        error[i] = ((kron[i] - gauss[i]) * half).abs();
        if !value[i].is_finite() {
            error[i] = f64::INFINITY;
        }
    }
    Panel { a, b, value, error }
}

/// Integrates a vector-valued function over `[breaks[0], breaks[last]]`, starting
/// from the partition given by `breaks` and bisecting the worst panel until every
/// component meets `max(abs_tol, rel_tol * |value|)`.
pub fn integrate_vec<const N: usize, F>(mut f: F, breaks: &[f64], cfg: QuadConfig) -> Result<([f64; N], [f64; N])>
where
    F: FnMut(f64) -> [f64; N],
{
    if breaks.len() < 2 {
        return Ok(([0.0; N], [0.0; N]));
    }
    let mut panels: Vec<Panel<N>> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk21(&mut f, w[0], w[1]))
        .collect();
    loop {
        let mut total = [0.0; N];
        let mut err = [0.0; N];
        for p in &panels {
            for i in 0..N {
                total[i] += p.value[i];
                err[i] += p.error[i];
            }
        }
        let tol: [f64; N] = std::array::from_fn(|i| cfg.abs_tol.max(cfg.rel_tol * total[i].abs()));
        if (0..N).all(|i| err[i] <= tol[i]) {
            return Ok((total, err));
        }
        if panels.len() >= cfg.max_intervals || (0..N).any(|i| !total[i].is_finite()) {
            return Err(Error::Quadrature(format!(
                "estimated error {err:?} exceeds tolerance {tol:?} after {} panels",
                panels.len()
            )));
        }
        let scale: [f64; N] = std::array::from_fn(|i| tol[i].max(f64::MIN_POSITIVE));
        let worst = panels
            .iter()
            .enumerate()
            .map(|(k, p)| (k, (0..N).map(|i| p.error[i] / scale[i]).fold(0.0, f64::max)))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::Quadrature(format!(
                "panel [{}, {}] cannot be bisected further",
                p.a, p.b
            )));
        }
        panels.push(gk21(&mut f, p.a, mid));
        panels.push(gk21(&mut f, mid, p.b));
    }
}

/// Scalar adaptive integration over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<Quad>
where
    F: FnMut(f64) -> f64,
{
    integrate_with_breaks(&mut f, &[a, b], cfg)
}

/// Scalar adaptive integration with an initial partition.
pub fn integrate_with_breaks<F>(mut f: F, breaks: &[f64], cfg: QuadConfig) -> Result<Quad>
where
    F: FnMut(f64) -> f64,
{
    let mut count = 0usize;
    let (v, e) = integrate_vec(
        |x| {
            count += 1;
            [f(x)]
        },
        breaks,
        cfg,
    )?;
    Ok(Quad {
        value: v[0],
        error: e[0],
        tail_bound: 0.0,
        evaluations: count,
    })
}

/// Holds the first error raised inside an infallible integrand closure.
#[derive(Debug, Default)]
pub(crate) struct ErrorSlot(std::cell::RefCell<Option<Error>>);

impl ErrorSlot {
    pub(crate) fn unwrap_or(&self, r: Result<f64>, fallback: f64) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                fallback
            }
        }
    }

    pub(crate) fn check(self) -> Result<()> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Relative level below which the log-scale integrand is treated as zero.
pub const TRUNCATION_LEVEL: f64 = 1e-12;

/// Finds `[v_lo, v_hi]` in log-space outside of which `g(v)` stays below
/// `TRUNCATION_LEVEL` times its peak. `g` must be unimodal-ish and continuous.
pub(crate) fn log_support<G>(g: &mut G, v_hint: f64, max_span: f64) -> Result<(f64, f64, f64, f64)>
where
    G: FnMut(f64) -> f64,
{
    const STEP: f64 = 0.5;
    let mut peak: f64 = 0.0;
    let mut samples = Vec::new();
    // coarse scan to locate the bulk
    let mut v = v_hint - 20.0;
    while v <= v_hint + 20.0 {
        let gv = g(v);
        if !gv.is_finite() {
            return Err(Error::Quadrature(format!("integrand not finite at log-argument {v}")));
        }
        peak = peak.max(gv.abs());
        samples.push((v, gv.abs()));
        v += STEP;
    }
    if peak == 0.0 {
        return Err(Error::Quadrature("integrand vanishes on the scanned range".into()));
    }
    let first = samples.iter().position(|s| s.1 > TRUNCATION_LEVEL * peak).unwrap();
    let last = samples.iter().rposition(|s| s.1 > TRUNCATION_LEVEL * peak).unwrap();
    let mut lo = samples[first].0 - STEP;
    let mut hi = samples[last].0 + STEP;
    let mut g_lo = g(lo).abs();
    while g_lo > TRUNCATION_LEVEL * peak {
        lo -= STEP;
        g_lo = g(lo).abs();
        if v_hint - lo > max_span {
            return Err(Error::Quadrature("left tail does not decay".into()));
        }
    }
    let mut g_hi = g(hi).abs();
    let mut run = 0;
    loop {
        peak = peak.max(g_hi);
        if g_hi <= TRUNCATION_LEVEL * peak {
            run += 1;
            if run >= 2 {
                break;
            }
        } else {
            run = 0;
        }
        hi += STEP;
        g_hi = g(hi).abs();
        if !g_hi.is_finite() || hi - v_hint > max_span {
            return Err(Error::Quadrature("right tail does not decay".into()));
        }
    }
    Ok((lo, hi, g_lo, g_hi))
}

/// `int_0^inf f(x) dx` through the substitution `x = e^v`.
///
/// The range is truncated where the transformed integrand drops below
/// [`TRUNCATION_LEVEL`] of its peak; the discarded mass is bounded in
/// `tail_bound` by assuming at worst an `e^{-|v|/10}` decay past the cut.
pub fn integrate_positive_axis<F>(mut f: F, scale_hint: f64, cfg: QuadConfig) -> Result<Quad>
where
    F: FnMut(f64) -> f64,
{
    let mut g = |v: f64| {
        let x = v.exp();
        if x == 0.0 || !x.is_finite() {
            0.0
        } else {
            f(x) * x
        }
    };
    let v_hint = scale_hint.max(1e-300).ln();
    let (lo, hi, g_lo, g_hi) = log_support(&mut g, v_hint, 1500.0)?;
    let n = ((hi - lo) / 2.0).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let mut q = integrate_with_breaks(&mut g, &breaks, cfg)?;
    q.tail_bound = 10.0 * (g_lo + g_hi);
    Ok(q)
}

/// Nodes and weights of a composite GK21 rule in log-space, built once for an
/// expensive density and reused for many expectations.
#[derive(Debug, Clone)]
pub struct LogGridTable {
    /// Abscissae `x_i` on the positive axis.
    pub nodes: Vec<f64>,
    /// Kronrod weights times density, i.e. `w_i f(x_i) x_i`.
    pub weights: Vec<f64>,
    gauss_weights: Vec<f64>,
    pub tail_bound: f64,
}

impl LogGridTable {
    /// Tabulates `f` on `(0, inf)`. Panels have width at most `max_panel` in
    /// log-space and are refined until the Kronrod/Gauss discrepancy of the mass
    /// falls below `rel_tol`.
    pub fn build<F>(mut f: F, scale_hint: f64, max_panel: f64, rel_tol: f64) -> Result<Self>
    where
        F: FnMut(f64) -> f64,
    {
        let mut g = |v: f64| {
            let x = v.exp();
            if x == 0.0 || !x.is_finite() {
                0.0
            } else {
                f(x) * x
            }
        };
        let v_hint = scale_hint.max(1e-300).ln();
        let (lo, hi, g_lo, g_hi) = log_support(&mut g, v_hint, 1500.0)?;
        let n = ((hi - lo) / max_panel).ceil().max(1.0) as usize;
        let breaks: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();

        // Adaptive refinement on the mass; remember every panel's samples.
        struct Cell {
            a: f64,
            b: f64,
            fx: [f64; 21],
            kron: f64,
            err: f64,
        }
        let eval_cell = |g: &mut dyn FnMut(f64) -> f64, a: f64, b: f64| {
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            let mut fx = [0.0; 21];
            fx[10] = g(c);
            for j in 0..10 {
                fx[j] = g(c - h * XGK[j]);
                fx[20 - j] = g(c + h * XGK[j]);
            }
            let mut kron = WGK[10] * fx[10];
            let mut gauss = 0.0;
            for j in 0..10 {
                let s = fx[j] + fx[20 - j];
                kron += WGK[j] * s;
                if j % 2 == 1 {
                    gauss += WG[j / 2] * s;
                }
            }
            Cell {
                a,
                b,
                fx,
                kron: kron * h,
                err: ((kron - gauss) * h).abs(),
            }
        };
        let mut cells: Vec<Cell> = breaks.windows(2).map(|w| eval_cell(&mut g, w[0], w[1])).collect();
        loop {
            let total: f64 = cells.iter().map(|c| c.kron).sum();
            let err: f64 = cells.iter().map(|c| c.err).sum();
            if err <= rel_tol * total.abs() {
                break;
            }
            if cells.len() > 2000 {
                return Err(Error::Quadrature(format!(
                    "tabulation error {err:e} above tolerance for mass {total:e}"
                )));
            }
            let worst = cells
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
                .map(|(k, _)| k)
                .unwrap();
            let c = cells.swap_remove(worst);
            let mid = 0.5 * (c.a + c.b);
            cells.push(eval_cell(&mut g, c.a, mid));
            cells.push(eval_cell(&mut g, mid, c.b));
        }
        cells.sort_by(|x, y| x.a.total_cmp(&y.a));
        let mut nodes = Vec::with_capacity(cells.len() * 21);
        let mut weights = Vec::with_capacity(cells.len() * 21);
        let mut gauss_weights = Vec::with_capacity(cells.len() * 21);
        for c in &cells {
            let mid = 0.5 * (c.a + c.b);
            let h = 0.5 * (c.b - c.a);
            for k in 0..21 {
                let (x, wk, wg) = if k < 10 {
                    (mid - h * XGK[k], WGK[k], if k % 2 == 1 { WG[k / 2] } else { 0.0 })
                } else if k == 10 {
                    (mid, WGK[10], 0.0)
                } else {
                    let j = 20 - k;
                    (mid + h * XGK[j], WGK[j], if j % 2 == 1 { WG[j / 2] } else { 0.0 })
                };
                nodes.push(x.exp());
                weights.push(wk * h * c.fx[k]);
                gauss_weights.push(wg * h * c.fx[k]);
            }
        }
        Ok(Self {
            nodes,
            weights,
            gauss_weights,
            tail_bound: 10.0 * (g_lo + g_hi),
        })
    }

    /// `int h(x) f(x) dx` with the Kronrod/Gauss discrepancy as error estimate.
    pub fn expect<H: FnMut(f64) -> f64>(&self, mut h: H) -> (f64, f64) {
        let mut kron = 0.0;
        let mut gauss = 0.0;
        for ((&x, &w), &wg) in self.nodes.iter().zip(&self.weights).zip(&self.gauss_weights) {
            let hx = h(x);
            kron += w * hx;
            gauss += wg * hx;
        }
        (kron, (kron - gauss).abs())
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn largest_node(&self) -> f64 {
        *self.nodes.last().unwrap_or(&0.0)
    }
}
