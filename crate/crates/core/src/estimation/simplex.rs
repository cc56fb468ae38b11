//! Nelder-Mead simplex minimization.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iter: usize,
    /// Stop once the spread of objective values falls below `ftol * (|f_best| + ftol)`.
    pub ftol: f64,
    /// ...and the simplex diameter falls below `xtol`.
    pub xtol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            ftol: 1e-10,
            xtol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult<const N: usize> {
    pub x: [f64; N],
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0`, with initial edge lengths `step`.
pub fn nelder_mead<const N: usize, F>(mut f: F, x0: [f64; N], step: [f64; N], opts: SimplexOptions) -> SimplexResult<N>
where
    F: FnMut(&[f64; N]) -> f64,
{
    let eval = |f: &mut F, x: &[f64; N]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut pts: Vec<[f64; N]> = Vec::with_capacity(N + 1);
    pts.push(x0);
    for i in 0..N {
        let mut x = x0;
        x[i] += step[i];
        pts.push(x);
    }
    let mut vals: Vec<f64> = pts.iter().map(|x| eval(&mut f, x)).collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=N).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i]).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[N] - vals[0];
        let diameter = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread <= opts.ftol * (vals[0].abs() + opts.ftol) && diameter <= opts.xtol {
            converged = true;
            break;
        }

        let mut centroid = [0.0; N];
        for p in &pts[..N] {
            for i in 0..N {
                centroid[i] += p[i] / N as f64;
            }
        }
        let along = |t: f64| -> [f64; N] { std::array::from_fn(|i| centroid[i] + t * (pts[N][i] - centroid[i])) };

        let xr = along(-1.0);
        let fr = eval(&mut f, &xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(&mut f, &xe);
            if fe < fr {
                pts[N] = xe;
                vals[N] = fe;
            } else {
                pts[N] = xr;
                vals[N] = fr;
            }
            continue;
        }
        if fr < vals[N - 1] {
            pts[N] = xr;
            vals[N] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[N] {
            let x = along(-0.5);
            (x, eval(&mut f, &x))
        } else {
            let x = along(0.5);
            (x, eval(&mut f, &x))
        };
        if fc < vals[N].min(fr) {
            pts[N] = xc;
            vals[N] = fc;
            continue;
        }
        // shrink toward the best vertex
        let best = pts[0];
        for k in 1..=N {
            for i in 0..N {
                pts[k][i] = best[i] + 0.5 * (pts[k][i] - best[i]);
            }
            vals[k] = eval(&mut f, &pts[k]);
        }
    }
    let k = (0..=N).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    SimplexResult {
        x: pts[k],
        f: vals[k],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let r = nelder_mead(
            |x: &[f64; 2]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            [-1.2, 1.0],
            [0.5, 0.5],
            SimplexOptions {
                max_iter: 5000,
                ftol: 1e-14,
                xtol: 1e-10,
            },
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        let r = nelder_mead(
            |x: &[f64; 1]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.3).powi(2) },
            [2.0],
            [1.0],
            SimplexOptions::default(),
        );
        assert!((r.x[0] - 0.3).abs() < 1e-6);
    }
}
