//! Monte Carlo checks of the samplers against the analytic laws, and the
//! asymptotic regimes of the Y_S mean squared displacement.

use std::sync::Arc;

use subordinated::analytics::{cov_nts, laplace_subordinator, mean_nts, msd_ys, LaplaceQuery};
use subordinated::kernel::{sample_positive_stable, sample_tempered_stable_increment, RandomStream};
use subordinated::params::{ModelParams, TemperParams};
use subordinated::paths::{simulate_ensemble, simulate_subordinator, PathKind, TimeGrid};

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn stable_motion_is_self_similar() {
    // U(c) built from four increments against c^(1/alpha) U(1) from another stream
    let p = TemperParams::new(0.6, 0.0).unwrap();
    let c: f64 = 2.0;
    let g = Arc::new(TimeGrid::uniform(c, 5).unwrap());
    let n = 10_000;
    let summed: Vec<f64> = (0..n)
        .map(|i| *simulate_subordinator(p, &g, &mut RandomStream::new(10, i)).values.last().unwrap())
        .collect();
    let mut s = RandomStream::new(11, 0);
    let scaled: Vec<f64> = (0..n)
        .map(|_| c.powf(1.0 / 0.6) * sample_positive_stable(&mut s, p.stable()))
        .collect();
    let d = ks(summed, scaled);
    // 0.1% critical value for two samples of 10^4
    assert!(d < 1.95 * (2.0 / n as f64).sqrt(), "KS distance {d}");
}

#[test]
fn subordinator_transform_within_three_standard_errors() {
    for (k, (a, lambda)) in [(0.6, 0.5), (0.26, 6.0), (0.8, 0.0)].into_iter().enumerate() {
        let p = TemperParams::new(a, lambda).unwrap();
        let mut s = RandomStream::new(20, k as u64);
        let xs: Vec<f64> = (0..100_000).map(|_| sample_tempered_stable_increment(&mut s, p, 1.0)).collect();
        for i in 1..=10 {
            let z = 0.3 * i as f64;
            let w: Vec<f64> = xs.iter().map(|x| (-z * x).exp()).collect();
            let (m, se) = mean_se(&w);
            let exact = laplace_subordinator(p, LaplaceQuery::new(z, 1.0).unwrap());
            assert!((m - exact).abs() < 3.0 * se, "alpha {a} lambda {lambda} z {z}: {m} vs {exact} (se {se})");
        }
    }
}

#[test]
fn nts_ensemble_moments_match_analytics() {
    let p = ModelParams::new(0.7, 1.5, 0.3).unwrap();
    let grid = TimeGrid::uniform(5.0, 6).unwrap();
    let e = simulate_ensemble(PathKind::Nts, p, &grid, 20_000, 30).unwrap();
    for k in 1..grid.len() {
        let t = grid.points()[k];
        let ys = e.column(k);
        let (m, se) = mean_se(&ys);
        let exact_mean = mean_nts(p, t).unwrap();
        assert!((m - exact_mean).abs() < 3.0 * se, "t {t}: mean {m} vs {exact_mean}");

        let sq: Vec<f64> = ys.iter().map(|y| (y - m).powi(2)).collect();
        let (v, v_se) = mean_se(&sq);
        let exact_var = cov_nts(p, t, t).unwrap();
        assert!((v - exact_var).abs() < 3.0 * v_se, "t {t}: var {v} vs {exact_var} (se {v_se})");
    }
}

fn log_slope(p: ModelParams, lo: f64, hi: f64) -> f64 {
    (msd_ys(p, hi).unwrap() / msd_ys(p, lo).unwrap()).ln() / (hi / lo).ln()
}

#[test]
fn subdiffusive_msd_regimes() {
    let p = ModelParams::new(0.8, 1.0, 0.0).unwrap();
    let small = log_slope(p, 1e-3, 1e-2);
    let large = log_slope(p, 1e2, 1e3);
    assert!((small - 0.8).abs() < 0.05, "small-lag slope {small}");
    assert!((large - 1.0).abs() < 0.05, "large-lag slope {large}");
}
