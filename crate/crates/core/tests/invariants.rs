//! Property tests for the structural invariants of samplers, paths,
//! transforms, estimators and file formats.

use std::sync::Arc;

use proptest::prelude::*;
use subordinated::analytics::{
    cov_nts, fit_msd, laplace_nts, laplace_subordinator, mean_nts, mittag_leffler, msd_nts, LaplaceQuery, MsdCurve,
    MsdModel,
};
use subordinated::error::Error;
use subordinated::estimation::{
    decompose_constant_periods, empirical_laplace, estimate_nts, IncrementSeries, NtsConfig,
};
use subordinated::kernel::{sample_tempered_stable_increment, RandomStream};
use subordinated::params::{ModelParams, StableParams, TemperParams};
use subordinated::paths::{
    simulate_abm, simulate_inverse_subordinator, simulate_inverse_subordinator_with_clock, simulate_nts,
    simulate_subdiffusive, simulate_subordinator, PathKind, SamplePath, TimeGrid, TrajectoryEnsemble,
};
use subordinated::pipeline::{read_ensemble, write_ensemble};

fn alpha() -> impl Strategy<Value = f64> {
    0.05f64..0.95
}

/// Strictly increasing grid from positive gaps, starting at zero.
fn grid(max_len: usize) -> impl Strategy<Value = Arc<TimeGrid>> {
    prop::collection::vec(0.01f64..2.0, 2..max_len).prop_map(|gaps| {
        let mut t = 0.0;
        let mut pts = vec![0.0];
        for g in gaps {
            t += g;
            pts.push(t);
        }
        Arc::new(TimeGrid::new(pts).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn streams_replay_bitwise(seed in any::<u64>(), index in any::<u64>(), a in alpha(), lambda in 0.0f64..5.0) {
        let p = TemperParams::new(a, lambda).unwrap();
        let mut s1 = RandomStream::new(seed, index);
        let mut s2 = RandomStream::new(seed, index);
        for _ in 0..16 {
            let (x, y) = (sample_tempered_stable_increment(&mut s1, p, 0.7), sample_tempered_stable_increment(&mut s2, p, 0.7));
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn subordinator_increments_are_positive(seed in any::<u64>(), a in alpha(), lambda in 0.0f64..10.0, dt in 1e-3f64..5.0) {
        let p = TemperParams::new(a, lambda).unwrap();
        let mut s = RandomStream::new(seed, 0);
        for _ in 0..32 {
            let x = sample_tempered_stable_increment(&mut s, p, dt);
            prop_assert!(x > 0.0 && x.is_finite(), "{x}");
        }
    }

    #[test]
    fn clock_paths_are_non_decreasing_from_zero(seed in any::<u64>(), a in alpha(), lambda in 0.0f64..3.0, g in grid(40)) {
        let p = TemperParams::new(a, lambda).unwrap();
        let mut s = RandomStream::new(seed, 1);
        let t = simulate_subordinator(p, &g, &mut s);
        let inv = simulate_inverse_subordinator(p, &g, g.min_step() / 10.0, &mut s).unwrap();
        for path in [&t, &inv] {
            prop_assert_eq!(path.values[0], 0.0);
            prop_assert!(path.values.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!(path.values.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn inverse_is_first_passage_of_its_clock(seed in any::<u64>(), a in alpha(), lambda in 0.0f64..3.0, g in grid(30)) {
        let p = TemperParams::new(a, lambda).unwrap();
        let delta = g.min_step() / 10.0;
        let run = simulate_inverse_subordinator_with_clock(p, &g, delta, &mut RandomStream::new(seed, 2)).unwrap();
        for (&tau, &s) in g.points().iter().zip(&run.path.values).skip(1) {
            let n = (s / delta).round() as usize;
            // T((n-1) delta) <= tau < T(n delta)
            prop_assert!(run.clock[n] > tau);
            prop_assert!(run.clock[n - 1] <= tau);
        }
        // S(T(n delta) + eps) >= n delta along the stored clock
        for (n, &level) in run.clock.iter().enumerate().skip(1) {
            if let Some(k) = g.points().iter().position(|&tau| tau > level) {
                prop_assert!(run.path.values[k] >= n as f64 * delta - 1e-9 * delta);
            }
        }
    }

    #[test]
    fn subdiffusive_is_flat_exactly_where_the_clock_is(seed in any::<u64>(), a in alpha(), lambda in 0.0f64..2.0, beta in -1.0f64..1.0, g in grid(40)) {
        let p = ModelParams::new(a, lambda, beta).unwrap();
        let delta = g.min_step() / 4.0;
        let stream = RandomStream::new(seed, 3);
        let y = simulate_subdiffusive(p, &g, delta, &mut stream.clone()).unwrap();
        let s = simulate_inverse_subordinator(p.temper(), &g, delta, &mut stream.substream(0)).unwrap();
        for k in 1..g.len() {
            prop_assert_eq!(y.values[k] == y.values[k - 1], s.values[k] == s.values[k - 1], "k = {}", k);
        }
    }

    #[test]
    fn transforms_equal_one_at_zero_and_are_bounded(a in alpha(), lambda in 0.01f64..10.0, beta in -2.0f64..2.0, t in 0.0f64..5.0, u in 0.0f64..1.0) {
        let p = ModelParams::new(a, lambda, beta).unwrap();
        prop_assert_eq!(laplace_nts(p, LaplaceQuery::new(0.0, t).unwrap()).unwrap(), 1.0);
        prop_assert_eq!(laplace_subordinator(p.temper(), LaplaceQuery::new(0.0, t).unwrap()), 1.0);
        prop_assert!(laplace_subordinator(p.temper(), LaplaceQuery::new(5.0 * u, t).unwrap()) <= 1.0);
        if beta > 0.0 {
            let at = laplace_nts(p, LaplaceQuery::new(2.0 * beta, t).unwrap()).unwrap();
            prop_assert!((at - 1.0).abs() < 1e-12, "{at}");
            let inside = laplace_nts(p, LaplaceQuery::new(2.0 * beta * u, t).unwrap()).unwrap();
            prop_assert!(inside <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn msd_is_squared_mean_plus_variance(a in alpha(), lambda in 0.01f64..10.0, beta in -2.0f64..2.0, t in 0.01f64..100.0) {
        let p = ModelParams::new(a, lambda, beta).unwrap();
        let lhs = msd_nts(p, t).unwrap();
        let rhs = mean_nts(p, t).unwrap().powi(2) + cov_nts(p, t, t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }

    #[test]
    fn mittag_leffler_unit_indices_is_exp(x in -5.0f64..5.0) {
        let e = mittag_leffler(1.0, 1.0, x).unwrap();
        prop_assert!((e / x.exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_power_law_msd_is_recovered(c in 0.01f64..10.0, p_small in 0.1f64..2.4, p_large in 0.1f64..2.4) {
        let lags: Vec<f64> = (1..=80).map(|i| i as f64 * 0.5).collect();
        let split = lags[40];
        let values = lags
            .iter()
            .map(|&t| if t <= split { c * t.powf(p_small) } else { c * split.powf(p_small - p_large) * t.powf(p_large) })
            .collect();
        let fit = fit_msd(&MsdCurve::new(lags, values, 10).unwrap(), MsdModel::TwoRegimePower).unwrap();
        prop_assert!((fit.coefficients[1] - p_small).abs() < 1e-6);
        prop_assert!((fit.coefficients[3] - p_large).abs() < 1e-6);
        prop_assert!(fit.coefficients.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn empirical_transform_is_one_at_zero_and_monotone_for_positive_increments(xs in prop::collection::vec(0.0f64..5.0, 1..50)) {
        let inc = IncrementSeries::new(xs, 1.0).unwrap();
        prop_assert_eq!(empirical_laplace(&inc, 0.0).unwrap(), 1.0);
        let mut prev = 1.0;
        for i in 1..20 {
            let v = empirical_laplace(&inc, i as f64 * 0.1).unwrap();
            prop_assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn decomposition_reassembles(values in prop::collection::vec((0i32..4, 1usize..5), 4..40)) {
        // runs of small integers so exact repeats are common
        let series: Vec<f64> = values.iter().flat_map(|&(v, k)| std::iter::repeat_n(v as f64, k)).collect();
        match decompose_constant_periods(&series, 0.5, 0.0, 1) {
            Ok(d) => {
                prop_assert_eq!(d.original_len(), series.len());
                prop_assert_eq!(d.reassemble(), series);
                prop_assert!(d.waiting_times.iter().all(|&w| w >= 2.0 * 0.5));
            }
            Err(Error::NoConstantPeriods { .. }) => {
                prop_assert!(series.windows(2).all(|w| w[0] != w[1]));
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn csv_round_trip_is_lossless(cols in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 6), 1..4)) {
        let grid = Arc::new(TimeGrid::regular(0.1, 6).unwrap());
        let paths = cols.into_iter().map(|v| SamplePath::new(grid.clone(), v, PathKind::Observed).unwrap()).collect();
        let e = TrajectoryEnsemble::new(grid, paths, 0).unwrap();
        let mut buf = Vec::new();
        write_ensemble(&mut buf, &e).unwrap();
        let back = read_ensemble(buf.as_slice()).unwrap();
        prop_assert_eq!(back.ensemble.shared_grid.points(), e.shared_grid.points());
        for (a, b) in back.ensemble.paths.iter().zip(&e.paths) {
            prop_assert_eq!(&a.values, &b.values);
        }
    }

    #[test]
    fn stable_alpha_must_be_open_interval(a in prop_oneof![Just(0.0), Just(1.0), -1.0f64..0.0, 1.0f64..3.0]) {
        prop_assert!(StableParams::new(a).is_err());
        prop_assert!(ModelParams::new(a, 1.0, 0.0).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn nts_estimate_ignores_location(seed in any::<u64>(), shift in -1000i32..1000) {
        let p = ModelParams::new(0.5, 2.0, 0.2).unwrap();
        let g = Arc::new(TimeGrid::regular(1.0, 200).unwrap());
        let path = simulate_nts(p, &g, &mut RandomStream::new(seed, 0));
        // quantized readings, so the shift is exact and the increments are unchanged
        let q = 2f64.powi(20);
        let y: Vec<f64> = path.values.iter().map(|v| (v * q).round() / q).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + shift as f64).collect();
        let cfg = NtsConfig::default();
        let r1 = estimate_nts(&IncrementSeries::from_observations(&y, 1.0).unwrap(), &cfg);
        let r2 = estimate_nts(&IncrementSeries::from_observations(&shifted, 1.0).unwrap(), &cfg);
        prop_assert_eq!(format!("{r1:?}"), format!("{r2:?}"));
    }

    #[test]
    fn brownian_motion_has_no_constant_periods(seed in any::<u64>(), beta in -1.0f64..1.0) {
        let g = Arc::new(TimeGrid::regular(1.0, 2000).unwrap());
        let x = simulate_abm(beta, &g, &mut RandomStream::new(seed, 0));
        let is_no_periods = matches!(
            decompose_constant_periods(&x.values, 1.0, 0.0, 1),
            Err(Error::NoConstantPeriods { .. })
        );
        prop_assert!(is_no_periods);
    }
}
