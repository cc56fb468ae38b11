//! Discrete sample paths of the subordinator `T`, its inverse `S`, the ABM `X`
//! and the two time-changed processes `Y_T = X(T)` and `Y_S = X(S)`.
//!
//! All samplers consume per-interval lengths, so grids need not be uniform.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{sample_standard_gaussian, sample_tempered_stable_increment, RandomStream};
use crate::params::{ModelParams, TemperParams};

/// Strictly increasing, non-negative sampling times (at least two).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Grid {
                row: points.len(),
                message: "a time grid needs at least two points".into(),
            });
        }
        if !(points[0].is_finite() && points[0] >= 0.0) {
            return Err(Error::Grid {
                row: 0,
                message: format!("first time must be finite and non-negative, got {}", points[0]),
            });
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].is_finite() && w[1] > w[0]) {
                return Err(Error::Grid {
                    row: i + 1,
                    message: format!("time {} does not exceed previous time {}", w[1], w[0]),
                });
            }
        }
        Ok(Self { points })
    }

    /// `n_points` equally spaced times covering `[0, t_max]`.
    pub fn uniform(t_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 || !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "uniform grid needs t_max > 0 and n_points >= 2 (got {t_max}, {n_points})"
            )));
        }
        let step = t_max / (n_points - 1) as f64;
        let mut points: Vec<f64> = (0..n_points).map(|i| i as f64 * step).collect();
        points[n_points - 1] = t_max;
        Self::new(points)
    }

    /// `n_points` times `0, step, 2 step, ...`.
    pub fn regular(step: f64, n_points: usize) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
        }
        Self::new((0..n_points).map(|i| i as f64 * step).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn min_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Common step if the grid is uniform to relative tolerance `rel_tol`.
    pub fn uniform_step(&self, rel_tol: f64) -> Option<f64> {
        let n = self.points.len() - 1;
        let step = (self.end() - self.start()) / n as f64;
        self.points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - step).abs() <= rel_tol * step)
            .then_some(step)
    }
}

/// Which process a path samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Subordinator,
    InverseSubordinator,
    Abm,
    Nts,
    Subdiffusive,
    /// Data read from a file; never simulated.
    Observed,
}

impl PathKind {
    pub fn is_clock(self) -> bool {
        matches!(self, PathKind::Subordinator | PathKind::InverseSubordinator)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PathKind::Subordinator => "subordinator",
            PathKind::InverseSubordinator => "inverse",
            PathKind::Abm => "abm",
            PathKind::Nts => "nts",
            PathKind::Subdiffusive => "subdiff",
            PathKind::Observed => "observed",
        }
    }
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PathKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subordinator" | "tss" => Ok(PathKind::Subordinator),
            "inverse" | "inverse_subordinator" => Ok(PathKind::InverseSubordinator),
            "abm" => Ok(PathKind::Abm),
            "nts" => Ok(PathKind::Nts),
            "subdiff" | "subdiffusive" => Ok(PathKind::Subdiffusive),
            "observed" => Ok(PathKind::Observed),
            other => Err(Error::Parse(format!("unknown process kind `{other}`"))),
        }
    }
}

/// Values of one trajectory on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub grid: Arc<TimeGrid>,
    pub values: Vec<f64>,
    pub kind: PathKind,
}

impl SamplePath {
    pub fn new(grid: Arc<TimeGrid>, values: Vec<f64>, kind: PathKind) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape {
                row: 0,
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values, kind })
    }

    pub fn times(&self) -> &[f64] {
        self.grid.points()
    }

    /// Successive differences `y[i+1] - y[i]`.
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Paths sharing one grid and one kind.
#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    pub shared_grid: Arc<TimeGrid>,
    pub paths: Vec<SamplePath>,
    pub master_seed: u64,
}

impl TrajectoryEnsemble {
    pub fn new(shared_grid: Arc<TimeGrid>, paths: Vec<SamplePath>, master_seed: u64) -> Result<Self> {
        let first = paths
            .first()
            .ok_or_else(|| Error::InvalidParameter("an ensemble needs at least one path".into()))?;
        let kind = first.kind;
        for p in &paths {
            if p.kind != kind || *p.grid != *shared_grid {
                return Err(Error::InvalidParameter(
                    "all paths of an ensemble must share grid and kind".into(),
                ));
            }
        }
        Ok(Self {
            shared_grid,
            paths,
            master_seed,
        })
    }

    pub fn kind(&self) -> PathKind {
        self.paths[0].kind
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Values of every path at grid index `i`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p.values[i]).collect()
    }
}

/// Interval lengths including the leading `[0, t_0]` piece (zero when `t_0 = 0`).
fn interval_lengths(grid: &TimeGrid) -> impl Iterator<Item = f64> + '_ {
    std::iter::once(grid.start()).chain(grid.points().windows(2).map(|w| w[1] - w[0]))
}

/// Tempered stable subordinator `T` on `grid`; `T(0) = 0`.
pub fn simulate_subordinator(params: TemperParams, grid: &Arc<TimeGrid>, stream: &mut RandomStream) -> SamplePath {
    let mut t = 0.0;
    let values = interval_lengths(grid)
        .map(|dt| {
            if dt > 0.0 {
                t += sample_tempered_stable_increment(stream, params, dt);
            }
            t
        })
        .collect();
    SamplePath {
        grid: Arc::clone(grid),
        values,
        kind: PathKind::Subordinator,
    }
}

/// Inverse subordinator path together with the internal clock it was read from.
#[derive(Debug, Clone)]
pub struct InverseRun {
    pub path: SamplePath,
    pub delta: f64,
    /// `T(n delta)` for `n = 0, 1, ..., N` where `T(N delta)` exceeds the last grid time.
    pub clock: Vec<f64>,
}

/// Default discretization of the internal clock: a tenth of the smallest grid step.
pub fn default_delta(grid: &TimeGrid) -> f64 {
    grid.min_step() / 10.0
}

/// First-passage construction `S(tau) = delta * min{n >= 1 : T(n delta) > tau}`,
/// with `S(0) = 0`. The bias against the continuous-time inverse is at most `delta`.
pub fn simulate_inverse_subordinator(
    params: TemperParams,
    tau_grid: &Arc<TimeGrid>,
    delta: f64,
    stream: &mut RandomStream,
) -> Result<SamplePath> {
    run_inverse(params, tau_grid, delta, stream, false).map(|r| r.path)
}

/// As [`simulate_inverse_subordinator`] but also returns the internal clock.
pub fn simulate_inverse_subordinator_with_clock(
    params: TemperParams,
    tau_grid: &Arc<TimeGrid>,
    delta: f64,
    stream: &mut RandomStream,
) -> Result<InverseRun> {
    run_inverse(params, tau_grid, delta, stream, true)
}

fn run_inverse(
    params: TemperParams,
    tau_grid: &Arc<TimeGrid>,
    delta: f64,
    stream: &mut RandomStream,
    keep_clock: bool,
) -> Result<InverseRun> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let mut clock = Vec::new();
    if keep_clock {
        clock.push(0.0);
    }
    let mut steps: u64 = 0;
    let mut level = 0.0;
    let values = tau_grid
        .points()
        .iter()
        .map(|&tau| {
            if tau == 0.0 {
                return 0.0;
            }
            while level <= tau {
                level += sample_tempered_stable_increment(stream, params, delta);
                steps += 1;
                if keep_clock {
                    clock.push(level);
                }
            }
            steps as f64 * delta
        })
        .collect();
    Ok(InverseRun {
        path: SamplePath {
            grid: Arc::clone(tau_grid),
            values,
            kind: PathKind::InverseSubordinator,
        },
        delta,
        clock,
    })
}

/// Arithmetic Brownian motion `X(t) = beta t + B(t)`, `X(0) = 0`.
pub fn simulate_abm(beta: f64, grid: &Arc<TimeGrid>, stream: &mut RandomStream) -> SamplePath {
    let mut x = 0.0;
    let values = interval_lengths(grid)
        .map(|dt| {
            if dt > 0.0 {
                x += beta * dt + dt.sqrt() * sample_standard_gaussian(stream);
            }
            x
        })
        .collect();
    SamplePath {
        grid: Arc::clone(grid),
        values,
        kind: PathKind::Abm,
    }
}

/// Normal tempered stable process `Y_T(t) = B(T(t)) + beta T(t)`:
/// `dY = N sqrt(dT) + beta dT` with the clock and the Gaussians drawn from
/// independent sub-streams.
pub fn simulate_nts(params: ModelParams, grid: &Arc<TimeGrid>, stream: &mut RandomStream) -> SamplePath {
    let mut clock_stream = stream.substream(0);
    let mut noise_stream = stream.substream(1);
    let temper = params.temper();
    let mut y = 0.0;
    let values = interval_lengths(grid)
        .map(|dt| {
            if dt > 0.0 {
                let d_t = sample_tempered_stable_increment(&mut clock_stream, temper, dt);
                y += sample_standard_gaussian(&mut noise_stream) * d_t.sqrt() + params.beta * d_t;
            }
            y
        })
        .collect();
    SamplePath {
        grid: Arc::clone(grid),
        values,
        kind: PathKind::Nts,
    }
}

/// Subdiffusive process `Y_S(tau) = beta S(tau) + B(S(tau))`.
///
/// `B` is evaluated at the non-decreasing operational times through independent
/// Gaussian increments over `S(tau_k) - S(tau_{k-1})`; flat stretches of `S`
/// therefore give exactly flat stretches of `Y_S`.
pub fn simulate_subdiffusive(
    params: ModelParams,
    tau_grid: &Arc<TimeGrid>,
    delta: f64,
    stream: &mut RandomStream,
) -> Result<SamplePath> {
    let mut clock_stream = stream.substream(0);
    let mut noise_stream = stream.substream(1);
    let s = simulate_inverse_subordinator(params.temper(), tau_grid, delta, &mut clock_stream)?;
    Ok(time_change_abm(params.beta, &s, &mut noise_stream))
}

/// Evaluates an ABM along a non-decreasing operational-time path.
pub(crate) fn time_change_abm(beta: f64, operational: &SamplePath, noise: &mut RandomStream) -> SamplePath {
    let mut prev_s = 0.0;
    let mut b = 0.0;
    let values = operational
        .values
        .iter()
        .map(|&s| {
            let ds = s - prev_s;
            if ds > 0.0 {
                b += ds.sqrt() * sample_standard_gaussian(noise);
            }
            prev_s = s;
            beta * s + b
        })
        .collect();
    SamplePath {
        grid: Arc::clone(&operational.grid),
        values,
        kind: PathKind::Subdiffusive,
    }
}

/// One path of `kind` from a trajectory stream.
pub fn simulate_path(
    kind: PathKind,
    params: ModelParams,
    grid: &Arc<TimeGrid>,
    delta: f64,
    stream: &mut RandomStream,
) -> Result<SamplePath> {
    match kind {
        PathKind::Subordinator => Ok(simulate_subordinator(params.temper(), grid, stream)),
        PathKind::InverseSubordinator => simulate_inverse_subordinator(params.temper(), grid, delta, stream),
        PathKind::Abm => Ok(simulate_abm(params.beta, grid, stream)),
        PathKind::Nts => Ok(simulate_nts(params, grid, stream)),
        PathKind::Subdiffusive => simulate_subdiffusive(params, grid, delta, stream),
        PathKind::Observed => Err(Error::InvalidParameter("observed data cannot be simulated".into())),
    }
}

/// `n_paths` independent paths with `stream_index = 0..n_paths`, using the
/// default clock discretization for the inverse-subordinator kinds.
pub fn simulate_ensemble(
    kind: PathKind,
    params: ModelParams,
    grid: &TimeGrid,
    n_paths: usize,
    master_seed: u64,
) -> Result<TrajectoryEnsemble> {
    simulate_ensemble_with_delta(kind, params, grid, n_paths, master_seed, default_delta(grid))
}

/// As [`simulate_ensemble`] with an explicit clock step `delta`.
///
/// Paths are generated in parallel but indexed by stream, so the result is
/// identical for every worker count.
pub fn simulate_ensemble_with_delta(
    kind: PathKind,
    params: ModelParams,
    grid: &TimeGrid,
    n_paths: usize,
    master_seed: u64,
    delta: f64,
) -> Result<TrajectoryEnsemble> {
    if n_paths == 0 {
        return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
    }
    params.validate()?;
    let grid = Arc::new(grid.clone());
    let paths = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = RandomStream::new(master_seed, i);
            simulate_path(kind, params, &grid, delta, &mut stream)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryEnsemble {
        shared_grid: grid,
        paths,
        master_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(n: usize) -> Arc<TimeGrid> {
        Arc::new(TimeGrid::regular(1.0, n).unwrap())
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![0.0]).is_err());
        match TimeGrid::new(vec![0.0, 1.0, 1.0, 2.0]) {
            Err(Error::Grid { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        assert!(TimeGrid::new(vec![-1.0, 1.0]).is_err());
        let g = TimeGrid::uniform(1.0, 11).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g.uniform_step(1e-9).unwrap() - 0.1).abs() < 1e-12);
        let irregular = TimeGrid::new(vec![0.0, 0.5, 2.0]).unwrap();
        assert!(irregular.uniform_step(1e-9).is_none());
        assert_eq!(irregular.min_step(), 0.5);
    }

    #[test]
    fn untempered_subordinator_is_cumulative_scaled_stable() {
        let p = TemperParams::new(0.9, 0.0).unwrap();
        let grid = Arc::new(TimeGrid::new(vec![0.0, 0.5, 1.5, 1.75]).unwrap());
        let path = simulate_subordinator(p, &grid, &mut RandomStream::new(11, 0));
        let mut s = RandomStream::new(11, 0);
        let mut acc = 0.0;
        let mut expected = vec![0.0];
        for dt in [0.5f64, 1.0, 0.25] {
            acc += dt.powf(1.0 / 0.9) * crate::kernel::sample_positive_stable(&mut s, p.stable());
            expected.push(acc);
        }
        assert_eq!(path.values, expected);
    }

    #[test]
    fn clock_paths_are_monotone() {
        let p = TemperParams::new(0.26, 6.0).unwrap();
        let grid = unit_grid(200);
        for i in 0..5 {
            let t = simulate_subordinator(p, &grid, &mut RandomStream::new(1, i));
            assert!(t.values.windows(2).all(|w| w[1] >= w[0]));
            assert_eq!(t.values[0], 0.0);
            let s = simulate_inverse_subordinator(p, &grid, 0.1, &mut RandomStream::new(2, i)).unwrap();
            assert!(s.values.windows(2).all(|w| w[1] >= w[0]));
            assert!(s.values.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn inverse_subordinator_at_zero_and_flat_segments() {
        let p = TemperParams::new(0.26, 6.0).unwrap();
        let grid = Arc::new(TimeGrid::uniform(20.0, 401).unwrap());
        let s = simulate_inverse_subordinator(p, &grid, 0.01, &mut RandomStream::new(3, 0)).unwrap();
        assert!(s.values[0] <= 0.01);
        let flats = s.values.windows(2).filter(|w| w[1] == w[0]).count();
        let jumps = s.values.windows(2).filter(|w| w[1] > w[0]).count();
        assert!(flats > 50, "expected flat segments, got {flats}");
        assert!(jumps > 5);
    }

    #[test]
    fn inverse_first_passage_consistency() {
        let p = TemperParams::new(0.6, 0.5).unwrap();
        let grid = Arc::new(TimeGrid::uniform(10.0, 101).unwrap());
        let run = simulate_inverse_subordinator_with_clock(p, &grid, 0.05, &mut RandomStream::new(4, 0)).unwrap();
        let last = *run.clock.last().unwrap();
        assert!(last > grid.end());
        for (&tau, &s) in grid.points().iter().zip(&run.path.values) {
            if tau == 0.0 {
                continue;
            }
            let n = (s / run.delta).round() as usize;
            assert!(run.clock[n] > tau);
            assert!(run.clock[n - 1] <= tau);
        }
    }

    #[test]
    fn subdiffusive_freezes_with_clock() {
        let params = ModelParams::new(0.8, 1.0, 1.0).unwrap();
        let grid = Arc::new(TimeGrid::uniform(1.0, 1001).unwrap());
        let mut stream = RandomStream::new(9, 0);
        let y = simulate_subdiffusive(params, &grid, 1e-4, &mut stream).unwrap();
        let mut clock_stream = RandomStream::new(9, 0).substream(0);
        let s = simulate_inverse_subordinator(params.temper(), &grid, 1e-4, &mut clock_stream).unwrap();
        let mut flats = 0;
        for k in 1..grid.len() {
            let ds = s.values[k] - s.values[k - 1];
            let dy = y.values[k] - y.values[k - 1];
            if ds == 0.0 {
                assert_eq!(dy, 0.0);
                flats += 1;
            } else {
                assert_ne!(dy, 0.0);
            }
        }
        assert!(flats > 0);
        assert_eq!(y.values[0], 0.0);
    }

    #[test]
    fn nts_has_no_flat_periods() {
        let params = ModelParams::new(0.8, 1.0, 1.0).unwrap();
        let grid = Arc::new(TimeGrid::uniform(1.0, 1001).unwrap());
        let y = simulate_nts(params, &grid, &mut RandomStream::new(10, 0));
        assert_eq!(y.values[0], 0.0);
        assert!(y.values.windows(2).all(|w| w[1] != w[0]));
    }

    #[test]
    fn grid_starting_after_zero() {
        let grid = Arc::new(TimeGrid::new(vec![1.0, 2.0]).unwrap());
        let x = simulate_abm(0.0, &grid, &mut RandomStream::new(1, 1));
        assert_ne!(x.values[0], 0.0);
    }

    #[test]
    fn ensemble_of_one_matches_single_stream() {
        let params = ModelParams::new(0.5, 1.0, 0.3).unwrap();
        let grid = TimeGrid::regular(1.0, 50).unwrap();
        let e = simulate_ensemble(PathKind::Nts, params, &grid, 1, 77).unwrap();
        let single = simulate_nts(params, &Arc::new(grid), &mut RandomStream::new(77, 0));
        assert_eq!(e.paths[0].values, single.values);
    }

    #[test]
    fn ensemble_rejects_zero_paths() {
        let params = ModelParams::new(0.5, 1.0, 0.3).unwrap();
        let grid = TimeGrid::regular(1.0, 5).unwrap();
        assert!(simulate_ensemble(PathKind::Abm, params, &grid, 0, 1).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in [
            PathKind::Subordinator,
            PathKind::InverseSubordinator,
            PathKind::Abm,
            PathKind::Nts,
            PathKind::Subdiffusive,
            PathKind::Observed,
        ] {
            assert_eq!(k.as_str().parse::<PathKind>().unwrap(), k);
        }
    }
}
