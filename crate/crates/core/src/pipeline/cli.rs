//! Argument definitions and dispatch for the `subordinated` command.
//!
//! Every subcommand renders its output into a byte buffer first, so the same
//! arguments always write the same bytes regardless of the worker count.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use super::calibration::{run_calibration, CalibrationConfig, ModelChoice, SelectionRule};
use super::csvio::{ingest_csv_labeled, write_ensemble};
use super::report::{format_float, render_calibration, to_csv, to_json, write_output, OutputFormat};
use super::Provenance;
use crate::analytics::{
    empirical_msd, fit_msd_with, laplace_inverse_subordinator, laplace_nts, laplace_subordinator, laplace_ys,
    nts_pdf, stable_pdf, tempered_stable_pdf, InverseSubordinatorLaw, LaplaceQuery, MsdCurve, MsdFit, MsdModel,
    RegimeWindows,
};
use crate::error::{Error, Result};
use crate::estimation::{
    validate_estimator, z_domain_edge, EstimatorKind, NtsConfig, SubdiffusiveConfig, TailMethod, ValidationConfig,
    ValidationSummary,
};
use crate::params::ModelParams;
use crate::paths::{default_delta, simulate_ensemble_with_delta, PathKind, TimeGrid, TrajectoryEnsemble};

#[derive(Debug, Parser)]
#[command(name = "subordinated", version, about = "Simulate, analyze and calibrate subordinated Brownian motion")]
pub struct Cli {
    /// Worker threads for simulation and estimation; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Simulate an ensemble of paths and write it as `t,traj_0,...`.
    Simulate(SimulateArgs),
    /// Estimate parameters of every trajectory in a CSV file.
    Estimate(EstimateArgs),
    /// Ensemble MSD of a CSV file with a fitted curve.
    Msd(MsdArgs),
    /// Repeated simulate-and-estimate at known parameters.
    Validate(ValidateArgs),
    /// Analytic Laplace transform on a z-grid, optionally against data.
    Transform(TransformArgs),
    /// Analytic density on an x-grid.
    Density(DensityArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Estimate(_) => "estimate",
            Command::Msd(_) => "msd",
            Command::Validate(_) => "validate",
            Command::Transform(_) => "transform",
            Command::Density(_) => "density",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ParamArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
}

impl ParamArgs {
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.alpha, self.lambda, self.beta)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    // not echoed, so the bytes do not depend on the file name
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// csv or json; inferred from the `--out` extension when omitted.
    #[arg(long)]
    pub format: Option<OutputFormat>,
}

impl OutputArgs {
    pub fn format(&self) -> OutputFormat {
        self.format.unwrap_or_else(|| OutputFormat::infer(self.out.as_deref()))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// nts, subdiff, subordinator, inverse or abm.
    #[arg(long)]
    pub model: PathKind,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub t_max: f64,
    #[arg(long)]
    pub n_points: usize,
    #[arg(long, default_value_t = 1)]
    pub n_paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Clock step of the inverse subordinator; defaults to a tenth of the grid step.
    #[arg(long)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    /// nts, subdiff, or auto to pick the model from the MSD.
    #[arg(long, default_value = "auto")]
    pub model: ModelChoice,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Tolerance for treating consecutive observations as one constant period.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Upper end of the first z-grid.
    #[arg(long)]
    pub z_max: Option<f64>,
    #[arg(long)]
    pub tail_method: Option<TailMethod>,
    #[arg(long)]
    pub min_runs: Option<usize>,
    #[arg(long)]
    pub p_small_max: Option<f64>,
    #[arg(long)]
    pub residual_margin: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl EstimateArgs {
    pub fn config(&self) -> Result<CalibrationConfig> {
        let mut cfg = CalibrationConfig {
            model: self.model,
            ..CalibrationConfig::default()
        };
        apply_estimator_options(
            &mut cfg.nts,
            &mut cfg.subdiffusive,
            self.z_max,
            self.epsilon,
            self.tail_method,
            self.min_runs,
        )?;
        let SelectionRule {
            p_small_max,
            residual_margin,
        } = &mut cfg.selection;
        if let Some(p) = self.p_small_max {
            *p_small_max = p;
        }
        if let Some(m) = self.residual_margin {
            if !(m > 0.0) {
                return Err(Error::InvalidParameter(format!("residual margin must be positive, got {m}")));
            }
            *residual_margin = m;
        }
        Ok(cfg)
    }
}

fn apply_estimator_options(
    nts: &mut NtsConfig,
    sub: &mut SubdiffusiveConfig,
    z_max: Option<f64>,
    epsilon: Option<f64>,
    tail_method: Option<TailMethod>,
    min_runs: Option<usize>,
) -> Result<()> {
    if let Some(z) = z_max {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidParameter(format!("z-max must be positive, got {z}")));
        }
        nts.z_max = Some(z);
    }
    if let Some(e) = epsilon {
        if !(e >= 0.0 && e.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be non-negative, got {e}")));
        }
        sub.epsilon = e;
    }
    if let Some(t) = tail_method {
        sub.tail_method = t;
    }
    if let Some(m) = min_runs {
        sub.min_runs = m;
    }
    Ok(())
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Parse(format!("window must be `lo,hi` with 0 <= lo < hi, got `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo >= 0.0 && hi > lo && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MsdArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// poly2 (a t^2 + b t) or power2 (two power-law regimes).
    #[arg(long, default_value = "poly2")]
    pub fit: MsdModel,
    /// Lag window `lo,hi` of the small-lag regime.
    #[arg(long, value_parser = parse_window)]
    pub small_window: Option<(f64, f64)>,
    /// Lag window `lo,hi` of the large-lag regime.
    #[arg(long, value_parser = parse_window)]
    pub large_window: Option<(f64, f64)>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_estimator(s: &str) -> Result<EstimatorKind> {
    match s {
        "nts" => Ok(EstimatorKind::Nts),
        "subdiff" | "subdiffusive" => Ok(EstimatorKind::Subdiffusive),
        other => Err(Error::Parse(format!("unknown estimator '{other}', expected nts or subdiff"))),
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ValidateArgs {
    /// nts or subdiff.
    #[arg(long, value_parser = parse_estimator)]
    pub model: EstimatorKind,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub reps: usize,
    /// Observations per replication.
    #[arg(long)]
    pub len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub z_max: Option<f64>,
    #[arg(long)]
    pub tail_method: Option<TailMethod>,
    #[arg(long)]
    pub min_runs: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl ValidateArgs {
    pub fn config(&self) -> Result<ValidationConfig> {
        let mut cfg = ValidationConfig {
            dt: self.dt,
            delta: self.delta,
            ..ValidationConfig::default()
        };
        apply_estimator_options(
            &mut cfg.nts,
            &mut cfg.subdiffusive,
            self.z_max,
            self.epsilon,
            self.tail_method,
            self.min_runs,
        )?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TransformArgs {
    /// nts, subdiff, subordinator or inverse.
    #[arg(long)]
    pub model: PathKind,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Process time of the transform. Ignored for nts and subordinator when `--in` is given,
    /// where the sampling step of the file is used.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Largest z; defaults to 0.9 of the domain edge for nts and 1 otherwise.
    #[arg(long)]
    pub z_max: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub n_z: usize,
    /// Observed paths to compare against.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DensityModel {
    /// One-sided stable law of `T(1)` without tempering.
    Stable,
    /// Tempered stable `T(t)`.
    Tempered,
    /// Inverse subordinator `S(t)`.
    Inverse,
    /// `Y_T(t)`.
    Nts,
    /// `Y_S(t)`.
    Subdiff,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub model: DensityModel,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long)]
    pub x_min: f64,
    #[arg(long)]
    pub x_max: f64,
    #[arg(long, default_value_t = 200)]
    pub n_x: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses the arguments, runs the command on a pool of `--threads` workers and
/// writes its output.
pub fn run(cli: Cli) -> Result<()> {
    let out = cli.command.output().out.clone();
    let bytes = match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("cannot start {n} worker threads: {e}")))?;
            pool.install(|| render(&cli.command))?
        }
        None => render(&cli.command)?,
    };
    write_output(&bytes, out.as_deref())
}

impl Command {
    fn output(&self) -> &OutputArgs {
        match self {
            Command::Simulate(a) => &a.output,
            Command::Estimate(a) => &a.output,
            Command::Msd(a) => &a.output,
            Command::Validate(a) => &a.output,
            Command::Transform(a) => &a.output,
            Command::Density(a) => &a.output,
        }
    }
}

/// The bytes a command writes.
pub fn render(command: &Command) -> Result<Vec<u8>> {
    let format = command.output().format();
    log::info!("running {}", command.name());
    match command {
        Command::Simulate(a) => simulate(a, format),
        Command::Estimate(a) => estimate(a, format),
        Command::Msd(a) => msd(a, format),
        Command::Validate(a) => validate(a, format),
        Command::Transform(a) => transform(a, format),
        Command::Density(a) => density(a, format),
    }
}

fn display_path(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationOutput {
    pub provenance: Provenance,
    pub config: SimulateArgs,
    pub delta: f64,
    pub t: Vec<f64>,
    pub trajectories: Vec<Vec<f64>>,
}

fn simulate(a: &SimulateArgs, format: OutputFormat) -> Result<Vec<u8>> {
    let params = a.params.params()?;
    if a.model == PathKind::Observed {
        return Err(Error::InvalidParameter("observed data cannot be simulated".into()));
    }
    let grid = TimeGrid::uniform(a.t_max, a.n_points)?;
    let delta = a.delta.unwrap_or_else(|| default_delta(&grid));
    let ensemble = simulate_ensemble_with_delta(a.model, params, &grid, a.n_paths, a.seed, delta)?;
    match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_ensemble(&mut buf, &ensemble)?;
            Ok(buf)
        }
        OutputFormat::Json => to_json(&SimulationOutput {
            provenance: Provenance::new("simulate", Some(a.seed), None),
            config: a.clone(),
            delta,
            t: grid.points().to_vec(),
            trajectories: ensemble.paths.into_iter().map(|p| p.values).collect(),
        }),
    }
}

fn estimate(a: &EstimateArgs, format: OutputFormat) -> Result<Vec<u8>> {
    let cfg = a.config()?;
    let data = ingest_csv_labeled(&a.input)?;
    let report = run_calibration(
        &data.ensemble,
        &data.names,
        &cfg,
        Provenance::new("estimate", None, Some(display_path(&a.input))),
    )?;
    for row in &report.rows {
        if let Some(e) = &row.error {
            log::warn!("{}: {e}", row.trajectory);
        }
    }
    render_calibration(&report, format)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MsdOutput {
    pub provenance: Provenance,
    pub config: MsdArgs,
    pub curve: MsdCurve,
    pub fit: MsdFit,
}

fn msd(a: &MsdArgs, format: OutputFormat) -> Result<Vec<u8>> {
    let data = ingest_csv_labeled(&a.input)?;
    let curve = empirical_msd(&data.ensemble);
    let windows = RegimeWindows {
        small: a.small_window,
        large: a.large_window,
    };
    let fit = fit_msd_with(&curve, a.fit, windows)?;
    match format {
        OutputFormat::Csv => to_csv(
            &["lag", "msd", "fit"],
            curve
                .lags
                .iter()
                .zip(&curve.values)
                .map(|(&t, &m)| vec![format_float(t), format_float(m), format_float(fit.predict(t))]),
        ),
        OutputFormat::Json => to_json(&MsdOutput {
            provenance: Provenance::new("msd", None, Some(display_path(&a.input))),
            config: a.clone(),
            curve,
            fit,
        }),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationOutput {
    pub provenance: Provenance,
    pub config: ValidateArgs,
    pub estimator_config: ValidationConfig,
    pub summary: ValidationSummary,
}

fn validate(a: &ValidateArgs, format: OutputFormat) -> Result<Vec<u8>> {
    let cfg = a.config()?;
    let summary = validate_estimator(a.model, a.params.params()?, a.reps, a.len, a.seed, &cfg)?;
    for f in &summary.failures {
        log::warn!("replication {}: {}", f.replication, f.error);
    }
    match format {
        OutputFormat::Csv => {
            let mut rows: Vec<(usize, Vec<String>)> = summary
                .estimates
                .iter()
                .map(|e| {
                    (
                        e.replication,
                        vec![format_float(e.alpha), format_float(e.lambda), format_float(e.beta)],
                    )
                })
                .chain(summary.failures.iter().map(|f| (f.replication, vec![String::new(); 3])))
                .collect();
            rows.sort_by_key(|r| r.0);
            to_csv(
                &["replication", "alpha", "lambda", "beta"],
                rows.into_iter().map(|(r, mut cells)| {
                    cells.insert(0, r.to_string());
                    cells
                }),
            )
        }
        OutputFormat::Json => to_json(&ValidationOutput {
            provenance: Provenance::new("validate", Some(a.seed), None),
            config: a.clone(),
            estimator_config: cfg,
            summary,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRow {
    pub z: f64,
    pub analytic: f64,
    pub empirical: Option<f64>,
    /// Monte Carlo standard error of `empirical`.
    pub standard_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformOutput {
    pub provenance: Provenance,
    pub config: TransformArgs,
    /// Process time the analytic transform was evaluated at.
    pub t: f64,
    /// Number of observations behind each empirical value.
    pub n_samples: Option<usize>,
    pub rows: Vec<TransformRow>,
}

/// Samples whose transform is compared with the analytic one: pooled
/// increments for the Lévy processes, displacements at lag `t` otherwise.
fn transform_samples(kind: PathKind, e: &TrajectoryEnsemble, t: f64) -> Result<(f64, Vec<f64>)> {
    let grid = &e.shared_grid;
    match kind {
        PathKind::Nts | PathKind::Subordinator => {
            let dt = grid
                .uniform_step(1e-9)
                .ok_or_else(|| Error::InvalidParameter("increments need equally spaced observations".into()))?;
            Ok((dt, e.paths.iter().flat_map(|p| p.increments()).collect()))
        }
        _ => {
            let target = grid.start() + t;
            let k = grid
                .points()
                .iter()
                .position(|&s| (s - target).abs() <= 1e-9 * target.max(1.0))
                .filter(|&k| k > 0)
                .ok_or_else(|| Error::InvalidParameter(format!("lag {t} is not a lag of the input grid")))?;
            Ok((t, e.paths.iter().map(|p| p.values[k] - p.values[0]).collect()))
        }
    }
}

fn analytic_transform(kind: PathKind, p: ModelParams, t: f64, z: f64) -> Result<f64> {
    match kind {
        PathKind::Nts => laplace_nts(p, LaplaceQuery::new(z, t)?),
        PathKind::Subordinator => Ok(laplace_subordinator(p.temper(), LaplaceQuery::new(z, t)?)),
        PathKind::Subdiffusive => laplace_ys(p, t, z),
        PathKind::InverseSubordinator => laplace_inverse_subordinator(p.temper(), t, z),
        other => Err(Error::InvalidParameter(format!("no transform for `{other}`"))),
    }
}

fn transform(a: &TransformArgs, format: OutputFormat) -> Result<Vec<u8>> {
    let p = a.params.params()?;
    if a.n_z == 0 {
        return Err(Error::InvalidParameter("n-z must be at least 1".into()));
    }
    let z_max = match a.z_max {
        Some(z) if z > 0.0 && z.is_finite() => z,
        Some(z) => return Err(Error::InvalidParameter(format!("z-max must be positive, got {z}"))),
        None if a.model == PathKind::Nts => 0.9 * z_domain_edge(p.lambda, p.beta),
        None => 1.0,
    };
    let (t, samples) = match &a.input {
        Some(path) => {
            let (t, s) = transform_samples(a.model, &ingest_csv_labeled(path)?.ensemble, a.t)?;
            (t, Some(s))
        }
        None => (a.t, None),
    };
    let rows = (1..=a.n_z)
        .map(|i| {
            let z = z_max * i as f64 / a.n_z as f64;
            let analytic = analytic_transform(a.model, p, t, z)?;
            let (empirical, standard_error) = match &samples {
                Some(s) => {
                    let (m, se) = mean_and_error(s.iter().map(|x| (-z * x).exp()));
                    (Some(m), Some(se))
                }
                None => (None, None),
            };
            Ok(TransformRow {
                z,
                analytic,
                empirical,
                standard_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    match format {
        OutputFormat::Csv => {
            let with_data = samples.is_some();
            let header: &[&str] = if with_data {
                &["z", "analytic", "empirical", "standard_error"]
            } else {
                &["z", "analytic"]
            };
            to_csv(
                header,
                rows.iter().map(|r| {
                    let mut cells = vec![format_float(r.z), format_float(r.analytic)];
                    if with_data {
                        cells.push(format_float(r.empirical.unwrap_or(f64::NAN)));
                        cells.push(format_float(r.standard_error.unwrap_or(f64::NAN)));
                    }
                    cells
                }),
            )
        }
        OutputFormat::Json => to_json(&TransformOutput {
            provenance: Provenance::new("transform", None, a.input.as_deref().map(display_path)),
            config: a.clone(),
            t,
            n_samples: samples.as_ref().map(Vec::len),
            rows,
        }),
    }
}

/// Sample mean and its standard error.
fn mean_and_error(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (var / n).sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityOutput {
    pub provenance: Provenance,
    pub config: DensityArgs,
    pub x: Vec<f64>,
    pub pdf: Vec<f64>,
}

fn density(a: &DensityArgs, format: OutputFormat) -> Result<Vec<u8>> {
    let p = a.params.params()?;
    if a.n_x < 2 || !(a.x_max > a.x_min) {
        return Err(Error::InvalidParameter("density grid needs x-max > x-min and n-x >= 2".into()));
    }
    let xs: Vec<f64> = (0..a.n_x)
        .map(|i| a.x_min + (a.x_max - a.x_min) * i as f64 / (a.n_x - 1) as f64)
        .collect();
    let pdf = match a.model {
        // the inverse-subordinator law is tabulated once and reused
        DensityModel::Inverse => {
            let law = InverseSubordinatorLaw::new(p.temper(), a.t)?;
            xs.iter()
                .map(|&x| if x > 0.0 { law.pdf(x) } else { Ok(0.0) })
                .collect::<Result<Vec<_>>>()?
        }
        DensityModel::Subdiff => {
            let law = InverseSubordinatorLaw::new(p.temper(), a.t)?;
            xs.iter().map(|&x| law.subordinated_pdf(p.beta, x)).collect()
        }
        m => xs
            .iter()
            .map(|&x| match m {
                DensityModel::Stable if x > 0.0 => stable_pdf(p.stable(), x),
                DensityModel::Tempered if x > 0.0 => tempered_stable_pdf(p.temper(), a.t, x),
                DensityModel::Stable | DensityModel::Tempered => Ok(0.0),
                _ => nts_pdf(p, a.t, x),
            })
            .collect::<Result<Vec<_>>>()?,
    };
    match format {
        OutputFormat::Csv => to_csv(
            &["x", "pdf"],
            xs.iter().zip(&pdf).map(|(x, f)| vec![format_float(*x), format_float(*f)]),
        ),
        OutputFormat::Json => to_json(&DensityOutput {
            provenance: Provenance::new("density", None, None),
            config: a.clone(),
            x: xs,
            pdf,
        }),
    }
}
