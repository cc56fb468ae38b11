//! Constant-period decomposition and waiting-time fit of one simulated Y_S
//! trajectory, with both tail methods.

use std::sync::Arc;

use subordinated::estimation::{decompose_constant_periods, estimate_subdiffusive, SubdiffusiveConfig, TailMethod};
use subordinated::kernel::RandomStream;
use subordinated::params::ModelParams;
use subordinated::paths::{simulate_subdiffusive, TimeGrid};

fn main() -> subordinated::error::Result<()> {
    let truth = ModelParams::new(0.4, 0.2, 0.0)?;
    let grid = Arc::new(TimeGrid::regular(1.0, 20_000)?);
    let path = simulate_subdiffusive(truth, &grid, 0.1, &mut RandomStream::new(77, 0))?;

    let d = decompose_constant_periods(&path.values, 1.0, 0.0, 10)?;
    let longest = d.waiting_times.iter().cloned().fold(0.0, f64::max);
    println!(
        "{} constant periods, longest {longest}, {} motion points",
        d.waiting_times.len(),
        d.motion_series.len()
    );

    println!("truth                 alpha {:.4}  lambda {:.4}  beta {:.4}", truth.alpha, truth.lambda, truth.beta);
    for method in [TailMethod::JumpLikelihood, TailMethod::SurvivalRegression] {
        let cfg = SubdiffusiveConfig {
            tail_method: method,
            ..SubdiffusiveConfig::default()
        };
        let r = estimate_subdiffusive(&path.values, 1.0, &cfg)?;
        println!(
            "{:<21} alpha {:.4}  lambda {:.4}  beta {:.4}",
            method.cli_name(),
            r.alpha_hat,
            r.lambda_hat,
            r.beta_hat
        );
    }
    Ok(())
}
