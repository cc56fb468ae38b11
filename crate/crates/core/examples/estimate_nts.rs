//! Empirical-Laplace-transform fit of one simulated Y_T trajectory.

use std::sync::Arc;

use subordinated::estimation::{estimate_nts, IncrementSeries, NtsConfig};
use subordinated::kernel::RandomStream;
use subordinated::params::ModelParams;
use subordinated::paths::{simulate_nts, TimeGrid};

fn main() -> subordinated::error::Result<()> {
    let truth = ModelParams::new(0.26, 6.0, 0.11)?;
    let grid = Arc::new(TimeGrid::regular(1.0, 10_001)?);
    let path = simulate_nts(truth, &grid, &mut RandomStream::new(2024, 0));
    let inc = IncrementSeries::from_observations(&path.values, 1.0)?;
    let r = estimate_nts(&inc, &NtsConfig::default())?;
    println!("truth     alpha {:.4}  lambda {:.4}  beta {:.4}", truth.alpha, truth.lambda, truth.beta);
    println!("estimate  alpha {:.4}  lambda {:.4}  beta {:.4}", r.alpha_hat, r.lambda_hat, r.beta_hat);
    println!("{}", serde_json::to_string_pretty(&r.design).unwrap());
    Ok(())
}
