//! Empirical Laplace transform of simulated Y_T increments against the
//! closed form, with Monte Carlo standard errors.

use std::sync::Arc;

use subordinated::analytics::{laplace_nts, LaplaceQuery};
use subordinated::estimation::z_domain_edge;
use subordinated::kernel::RandomStream;
use subordinated::params::ModelParams;
use subordinated::paths::{simulate_nts, TimeGrid};

fn main() -> subordinated::error::Result<()> {
    let p = ModelParams::new(0.26, 6.0, 0.11)?;
    let grid = Arc::new(TimeGrid::regular(1.0, 100_001)?);
    let path = simulate_nts(p, &grid, &mut RandomStream::new(5, 0));
    let inc = path.increments();
    let n = inc.len() as f64;

    // beyond half the domain edge the estimator has infinite variance
    let z_max = 0.45 * z_domain_edge(p.lambda, p.beta);
    println!("{:>8} {:>12} {:>12} {:>8}", "z", "analytic", "empirical", "z-score");
    for i in 1..=10 {
        let z = z_max * i as f64 / 10.0;
        let exact = laplace_nts(p, LaplaceQuery::new(z, 1.0)?)?;
        let w: Vec<f64> = inc.iter().map(|x| (-z * x).exp()).collect();
        let m = w.iter().sum::<f64>() / n;
        let se = (w.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
        println!("{z:>8.4} {exact:>12.6} {m:>12.6} {:>8.2}", (m - exact) / se);
    }
    Ok(())
}
