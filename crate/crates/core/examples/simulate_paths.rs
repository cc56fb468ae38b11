//! One small ensemble of every simulated process kind, printed as summary
//! statistics at the last grid point.

use subordinated::params::ModelParams;
use subordinated::paths::{simulate_ensemble, PathKind, TimeGrid};

fn main() -> subordinated::error::Result<()> {
    let params = ModelParams::new(0.8, 1.0, 0.1)?;
    let grid = TimeGrid::uniform(10.0, 101)?;
    let kinds = [
        PathKind::Subordinator,
        PathKind::InverseSubordinator,
        PathKind::Abm,
        PathKind::Nts,
        PathKind::Subdiffusive,
    ];
    println!("{:<14} {:>10} {:>10}", "kind", "mean", "var");
    for kind in kinds {
        let e = simulate_ensemble(kind, params, &grid, 2000, 42)?;
        let last = e.column(grid.len() - 1);
        let n = last.len() as f64;
        let mean = last.iter().sum::<f64>() / n;
        let var = last.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        println!("{:<14} {mean:>10.4} {var:>10.4}", kind.as_str());
    }
    Ok(())
}
