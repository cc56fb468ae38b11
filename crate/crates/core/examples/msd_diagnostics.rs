//! Ensemble MSD of Y_T and Y_S with both fitted models, compared with the
//! analytic curves.

use subordinated::analytics::{empirical_msd, fit_msd, msd_nts, msd_ys, MsdModel};
use subordinated::params::ModelParams;
use subordinated::paths::{simulate_ensemble, PathKind, TimeGrid};

fn main() -> subordinated::error::Result<()> {
    let p = ModelParams::new(0.8, 1.0, 0.01)?;
    let grid = TimeGrid::uniform(100.0, 201)?;
    for kind in [PathKind::Nts, PathKind::Subdiffusive] {
        let curve = empirical_msd(&simulate_ensemble(kind, p, &grid, 500, 3)?);
        println!("{kind}");
        for &i in &[0, 9, 49, 199] {
            let t = curve.lags[i];
            let exact = if kind == PathKind::Nts { msd_nts(p, t)? } else { msd_ys(p, t)? };
            println!("  lag {t:>6.1}: empirical {:>9.4}  analytic {exact:>9.4}", curve.values[i]);
        }
        for model in [MsdModel::SecondOrderPolynomial, MsdModel::TwoRegimePower] {
            let fit = fit_msd(&curve, model)?;
            println!("  {}: {:?}", model.cli_name(), fit.coefficients);
        }
    }
    Ok(())
}
