//! Repeated simulate-and-estimate at known parameters, summarized as the
//! quantiles a boxplot would show.

use subordinated::estimation::{validate_estimator, EstimatorKind, ValidationConfig};
use subordinated::params::ModelParams;

fn main() -> subordinated::error::Result<()> {
    let cases = [
        (EstimatorKind::Nts, ModelParams::new(0.26, 6.0, 0.11)?),
        (EstimatorKind::Subdiffusive, ModelParams::new(0.4, 0.2, 0.0)?),
    ];
    for (kind, truth) in cases {
        let s = validate_estimator(kind, truth, 100, 1000, 1, &ValidationConfig::default())?;
        println!("{kind:?}: {} fits, {} failures", s.n_ok, s.n_failed);
        for (name, value, summary) in [
            ("alpha", truth.alpha, &s.alpha),
            ("lambda", truth.lambda, &s.lambda),
            ("beta", truth.beta, &s.beta),
        ] {
            if let Some(q) = summary {
                println!(
                    "  {name:<6} truth {value:<6} q10 {:>8.4}  median {:>8.4}  q90 {:>8.4}",
                    q.q10, q.median, q.q90
                );
            }
        }
    }
    Ok(())
}
