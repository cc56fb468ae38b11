//! Densities of the stable and tempered stable subordinators, the inverse
//! subordinator and the two subordinated processes.

use subordinated::analytics::{nts_pdf, stable_pdf, tempered_stable_pdf, InverseSubordinatorLaw};
use subordinated::params::{ModelParams, StableParams};

fn levy(x: f64) -> f64 {
    (-1.0 / (4.0 * x)).exp() / (2.0 * std::f64::consts::PI.sqrt() * x.powf(1.5))
}

fn main() -> subordinated::error::Result<()> {
    let half = StableParams::new(0.5)?;
    println!("alpha = 1/2 stable density against the Levy closed form");
    for x in [0.1, 1.0, 10.0, 50.0] {
        let f = stable_pdf(half, x)?;
        println!("  x = {x:>5}: {f:.10e}  rel. err {:.1e}", (f / levy(x) - 1.0).abs());
    }

    let p = ModelParams::new(0.7, 1.0, 0.2)?;
    println!("\ntempered stable T(1) and Y_T(1)");
    for x in [0.25, 0.5, 1.0, 2.0] {
        println!(
            "  x = {x:>4}: T {:.6}  Y_T {:.6}",
            tempered_stable_pdf(p.temper(), 1.0, x)?,
            nts_pdf(p, 1.0, x)?
        );
    }

    let law = InverseSubordinatorLaw::new(p.temper(), 2.0)?;
    println!("\ninverse subordinator S(2): mass {:.8}, mean {:.6}", law.mass(), law.mean());
    for x in [0.5, 1.0, 2.0, 4.0] {
        println!(
            "  x = {x:>4}: S {:.6}  Y_S {:.6}",
            law.pdf(x)?,
            law.subordinated_pdf(p.beta, x)
        );
    }
    Ok(())
}
