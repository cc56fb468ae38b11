//! The two-parameter Mittag-Leffler function and the mean of the inverse
//! subordinator it generates.

use subordinated::analytics::{mean_of_s, mittag_leffler};
use subordinated::params::TemperParams;

fn main() -> subordinated::error::Result<()> {
    println!("E_(1,1)(x) = exp(x)");
    for x in [-5.0, -1.0, 0.5, 3.0] {
        let e = mittag_leffler(1.0, 1.0, x)?;
        println!("  x = {x:>4}: {e:.15}  exp {:.15}", f64::exp(x));
    }
    println!("\nE_(a,b)(x)");
    for (a, b, x) in [(0.5, 1.0, -2.0), (0.5, 1.0, 2.0), (0.8, 0.8, 1.5), (0.3, 1.2, -0.7)] {
        println!("  a = {a}, b = {b}, x = {x:>4}: {:.12}", mittag_leffler(a, b, x)?);
    }

    let p = TemperParams::new(0.4, 0.2)?;
    let limit = p.lambda().powf(1.0 - p.alpha()) / p.alpha();
    println!("\nE S(tau) / tau for alpha = 0.4, lambda = 0.2 (renewal limit {limit:.4})");
    for tau in [1.0, 10.0, 100.0, 500.0] {
        println!("  tau = {tau:>5}: {:.5}", mean_of_s(p, tau)? / tau);
    }
    Ok(())
}
