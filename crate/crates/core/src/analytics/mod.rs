//! Closed-form and numerically integrated characteristics of the subordinators
//! and the subordinated processes.

pub mod inverse;
pub mod msd;
pub mod nts;
pub mod quad;
pub mod special;
pub mod stable;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Argument `z` and process time `t` of a Laplace transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceQuery {
    z: f64,
    t: f64,
}

impl LaplaceQuery {
    pub fn new(z: f64, t: f64) -> Result<Self> {
        if !(z >= 0.0 && z.is_finite() && t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!(
                "Laplace query needs finite z >= 0 and t >= 0, got z={z}, t={t}"
            )));
        }
        Ok(Self { z, t })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

pub use inverse::{
    inverse_subordinator_pdf, laplace_inverse_subordinator, laplace_ys, mean_of_s, mean_ys, msd_ys,
    renewal_density, second_moment_s, ys_pdf, InverseSubordinatorLaw,
};
pub use msd::{empirical_msd, fit_msd, fit_msd_with, MsdCurve, MsdFit, MsdModel, MsdWarning, RegimeWindows};
pub use nts::{cov_nts, laplace_nts, mean_nts, msd_nts, nts_pdf, TemperedStableLaw};
pub use special::{gamma, ln_gamma, mittag_leffler, mittag_leffler_scaled};
pub use stable::{laplace_subordinator, stable_pdf, survival_ts_asymptotic, tempered_stable_pdf, StableDensity};
