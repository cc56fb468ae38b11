//! Reproducible random streams and the elementary variate samplers.
//!
//! Every trajectory owns a [`RandomStream`] keyed by `(master_seed, stream_index)`.
//! The key is mixed into a 64-bit seed, so the draws of one trajectory never
//! depend on how many workers run or in which order trajectories are scheduled.

use std::f64::consts::PI;

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::params::{StableParams, TemperParams};

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn combine(a: u64, b: u64) -> u64 {
    mix64(mix64(a) ^ b.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// A deterministic pseudo-random stream for a single trajectory.
#[derive(Debug, Clone)]
pub struct RandomStream {
    master_seed: u64,
    stream_index: u64,
    key: u64,
    rng: ChaCha12Rng,
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let key = combine(master_seed, stream_index);
        Self::from_key(master_seed, stream_index, key)
    }

    fn from_key(master_seed: u64, stream_index: u64, key: u64) -> Self {
        Self {
            master_seed,
            stream_index,
            key,
            rng: ChaCha12Rng::seed_from_u64(key),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Independent child stream. Depends only on the parent key and `tag`,
    /// never on how many draws the parent has already produced.
    pub fn substream(&self, tag: u64) -> RandomStream {
        let key = combine(self.key, tag.wrapping_add(0x5EED));
        Self::from_key(self.master_seed, self.stream_index, key)
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        Open01.sample(&mut self.rng)
    }

    /// Unit-mean exponential draw, strictly positive.
    pub fn exponential(&mut self) -> f64 {
        -self.uniform_open().ln()
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha12Rng {
        &mut self.rng
    }
}

/// One N(0, 1) variate.
pub fn sample_standard_gaussian(stream: &mut RandomStream) -> f64 {
    StandardNormal.sample(&mut stream.rng)
}

/// One draw of the totally skewed stable variable `U(1)` with
/// `E exp(-z U(1)) = exp(-z^alpha)`, using Kanter's representation
///
/// ```text
/// U = sin(aW) / sin(W)^(1/a) * (sin((1-a)W) / E)^((1-a)/a)
/// ```
///
/// with `W ~ Uniform(0, pi)` and `E ~ Exp(1)`.
pub fn sample_positive_stable(stream: &mut RandomStream, p: StableParams) -> f64 {
    let alpha = p.alpha();
    let w = PI * stream.uniform_open();
    let e = stream.exponential();
    let log_u = (alpha * w).sin().ln() - w.sin().ln() / alpha
        + (1.0 - alpha) / alpha * (((1.0 - alpha) * w).sin().ln() - e.ln());
    log_u.exp().max(f64::MIN_POSITIVE)
}

/// Sub-increment count keeping `lambda^alpha * dt / n <= 1`.
pub(crate) fn subdivisions(p: TemperParams, dt: f64) -> usize {
    let load = p.lambda_pow_alpha() * dt;
    if load > 1.0 {
        load.ceil() as usize
    } else {
        1
    }
}

/// One draw of the tempered stable increment `T(dt)`.
///
/// Stable candidates `dt^(1/alpha) U(1)` are accepted with probability
/// `exp(-lambda * candidate)`. The expected number of trials is
/// `exp(lambda^alpha dt)`, so long intervals are split into sub-increments
/// with `lambda^alpha * dt_sub <= 1` and summed.
pub fn sample_tempered_stable_increment(stream: &mut RandomStream, p: TemperParams, dt: f64) -> f64 {
    debug_assert!(dt > 0.0, "increment length must be positive");
    let n = subdivisions(p, dt);
    let sub = dt / n as f64;
    (0..n).map(|_| tempered_draw(stream, p, sub)).sum()
}

fn tempered_draw(stream: &mut RandomStream, p: TemperParams, dt: f64) -> f64 {
    let scale = dt.powf(1.0 / p.alpha());
    let lambda = p.lambda();
    loop {
        let candidate = scale * sample_positive_stable(stream, p.stable());
        if lambda == 0.0 {
            return candidate;
        }
        if stream.uniform_open() < (-lambda * candidate).exp() {
            return candidate;
        }
    }
}
