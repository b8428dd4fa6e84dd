//! Seeded random streams and configuration generators.
//!
//! Every random draw in the crate goes through [`substream`], so results are
//! a pure function of `(seed, stream)` no matter how work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::triangular::make_h_configuration;
use crate::types::{pair_count, Configuration};

/// Independent generator for `(seed, stream)`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    #[default]
    StandardGaussian,
    /// Uniform on `[-1, 1]^N`.
    UniformCube,
}

impl Distribution {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Distribution::StandardGaussian => rng.sample(StandardNormal),
            Distribution::UniformCube => rng.random_range(-1.0..1.0),
        }
    }
}

pub fn random_configuration<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    dim: usize,
    p: f64,
    distribution: Distribution,
) -> Result<Configuration> {
    let coords = (0..n * dim).map(|_| distribution.sample(rng)).collect();
    Configuration::from_flat(p, n, dim, coords)
}

/// Member of `H` with tails uniform in `(-amplitude, amplitude)`.
pub fn random_h_configuration<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64, amplitude: f64) -> Result<Configuration> {
    let tails: Vec<f64> = (0..pair_count(n)).map(|_| rng.random_range(-amplitude..amplitude)).collect();
    make_h_configuration(n, &tails, p)
}

/// `n` standard basis vectors of `R^dim`, `dim >= n`.
pub fn simplex(n: usize, dim: usize, p: f64) -> Result<Configuration> {
    let coords = (0..n).flat_map(|i| (0..dim).map(move |k| if i == k { 1.0 } else { 0.0 })).collect();
    Configuration::from_flat(p, n, dim, coords)
}
