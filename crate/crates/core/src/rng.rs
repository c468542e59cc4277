//! Deterministic random streams.
//!
//! Every scenario run draws from a ChaCha8 keystream keyed by the 64-bit master
//! seed, with the run index selecting the stream. ChaCha is counter based, so
//! the numbers a run sees do not depend on how many other runs exist or in which
//! order (or on which thread) they execute.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Random generator owned by a single scenario run.
#[derive(Debug, Clone)]
pub struct RunRng {
    inner: ChaCha8Rng,
}

impl RunRng {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Zero-mean Gaussian draw with standard deviation `sigma`.
    pub fn gaussian(&mut self, sigma: f64) -> f64 {
        if sigma == 0.0 {
            return 0.0;
        }
        let n: f64 = StandardNormal.sample(&mut self.inner);
        sigma * n
    }
}
