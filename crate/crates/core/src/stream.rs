//! Deterministic random streams.
//!
//! Every stochastic routine in the crate draws from a [`RandomStream`], a thin
//! wrapper over ChaCha8. Per-run streams are derived from a master seed by
//! selecting the ChaCha stream number equal to the run index, so run `r` of an
//! experiment sees the same numbers whether runs execute sequentially or on a
//! worker pool. Sub-experiments mix a label into the master seed with
//! SplitMix64 before selecting streams.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RandomStream {
    rng: ChaCha8Rng,
    seed: u64,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for a labelled sub-experiment of `master`.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    // FNV-1a over the label, then mixed with the master seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    mix64(master ^ mix64(h))
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    /// Stream for run `run_index` of an experiment seeded with `master`.
    pub fn for_run(master: u64, run_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master);
        rng.set_stream(run_index);
        RandomStream { rng, seed: master }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream built from the next output of this one. Used to give each
    /// member of a generation its own independent draws.
    pub fn fork(&mut self) -> RandomStream {
        RandomStream::new(self.rng.next_u64())
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform in `(0, 1]`.
    #[inline]
    pub fn unit_closed(&mut self) -> f64 {
        1.0 - self.rng.random::<f64>()
    }

    /// Uniform index in `0..n`.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// `true` with probability `p`; exactly never for `p = 0` and always for
    /// `p = 1`.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
