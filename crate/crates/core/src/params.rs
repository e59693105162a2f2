use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters shared by all algorithms. Fields that an algorithm does not use
/// are ignored by it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgorithmParams {
    /// Population size N (BDE/iBDE).
    pub pop_size: usize,
    /// Dimension D.
    pub dim: usize,
    /// Scale factor F.
    pub scale_factor: f64,
    /// Crossover rate C.
    pub crossover_rate: f64,
    /// UMDA parent count.
    pub mu: usize,
    /// UMDA offspring count.
    pub lambda: usize,
    /// cGA hypothetical population size (even).
    pub k: usize,
    pub max_generations: u64,
    /// Per-bit one-probability for the initial population or frequencies.
    pub init_p: f64,
}

impl Default for AlgorithmParams {
    fn default() -> Self {
        AlgorithmParams {
            pop_size: 100,
            dim: 100,
            scale_factor: 0.2,
            crossover_rate: 0.3,
            mu: 50,
            lambda: 100,
            k: 100,
            max_generations: 2000,
            init_p: 0.5,
        }
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

impl AlgorithmParams {
    pub fn bde(dim: usize, pop_size: usize, scale_factor: f64, crossover_rate: f64) -> Self {
        AlgorithmParams {
            pop_size,
            dim,
            scale_factor,
            crossover_rate,
            ..Default::default()
        }
    }

    pub fn with_max_generations(mut self, g: u64) -> Self {
        self.max_generations = g;
        self
    }

    pub fn with_init_p(mut self, p: f64) -> Self {
        self.init_p = p;
        self
    }

    /// Checks the field invariants `0 ≤ F ≤ 1`, `0 < C ≤ 1`, `K` even,
    /// `1 ≤ mu ≤ lambda` and `init_p ∈ [0, 1]`.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.scale_factor) {
            return Err(Error::InvalidParameter(format!(
                "scale factor F = {} must lie in [0, 1]",
                self.scale_factor
            )));
        }
        if !(self.crossover_rate > 0.0 && self.crossover_rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "crossover rate C = {} must lie in (0, 1]",
                self.crossover_rate
            )));
        }
        if self.k % 2 != 0 || self.k == 0 {
            return Err(Error::InvalidParameter(format!(
                "cGA K = {} must be a positive even number",
                self.k
            )));
        }
        if self.mu == 0 || self.mu > self.lambda {
            return Err(Error::InvalidParameter(format!(
                "UMDA requires 1 <= mu <= lambda, got mu = {}, lambda = {}",
                self.mu, self.lambda
            )));
        }
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        check_probability(self.init_p)
    }
}
