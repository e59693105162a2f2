use crate::bits::{words_for, BitVector};
use crate::error::{Error, Result};
use crate::objectives::{Fitness, Objective};
use crate::params::check_probability;
use crate::stream::RandomStream;

/// An ordered collection of equal-length genomes with an optional fitness
/// cache.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    members: Vec<BitVector>,
    dim: usize,
    fitness: Option<Vec<Fitness>>,
}

impl Population {
    pub fn new(members: Vec<BitVector>) -> Result<Self> {
        let dim = members.first().ok_or(Error::EmptyInput)?.len();
        if let Some(bad) = members.iter().find(|m| m.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.len(),
            });
        }
        Ok(Population {
            members,
            dim,
            fitness: None,
        })
    }

    /// Parses one bit string per member, e.g. `["101", "011"]`.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        Population::new(rows.iter().map(|r| r.parse()).collect::<Result<_>>()?)
    }

    pub(crate) fn with_fitness(members: Vec<BitVector>, fitness: Vec<Fitness>) -> Self {
        debug_assert_eq!(members.len(), fitness.len());
        let dim = members[0].len();
        Population {
            members,
            dim,
            fitness: Some(fitness),
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[BitVector] {
        &self.members
    }

    #[inline]
    pub fn member(&self, i: usize) -> &BitVector {
        &self.members[i]
    }

    pub fn into_members(self) -> Vec<BitVector> {
        self.members
    }

    /// Replaces member `i`; the fitness cache is dropped.
    pub fn set_member(&mut self, i: usize, x: BitVector) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.len(),
            });
        }
        if i >= self.members.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.members.len(),
            });
        }
        self.members[i] = x;
        self.fitness = None;
        Ok(())
    }

    pub fn fitness(&self) -> Option<&[Fitness]> {
        self.fitness.as_deref()
    }

    /// Fills the fitness cache if it is empty.
    pub fn evaluate(&mut self, f: &Objective) {
        if self.fitness.is_none() {
            self.fitness = Some(self.members.iter().map(|x| f.evaluate(x)).collect());
        }
    }

    /// Per-bit one-counts `Y(j) = Σ_i X_{i,j}`.
    pub fn one_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.dim];
        for m in &self.members {
            for j in m.ones_indices() {
                counts[j] += 1;
            }
        }
        counts
    }

    /// Positions at which at least one member carries a one.
    pub fn column_union(&self) -> BitVector {
        let mut acc = vec![0u64; words_for(self.dim)];
        for m in &self.members {
            for (a, w) in acc.iter_mut().zip(m.words()) {
                *a |= w;
            }
        }
        BitVector::from_words(acc, self.dim)
    }

    /// Positions at which every member carries a one.
    pub fn column_intersection(&self) -> BitVector {
        let mut acc = vec![u64::MAX; words_for(self.dim)];
        for m in &self.members {
            for (a, w) in acc.iter_mut().zip(m.words()) {
                *a &= w;
            }
        }
        BitVector::from_words(acc, self.dim)
    }

    /// Positions where all members agree.
    pub fn converged_positions(&self) -> Vec<usize> {
        let any = self.column_union();
        let all = self.column_intersection();
        (0..self.dim)
            .filter(|&j| any.get(j) == all.get(j))
            .collect()
    }
}

/// `n` independent genomes of length `d`, each gene one with probability `p`.
pub fn sample_population(n: usize, d: usize, p: f64, rng: &mut RandomStream) -> Result<Population> {
    check_probability(p)?;
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!(
            "population needs N >= 1 and D >= 1, got N = {n}, D = {d}"
        )));
    }
    let members = (0..n)
        .map(|_| {
            let mut x = BitVector::zeros(d);
            for j in 0..d {
                if rng.bernoulli(p) {
                    x.set(j, true);
                }
            }
            x
        })
        .collect();
    Population::new(members)
}
