//! Frequency instrumentation, hitting-time detection, quantiles, and the
//! one-generation reachability structure of BDE.

use serde::{Deserialize, Serialize};

use crate::bits::{hamming, BitVector};
use crate::error::{Error, Result};
use crate::population::Population;

/// Per-generation one-counts for a subset of genes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTrace {
    /// Denominator turning counts into frequencies (N, or mu / K for EDAs).
    pub scale: u32,
    /// Recorded gene indices.
    pub columns: Vec<usize>,
    /// `ones[g][c]` is the count at generation `g` for gene `columns[c]`.
    pub ones: Vec<Vec<u32>>,
    /// Minimum count over all genes (recorded or not) per generation.
    pub min_all_bits: Vec<u32>,
}

impl FrequencyTrace {
    pub fn new(scale: u32, columns: Vec<usize>) -> Self {
        FrequencyTrace {
            scale,
            columns,
            ones: Vec::new(),
            min_all_bits: Vec::new(),
        }
    }

    /// Appends one generation given the counts of every gene.
    pub fn push_counts(&mut self, counts: &[u32]) {
        self.ones
            .push(self.columns.iter().map(|&j| counts[j]).collect());
        self.min_all_bits
            .push(counts.iter().copied().min().unwrap_or(0));
    }

    pub fn generations(&self) -> usize {
        self.ones.len()
    }

    /// Counts over time for gene `bit`, if it was recorded.
    pub fn series(&self, bit: usize) -> Option<Vec<u32>> {
        let c = self.columns.iter().position(|&j| j == bit)?;
        Some(self.ones.iter().map(|row| row[c]).collect())
    }

    pub fn frequency(&self, count: u32) -> f64 {
        f64::from(count) / f64::from(self.scale)
    }
}

/// Full per-gene count matrix of a sequence of populations.
pub fn frequency_matrix(trace: &[Population]) -> Result<FrequencyTrace> {
    let first = trace.first().ok_or(Error::EmptyInput)?;
    let (n, d) = (first.size(), first.dim());
    let mut out = FrequencyTrace::new(n as u32, (0..d).collect());
    for p in trace {
        if p.size() != n || p.dim() != d {
            return Err(Error::ShapeMismatch(format!(
                "expected {n}x{d} populations, found {}x{}",
                p.size(),
                p.dim()
            )));
        }
        let counts: Vec<u32> = p.one_counts().into_iter().map(|c| c as u32).collect();
        out.push_counts(&counts);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HitEvent {
    BandExit,
    Absorption,
    Optimum,
    DominantConverged,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HittingReport {
    pub event: HitEvent,
    /// First generation at which the event holds.
    pub generation: Option<u64>,
}

/// First index whose value falls outside the closed band `[lo, hi]`.
pub fn first_band_exit(series: &[u32], lo: f64, hi: f64) -> Result<HittingReport> {
    if lo > hi {
        return Err(Error::InvalidParameter(format!(
            "band [{lo}, {hi}] is empty"
        )));
    }
    let generation = series
        .iter()
        .position(|&y| {
            let y = f64::from(y);
            y < lo || y > hi
        })
        .map(|g| g as u64);
    Ok(HittingReport {
        event: HitEvent::BandExit,
        generation,
    })
}

/// First index with value exactly 0 or 1.
pub fn first_absorption(series: &[f64]) -> HittingReport {
    HittingReport {
        event: HitEvent::Absorption,
        generation: series
            .iter()
            .position(|&p| p == 0.0 || p == 1.0)
            .map(|g| g as u64),
    }
}

/// Nearest-rank quantiles: the value of rank `ceil(q·n)` clamped to `[1, n]`
/// in the sorted sample.
pub fn quantiles(samples: &[f64], qs: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    qs.iter()
        .map(|&q| {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidProbability(q));
            }
            // Tolerance absorbs products like 0.1 * 100 landing just above 10.
            let rank = ((q * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
            Ok(sorted[rank - 1])
        })
        .collect()
}

/// Positions where every offspring of a donor tuple equals the target
/// parent, with the parent's genes as forced values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcedPositions {
    pub mask: BitVector,
    pub values: BitVector,
}

impl ForcedPositions {
    pub fn positions(&self) -> Vec<usize> {
        self.mask.ones_indices().collect()
    }

    /// Forced value of each forced position, in position order.
    pub fn forced_values(&self) -> Vec<bool> {
        self.mask
            .ones_indices()
            .map(|j| self.values.get(j))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.mask.count_ones()
    }
}

fn check_tuple(pop: &Population, tuple: [usize; 4]) -> Result<()> {
    for &t in &tuple {
        if t >= pop.size() {
            return Err(Error::IndexOutOfRange {
                index: t,
                len: pop.size(),
            });
        }
    }
    for a in 0..4 {
        for b in a + 1..4 {
            if tuple[a] == tuple[b] {
                return Err(Error::NonDistinctIndices(tuple.to_vec()));
            }
        }
    }
    Ok(())
}

fn forced_unchecked(
    xi: &BitVector,
    x1: &BitVector,
    x2: &BitVector,
    x3: &BitVector,
) -> ForcedPositions {
    let d = xi.len();
    let words = xi
        .words()
        .iter()
        .zip(x1.words())
        .zip(x2.words().iter().zip(x3.words()))
        .map(|((a, b), (c, e))| !(a ^ b) & !(c ^ e))
        .collect();
    let mask = BitVector::from_words(words, d);
    let values = BitVector::from_words(
        xi.words()
            .iter()
            .zip(mask.words())
            .map(|(a, m)| a & m)
            .collect(),
        d,
    );
    ForcedPositions { mask, values }
}

/// Forced positions of tuple `(i, r1, r2, r3)`: gene `j` is forced iff
/// `X_{r1,j} = X_{i,j}` and `X_{r2,j} = X_{r3,j}`.
pub fn forced_positions(
    pop: &Population,
    i: usize,
    r1: usize,
    r2: usize,
    r3: usize,
) -> Result<ForcedPositions> {
    check_tuple(pop, [i, r1, r2, r3])?;
    Ok(forced_unchecked(
        pop.member(i),
        pop.member(r1),
        pop.member(r2),
        pop.member(r3),
    ))
}

pub const MAX_TUPLE_COUNT_DIM: usize = 40;

/// Number of distinct offspring the tuple can produce: `2^(D - forced)`.
pub fn tuple_reachable_count(
    pop: &Population,
    i: usize,
    r1: usize,
    r2: usize,
    r3: usize,
) -> Result<u64> {
    if pop.dim() > MAX_TUPLE_COUNT_DIM {
        return Err(Error::SizeLimit(format!(
            "D = {} exceeds {MAX_TUPLE_COUNT_DIM}",
            pop.dim()
        )));
    }
    let forced = forced_positions(pop, i, r1, r2, r3)?;
    Ok(1u64 << (pop.dim() - forced.count()))
}

/// Forced positions whose forced value disagrees with `target`. The target is
/// reachable from the tuple iff this is zero.
pub fn forced_mismatch_count(
    target: &BitVector,
    pop: &Population,
    i: usize,
    r1: usize,
    r2: usize,
    r3: usize,
) -> Result<usize> {
    if target.len() != pop.dim() {
        return Err(Error::DimensionMismatch {
            left: target.len(),
            right: pop.dim(),
        });
    }
    let forced = forced_positions(pop, i, r1, r2, r3)?;
    Ok(forced
        .mask
        .words()
        .iter()
        .zip(forced.values.words().iter().zip(target.words()))
        .map(|(m, (v, t))| (m & (v ^ t)).count_ones() as usize)
        .sum::<usize>()
        // Keep the `hamming` dimension contract in one place.
        .min(hamming(target, pop.member(i))?))
}

pub const MAX_REACH_DIM: usize = 20;
pub const MAX_REACH_POP: usize = 8;

/// All ordered tuples `(i, r1, r2, r3)` of mutually distinct indices.
pub fn ordered_tuples(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n).flat_map(move |i| {
        (0..n).flat_map(move |a| {
            (0..n).flat_map(move |b| {
                (0..n).filter_map(move |c| {
                    let t = [i, a, b, c];
                    let distinct = (0..4).all(|x| (x + 1..4).all(|y| t[x] != t[y]));
                    distinct.then_some(t)
                })
            })
        })
    })
}

/// Summary of one-generation reachability from a population.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachabilityReport {
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(rename = "N")]
    pub pop_size: usize,
    pub tuples: u64,
    pub reachable_count: u64,
    pub search_space: u64,
    pub fraction: f64,
}

fn low_bits(x: &BitVector) -> u64 {
    x.iter().fold(0u64, |acc, g| (acc << 1) | u64::from(g))
}

/// Number of strings reachable in one generation by some tuple.
pub fn reachable_set_size(pop: &Population) -> Result<u64> {
    let (n, d) = (pop.size(), pop.dim());
    if d > MAX_REACH_DIM || n > MAX_REACH_POP {
        return Err(Error::SizeLimit(format!(
            "exhaustive reachability needs D <= {MAX_REACH_DIM} and N <= {MAX_REACH_POP}, got D = {d}, N = {n}"
        )));
    }
    if n < 4 {
        return Err(Error::PopulationTooSmall { size: n, min: 4 });
    }
    let mut constraints: Vec<(u64, u64)> = ordered_tuples(n)
        .map(|[i, a, b, c]| {
            let f = forced_unchecked(pop.member(i), pop.member(a), pop.member(b), pop.member(c));
            (low_bits(&f.mask), low_bits(&f.values))
        })
        .collect();
    constraints.sort_unstable();
    constraints.dedup();
    // Least constrained first, so reachable candidates exit early.
    constraints.sort_by_key(|(m, _)| m.count_ones());
    let count = (0..(1u64 << d))
        .filter(|x| constraints.iter().any(|&(m, v)| (x & m) == v))
        .count();
    Ok(count as u64)
}

pub fn reachability_report(pop: &Population) -> Result<ReachabilityReport> {
    let reachable = reachable_set_size(pop)?;
    let n = pop.size() as u64;
    let space = 1u64 << pop.dim();
    Ok(ReachabilityReport {
        dim: pop.dim(),
        pop_size: pop.size(),
        tuples: n * (n - 1) * (n - 2) * (n - 3),
        reachable_count: reachable,
        search_space: space,
        fraction: reachable as f64 / space as f64,
    })
}
