//! Univariate EDAs without margins (UMDA, cGA) and the single-frequency
//! chains that describe a neutral gene under either of them.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::params::check_probability;
use crate::stream::RandomStream;

/// Marginal one-probabilities after `t` updates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyState {
    pub p: Vec<f64>,
    pub t: u64,
}

impl FrequencyState {
    pub fn uniform(dim: usize, p0: f64) -> Result<Self> {
        check_probability(p0)?;
        Ok(FrequencyState {
            p: vec![p0; dim],
            t: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    /// One individual with gene `j` drawn from Bernoulli(`p_j`).
    pub fn sample(&self, rng: &mut RandomStream) -> BitVector {
        let mut x = BitVector::zeros(self.p.len());
        for (j, &pj) in self.p.iter().enumerate() {
            if rng.bernoulli(pj) {
                x.set(j, true);
            }
        }
        x
    }
}

/// Next state plus whether an optimal individual was sampled on the way.
#[derive(Clone, Debug)]
pub struct EdaOutcome {
    pub next: FrequencyState,
    pub sampled_optimum: bool,
}

fn check_state(state: &FrequencyState, objective: &Objective) -> Result<()> {
    if state.dim() != objective.dim() {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: objective.dim(),
        });
    }
    state.p.iter().try_for_each(|&p| check_probability(p))
}

pub fn umda_step(
    state: &FrequencyState,
    objective: &Objective,
    mu: usize,
    lambda: usize,
    rng: &mut RandomStream,
) -> Result<EdaOutcome> {
    if mu == 0 || mu > lambda {
        return Err(Error::InvalidParameter(format!(
            "UMDA requires 1 <= mu <= lambda, got mu = {mu}, lambda = {lambda}"
        )));
    }
    check_state(state, objective)?;
    let offspring: Vec<BitVector> = (0..lambda).map(|_| state.sample(rng)).collect();
    let fitness: Vec<_> = offspring.iter().map(|x| objective.evaluate(x)).collect();
    let optimum = objective.optimum_value();
    let sampled_optimum = fitness.iter().any(|v| *v == optimum);
    let mut order: Vec<usize> = (0..lambda).collect();
    // Stable: equal fitness keeps sampling order.
    order.sort_by(|&a, &b| fitness[b].cmp(&fitness[a]));
    let mut counts = vec![0usize; state.dim()];
    for &i in &order[..mu] {
        for j in offspring[i].ones_indices() {
            counts[j] += 1;
        }
    }
    let p = counts.iter().map(|&k| k as f64 / mu as f64).collect();
    Ok(EdaOutcome {
        next: FrequencyState { p, t: state.t + 1 },
        sampled_optimum,
    })
}

/// UMDA update: frequencies become the gene means of the `mu` best of
/// `lambda` samples.
pub fn umda_generation(
    state: &FrequencyState,
    objective: &Objective,
    mu: usize,
    lambda: usize,
    rng: &mut RandomStream,
) -> Result<FrequencyState> {
    umda_step(state, objective, mu, lambda, rng).map(|o| o.next)
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "cGA K = {k} must be even and at least 2"
        )));
    }
    Ok(())
}

/// `p ± 1/K` kept on the exact grid of multiples of `1/K`.
fn shift(p: f64, k: usize, delta: i64) -> f64 {
    let steps = (p * k as f64).round() as i64 + delta;
    steps.clamp(0, k as i64) as f64 / k as f64
}

pub fn cga_step(
    state: &FrequencyState,
    objective: &Objective,
    k: usize,
    rng: &mut RandomStream,
) -> Result<EdaOutcome> {
    check_k(k)?;
    check_state(state, objective)?;
    let a = state.sample(rng);
    let b = state.sample(rng);
    let (fa, fb) = (objective.evaluate(&a), objective.evaluate(&b));
    let optimum = objective.optimum_value();
    let sampled_optimum = fa == optimum || fb == optimum;
    // The first sample wins ties.
    let (winner, loser) = if fa >= fb { (&a, &b) } else { (&b, &a) };
    let p = state
        .p
        .iter()
        .enumerate()
        .map(|(j, &pj)| match (winner.get(j), loser.get(j)) {
            (true, false) => shift(pj, k, 1),
            (false, true) => shift(pj, k, -1),
            _ => pj,
        })
        .collect();
    Ok(EdaOutcome {
        next: FrequencyState { p, t: state.t + 1 },
        sampled_optimum,
    })
}

/// cGA update with hypothetical population size `k`.
pub fn cga_generation(
    state: &FrequencyState,
    objective: &Objective,
    k: usize,
    rng: &mut RandomStream,
) -> Result<FrequencyState> {
    cga_step(state, objective, k, rng).map(|o| o.next)
}

/// Neutral-gene UMDA frequency: `Binomial(mu, p) / mu`.
pub fn umda_neutral_step(p: f64, mu: usize, rng: &mut RandomStream) -> Result<f64> {
    check_probability(p)?;
    if mu == 0 {
        return Err(Error::InvalidParameter("mu must be positive".into()));
    }
    let ones = Binomial::new(mu as u64, p)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .sample(rng);
    Ok(ones as f64 / mu as f64)
}

/// Neutral-gene cGA frequency: two Bernoulli(`p`) samples, `+1/K` when only
/// the first is one, `-1/K` when only the second is.
pub fn cga_neutral_step(p: f64, k: usize, rng: &mut RandomStream) -> Result<f64> {
    check_probability(p)?;
    check_k(k)?;
    let a = rng.bernoulli(p);
    let b = rng.bernoulli(p);
    Ok(match (a, b) {
        (true, false) => shift(p, k, 1),
        (false, true) => shift(p, k, -1),
        _ => p,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeutralChain {
    Umda,
    Cga,
}

impl NeutralChain {
    pub fn step(self, p: f64, size: usize, rng: &mut RandomStream) -> Result<f64> {
        match self {
            NeutralChain::Umda => umda_neutral_step(p, size, rng),
            NeutralChain::Cga => cga_neutral_step(p, size, rng),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            NeutralChain::Umda => "umda",
            NeutralChain::Cga => "cga",
        }
    }
}

/// First `t` with `p_t ∈ {0, 1}` starting from `p0`, or `None` after
/// `budget` steps.
pub fn neutral_hitting_time(
    chain: NeutralChain,
    size: usize,
    p0: f64,
    budget: u64,
    rng: &mut RandomStream,
) -> Result<Option<u64>> {
    let mut p = p0;
    for t in 0..=budget {
        if p == 0.0 || p == 1.0 {
            return Ok(Some(t));
        }
        if t < budget {
            p = chain.step(p, size, rng)?;
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{pin_bit, ObjectiveKind};

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn umda_boundaries_absorb() {
        let f = Objective::new(ObjectiveKind::OneMax, 4).unwrap();
        let mut s = FrequencyState {
            p: vec![0.0, 1.0, 0.5, 0.5],
            t: 0,
        };
        let mut rng = RandomStream::new(1);
        for _ in 0..200 {
            s = umda_generation(&s, &f, 5, 10, &mut rng).unwrap();
            assert_eq!(s.p[0], 0.0);
            assert_eq!(s.p[1], 1.0);
        }
        assert_eq!(s.t, 200);
    }

    #[test]
    fn umda_rejects_bad_mu() {
        let f = Objective::new(ObjectiveKind::OneMax, 4).unwrap();
        let s = FrequencyState::uniform(4, 0.5).unwrap();
        assert!(umda_generation(&s, &f, 0, 10, &mut RandomStream::new(1)).is_err());
        assert!(umda_generation(&s, &f, 11, 10, &mut RandomStream::new(1)).is_err());
    }

    #[test]
    fn umda_neutral_gene_is_balanced_when_mu_equals_lambda() {
        // Gene 0 pinned, so it is neutral; with mu = lambda every sample is kept.
        let f = pin_bit(&Objective::new(ObjectiveKind::OneMax, 3).unwrap(), 0, true).unwrap();
        let start = FrequencyState {
            p: vec![0.3, 0.5, 0.5],
            t: 0,
        };
        let mut rng = RandomStream::new(2);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| umda_generation(&start, &f, 20, 20, &mut rng).unwrap().p[0])
            .collect();
        for x in &xs {
            assert!((x * 20.0 - (x * 20.0).round()).abs() < 1e-12);
        }
        let (m, se) = mean_and_se(&xs);
        assert!((m - 0.3).abs() <= 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn umda_selects_fittest() {
        // OneMax with a large lambda: the selected mean of gene 0 increases.
        let f = Objective::new(ObjectiveKind::OneMax, 8).unwrap();
        let s = FrequencyState::uniform(8, 0.5).unwrap();
        let next = umda_generation(&s, &f, 10, 100, &mut RandomStream::new(3)).unwrap();
        let mean: f64 = next.p.iter().sum::<f64>() / 8.0;
        assert!(mean > 0.6, "{mean}");
    }

    #[test]
    fn cga_boundaries_and_identical_samples() {
        let f = Objective::new(ObjectiveKind::OneMax, 3).unwrap();
        let s = FrequencyState {
            p: vec![0.0, 1.0, 1.0],
            t: 0,
        };
        let next = cga_generation(&s, &f, 10, &mut RandomStream::new(4)).unwrap();
        assert_eq!(next.p, s.p);
    }

    #[test]
    fn cga_rejects_odd_k() {
        let f = Objective::new(ObjectiveKind::OneMax, 3).unwrap();
        let s = FrequencyState::uniform(3, 0.5).unwrap();
        assert!(cga_generation(&s, &f, 7, &mut RandomStream::new(1)).is_err());
        assert!(cga_neutral_step(0.5, 3, &mut RandomStream::new(1)).is_err());
    }

    /// Exact law of one neutral cGA step at p = 1/2 from the four joint
    /// outcomes of the two samples.
    fn enumerated_half_step_law() -> [(f64, f64); 3] {
        let mut law = [(0.4, 0.0), (0.5, 0.0), (0.6, 0.0)];
        for a in [false, true] {
            for b in [false, true] {
                let slot = match (a, b) {
                    (true, false) => 2,
                    (false, true) => 0,
                    _ => 1,
                };
                law[slot].1 += 0.25;
            }
        }
        law
    }

    #[test]
    fn cga_neutral_law_at_half() {
        let law = enumerated_half_step_law();
        assert_eq!(law.map(|(_, p)| p), [0.25, 0.5, 0.25]);
        let n = 400_000;
        let mut rng = RandomStream::new(5);
        let mut counts = [0usize; 3];
        let mut sample_var = 0.0;
        for _ in 0..n {
            let q = cga_neutral_step(0.5, 10, &mut rng).unwrap();
            let slot = law.iter().position(|(v, _)| (v - q).abs() < 1e-12).unwrap();
            counts[slot] += 1;
            sample_var += (q - 0.5).powi(2);
        }
        for (slot, (_, p)) in law.iter().enumerate() {
            let freq = counts[slot] as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() <= 3.0 * se, "slot {slot}: {freq}");
        }
        // Variance 2·0.25/100 = 0.005; second moment of a three-point law.
        let var = sample_var / n as f64;
        let fourth = 0.5 * 0.1f64.powi(4);
        let se = ((fourth - 0.005f64.powi(2)) / n as f64).sqrt();
        assert!((var - 0.005).abs() <= 3.0 * se, "{var}");
    }

    #[test]
    fn full_cga_neutral_gene_matches_enumeration() {
        let f = pin_bit(&Objective::new(ObjectiveKind::OneMax, 2).unwrap(), 1, true).unwrap();
        let s = FrequencyState::uniform(2, 0.5).unwrap();
        let mut rng = RandomStream::new(6);
        let n = 200_000;
        let mut up = 0usize;
        let mut down = 0usize;
        for _ in 0..n {
            let q = cga_generation(&s, &f, 10, &mut rng).unwrap().p[1];
            if q > 0.5 + 1e-9 {
                up += 1;
                assert!((q - 0.6).abs() < 1e-12);
            } else if q < 0.5 - 1e-9 {
                down += 1;
                assert!((q - 0.4).abs() < 1e-12);
            }
        }
        let se = (0.25 * 0.75 / n as f64).sqrt();
        assert!((up as f64 / n as f64 - 0.25).abs() <= 3.0 * se);
        assert!((down as f64 / n as f64 - 0.25).abs() <= 3.0 * se);
    }

    #[test]
    fn cga_frequencies_stay_on_grid() {
        let f = Objective::new(ObjectiveKind::LeadingOnes, 6).unwrap();
        let mut s = FrequencyState::uniform(6, 0.5).unwrap();
        let mut rng = RandomStream::new(7);
        for _ in 0..2000 {
            s = cga_generation(&s, &f, 12, &mut rng).unwrap();
            for &p in &s.p {
                assert!((0.0..=1.0).contains(&p));
                let k = p * 12.0;
                assert_eq!(k, k.round());
            }
        }
    }

    #[test]
    fn neutral_steps_fixed_points() {
        let mut rng = RandomStream::new(8);
        for _ in 0..100 {
            assert_eq!(umda_neutral_step(0.0, 10, &mut rng).unwrap(), 0.0);
            assert_eq!(umda_neutral_step(1.0, 10, &mut rng).unwrap(), 1.0);
            assert_eq!(cga_neutral_step(0.0, 10, &mut rng).unwrap(), 0.0);
            assert_eq!(cga_neutral_step(1.0, 10, &mut rng).unwrap(), 1.0);
        }
    }

    #[test]
    fn umda_neutral_mean_is_preserved() {
        let mut rng = RandomStream::new(9);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| umda_neutral_step(0.3, 50, &mut rng).unwrap())
            .collect();
        let (m, se) = mean_and_se(&xs);
        assert!((m - 0.3).abs() <= 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn hitting_time_at_boundary_is_zero() {
        let mut rng = RandomStream::new(1);
        assert_eq!(
            neutral_hitting_time(NeutralChain::Cga, 10, 1.0, 100, &mut rng).unwrap(),
            Some(0)
        );
        let t = neutral_hitting_time(NeutralChain::Umda, 4, 0.5, 1_000_000, &mut rng)
            .unwrap()
            .unwrap();
        assert!(t >= 1);
        assert_eq!(
            neutral_hitting_time(NeutralChain::Cga, 1000, 0.5, 3, &mut rng).unwrap(),
            None
        );
    }
}
