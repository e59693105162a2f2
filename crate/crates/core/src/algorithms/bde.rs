//! Binary differential evolution: donor-triple mutation, binomial crossover
//! and parent-offspring selection, in the original form and with donors
//! redrawn independently per gene.

use crate::bits::{valid_mask, words_for, BitVector};
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::population::Population;
use crate::stream::RandomStream;

/// Smallest population for which three donors distinct from the target exist.
pub const MIN_POPULATION: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// One donor triple per trial vector.
    Original,
    /// A fresh donor triple for every gene of the mutant.
    Independent,
}

/// Result of one synchronous generation.
#[derive(Clone, Debug)]
pub struct GenerationOutcome {
    pub next_population: Population,
    /// Number of trials that replaced their parent.
    pub accepted_count: usize,
    /// Trial vectors `U_i`, in member order, before selection.
    pub trials: Vec<BitVector>,
}

impl GenerationOutcome {
    /// Per-gene one-counts of the trial population.
    pub fn trial_ones(&self) -> Vec<usize> {
        let dim = self.next_population.dim();
        let mut counts = vec![0usize; dim];
        for u in &self.trials {
            for j in u.ones_indices() {
                counts[j] += 1;
            }
        }
        counts
    }
}

fn check_population(pop: &Population) -> Result<()> {
    if pop.size() < MIN_POPULATION {
        return Err(Error::PopulationTooSmall {
            size: pop.size(),
            min: MIN_POPULATION,
        });
    }
    Ok(())
}

fn check_index(pop: &Population, i: usize) -> Result<()> {
    if i >= pop.size() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: pop.size(),
        });
    }
    Ok(())
}

/// Three mutually distinct indices from `0..n` without `target`, by
/// rejection. Uniform over ordered triples.
pub fn draw_donors(n: usize, target: usize, rng: &mut RandomStream) -> [usize; 3] {
    debug_assert!(n >= MIN_POPULATION);
    let mut out = [usize::MAX; 3];
    let mut k = 0;
    while k < 3 {
        let r = rng.below(n);
        if r != target && !out[..k].contains(&r) {
            out[k] = r;
            k += 1;
        }
    }
    out
}

/// Mutant from base `x1` and difference pair `x2`, `x3`: gene `j` of the base
/// is flipped when `x2` and `x3` differ there and `mrand_j < F`. The random
/// number is only drawn at positions where the pair differs, since it is
/// irrelevant elsewhere.
pub fn bde_mutant(
    x1: &BitVector,
    x2: &BitVector,
    x3: &BitVector,
    f: f64,
    rng: &mut RandomStream,
) -> BitVector {
    let d = x1.len();
    let (w1, w2, w3) = (x1.words(), x2.words(), x3.words());
    let words = (0..words_for(d))
        .map(|w| {
            let mut rest = (w2[w] ^ w3[w]) & valid_mask(d, w);
            let mut flip = 0u64;
            while rest != 0 {
                let bit = 1u64 << (63 - rest.leading_zeros());
                if rng.unit() < f {
                    flip |= bit;
                }
                rest &= !bit;
            }
            w1[w] ^ flip
        })
        .collect();
    BitVector::from_words(words, d)
}

/// Binomial crossover: gene `j` comes from the mutant when `crand_j ≤ C`,
/// with `crand_j` uniform on `(0, 1]`, otherwise from the parent. There is
/// no forced mutant index.
pub fn binomial_crossover(
    parent: &BitVector,
    mutant: &BitVector,
    c: f64,
    rng: &mut RandomStream,
) -> BitVector {
    let d = parent.len();
    let (wp, wm) = (parent.words(), mutant.words());
    let words = (0..words_for(d))
        .map(|w| {
            let valid = valid_mask(d, w);
            let mut cross = 0u64;
            let mut rest = valid;
            while rest != 0 {
                let bit = 1u64 << (63 - rest.leading_zeros());
                if rng.unit_closed() <= c {
                    cross |= bit;
                }
                rest &= !bit;
            }
            (wm[w] & cross) | (wp[w] & !cross)
        })
        .collect();
    BitVector::from_words(words, d)
}

fn trial_unchecked(
    variant: Variant,
    pop: &Population,
    i: usize,
    f: f64,
    c: f64,
    rng: &mut RandomStream,
) -> BitVector {
    let mutant = match variant {
        Variant::Original => {
            let [r1, r2, r3] = draw_donors(pop.size(), i, rng);
            bde_mutant(pop.member(r1), pop.member(r2), pop.member(r3), f, rng)
        }
        Variant::Independent => {
            let d = pop.dim();
            let mut v = BitVector::zeros(d);
            for j in 0..d {
                let [r1, r2, r3] = draw_donors(pop.size(), i, rng);
                let base = pop.member(r1).get(j);
                let differ = pop.member(r2).get(j) != pop.member(r3).get(j);
                let flip = differ && rng.unit() < f;
                v.set(j, base ^ flip);
            }
            v
        }
    };
    binomial_crossover(pop.member(i), &mutant, c, rng)
}

/// Trial vector for member `i` of `pop`.
pub fn bde_trial(
    pop: &Population,
    i: usize,
    f: f64,
    c: f64,
    rng: &mut RandomStream,
) -> Result<BitVector> {
    check_population(pop)?;
    check_index(pop, i)?;
    Ok(trial_unchecked(Variant::Original, pop, i, f, c, rng))
}

/// Trial vector for member `i` with donors drawn afresh for every gene.
pub fn ibde_trial(
    pop: &Population,
    i: usize,
    f: f64,
    c: f64,
    rng: &mut RandomStream,
) -> Result<BitVector> {
    check_population(pop)?;
    check_index(pop, i)?;
    Ok(trial_unchecked(Variant::Independent, pop, i, f, c, rng))
}

pub fn trial(
    variant: Variant,
    pop: &Population,
    i: usize,
    f: f64,
    c: f64,
    rng: &mut RandomStream,
) -> Result<BitVector> {
    match variant {
        Variant::Original => bde_trial(pop, i, f, c, rng),
        Variant::Independent => ibde_trial(pop, i, f, c, rng),
    }
}

/// One generation. Every member `i` receives its own child stream forked
/// from `rng` in member order before any trial is built, so the outcome does
/// not depend on the order in which members are processed. All donors index
/// the generation-`g` population.
pub(crate) fn generation_in_order(
    variant: Variant,
    pop: &Population,
    objective: &Objective,
    f: f64,
    c: f64,
    rng: &mut RandomStream,
    order: &[usize],
) -> Result<GenerationOutcome> {
    check_population(pop)?;
    if objective.dim() != pop.dim() {
        return Err(Error::DimensionMismatch {
            left: objective.dim(),
            right: pop.dim(),
        });
    }
    let n = pop.size();
    let parent_fitness = match pop.fitness() {
        Some(fit) => fit.to_vec(),
        None => pop
            .members()
            .iter()
            .map(|x| objective.evaluate(x))
            .collect(),
    };
    let mut streams: Vec<RandomStream> = (0..n).map(|_| rng.fork()).collect();
    let mut trials: Vec<Option<BitVector>> = vec![None; n];
    for &i in order {
        trials[i] = Some(trial_unchecked(variant, pop, i, f, c, &mut streams[i]));
    }
    let trials: Vec<BitVector> = trials
        .into_iter()
        .map(|t| t.expect("order must cover every member"))
        .collect();

    let mut accepted_count = 0;
    let mut members = Vec::with_capacity(n);
    let mut fitness = Vec::with_capacity(n);
    for (i, (u, fx)) in trials.iter().zip(parent_fitness).enumerate() {
        let fu = objective.evaluate(u);
        // Ties go to the trial.
        if fu >= fx {
            accepted_count += 1;
            members.push(u.clone());
            fitness.push(fu);
        } else {
            members.push(pop.member(i).clone());
            fitness.push(fx);
        }
    }
    Ok(GenerationOutcome {
        next_population: Population::with_fitness(members, fitness),
        accepted_count,
        trials,
    })
}

pub fn generation(
    variant: Variant,
    pop: &Population,
    objective: &Objective,
    f: f64,
    c: f64,
    rng: &mut RandomStream,
) -> Result<GenerationOutcome> {
    let order: Vec<usize> = (0..pop.size()).collect();
    generation_in_order(variant, pop, objective, f, c, rng, &order)
}

pub fn bde_generation(
    pop: &Population,
    objective: &Objective,
    f: f64,
    c: f64,
    rng: &mut RandomStream,
) -> Result<GenerationOutcome> {
    generation(Variant::Original, pop, objective, f, c, rng)
}

pub fn ibde_generation(
    pop: &Population,
    objective: &Objective,
    f: f64,
    c: f64,
    rng: &mut RandomStream,
) -> Result<GenerationOutcome> {
    generation(Variant::Independent, pop, objective, f, c, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::ObjectiveKind;
    use crate::population::sample_population;

    const VARIANTS: [Variant; 2] = [Variant::Original, Variant::Independent];

    fn random_pop(n: usize, d: usize, seed: u64) -> Population {
        sample_population(n, d, 0.5, &mut RandomStream::new(seed)).unwrap()
    }

    #[test]
    fn small_population_rejected() {
        let pop = random_pop(3, 5, 1);
        let mut rng = RandomStream::new(0);
        for v in VARIANTS {
            assert!(matches!(
                trial(v, &pop, 0, 0.5, 0.5, &mut rng),
                Err(Error::PopulationTooSmall { size: 3, min: 4 })
            ));
        }
        let f = Objective::new(ObjectiveKind::OneMax, 5).unwrap();
        assert!(bde_generation(&pop, &f, 0.5, 0.5, &mut rng).is_err());
        assert!(ibde_generation(&pop, &f, 0.5, 0.5, &mut rng).is_err());
    }

    #[test]
    fn donors_are_distinct_and_exclude_target() {
        let mut rng = RandomStream::new(5);
        for _ in 0..10_000 {
            let [a, b, c] = draw_donors(4, 2, &mut rng);
            assert!(a != b && b != c && a != c);
            assert!(![a, b, c].contains(&2));
        }
    }

    #[test]
    fn donor_triples_uniform() {
        // N=5, target 0: 4*3*2 = 24 ordered triples, each with mass 1/24.
        let mut rng = RandomStream::new(9);
        let mut counts = std::collections::HashMap::new();
        let n = 240_000;
        for _ in 0..n {
            *counts.entry(draw_donors(5, 0, &mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 24);
        let p = 1.0 / 24.0;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        for (t, &k) in &counts {
            let freq = k as f64 / n as f64;
            assert!((freq - p).abs() < 4.0 * se, "{t:?}: {freq}");
        }
    }

    #[test]
    fn zero_crossover_returns_parent() {
        let pop = random_pop(6, 90, 2);
        let mut rng = RandomStream::new(3);
        for v in VARIANTS {
            for i in 0..6 {
                let u = trial(v, &pop, i, 0.9, 0.0, &mut rng).unwrap();
                assert_eq!(&u, pop.member(i));
            }
        }
    }

    #[test]
    fn zero_scale_full_crossover_returns_base() {
        let pop = random_pop(6, 70, 4);
        for seed in 0..50 {
            let mut a = RandomStream::new(seed);
            let mut b = a.clone();
            let u = bde_trial(&pop, 1, 0.0, 1.0, &mut a).unwrap();
            let [r1, _, _] = draw_donors(6, 1, &mut b);
            assert_eq!(&u, pop.member(r1));
        }
    }

    #[test]
    fn independent_variant_with_converged_population() {
        let pop = Population::new(vec!["1011".parse().unwrap(); 5]).unwrap();
        let mut rng = RandomStream::new(1);
        let u = ibde_trial(&pop, 0, 0.0, 1.0, &mut rng).unwrap();
        assert_eq!(u.to_string(), "1011");
    }

    #[test]
    fn converged_positions_carry_over() {
        let mut pop = random_pop(8, 40, 6);
        for i in 0..8 {
            let mut x = pop.member(i).clone();
            x.set(3, true);
            x.set(17, false);
            pop.set_member(i, x).unwrap();
        }
        let mut rng = RandomStream::new(8);
        for v in VARIANTS {
            for _ in 0..500 {
                let u = trial(v, &pop, rng.below(8), 1.0, 1.0, &mut rng).unwrap();
                assert!(u.get(3));
                assert!(!u.get(17));
            }
        }
    }

    #[test]
    fn single_gene_variants_agree_in_distribution() {
        // With D = 1 both variants draw one triple; the trial-bit law is the same.
        let pop = Population::from_strs(&["1", "0", "0", "1", "1", "0"]).unwrap();
        let n = 200_000;
        let mut hits = [0usize; 2];
        for (k, v) in VARIANTS.into_iter().enumerate() {
            let mut rng = RandomStream::new(10 + k as u64);
            for _ in 0..n {
                if trial(v, &pop, 1, 0.6, 0.7, &mut rng).unwrap().get(0) {
                    hits[k] += 1;
                }
            }
        }
        let (a, b) = (hits[0] as f64 / n as f64, hits[1] as f64 / n as f64);
        let se = (a * (1.0 - a) / n as f64 + b * (1.0 - b) / n as f64).sqrt();
        assert!((a - b).abs() < 4.0 * se, "{a} vs {b}");
    }

    #[test]
    fn needle_accepts_every_trial() {
        let f = Objective::new(ObjectiveKind::Needle, 30).unwrap();
        let pop = random_pop(10, 30, 12);
        let mut rng = RandomStream::new(13);
        for v in VARIANTS {
            let out = generation(v, &pop, &f, 0.5, 0.5, &mut rng).unwrap();
            assert_eq!(out.accepted_count, 10);
            assert_eq!(out.next_population.members(), &out.trials[..]);
        }
    }

    #[test]
    fn elitist_selection() {
        let f = Objective::new(ObjectiveKind::OneMax, 50).unwrap();
        let mut rng = RandomStream::new(14);
        for v in VARIANTS {
            let mut pop = random_pop(12, 50, 15);
            for _ in 0..30 {
                let out = generation(v, &pop, &f, 0.3, 0.5, &mut rng).unwrap();
                assert!(out.accepted_count <= 12);
                assert_eq!(out.next_population.size(), 12);
                assert_eq!(out.next_population.dim(), 50);
                for i in 0..12 {
                    assert!(f.evaluate(out.next_population.member(i)) >= f.evaluate(pop.member(i)));
                }
                pop = out.next_population;
            }
        }
    }

    #[test]
    fn member_order_does_not_matter() {
        let f = Objective::new(ObjectiveKind::LeadingOnes, 25).unwrap();
        let pop = random_pop(9, 25, 16);
        let forward: Vec<usize> = (0..9).collect();
        let shuffled = vec![4, 0, 8, 2, 6, 1, 7, 3, 5];
        for v in VARIANTS {
            let a = generation_in_order(v, &pop, &f, 0.4, 0.6, &mut RandomStream::new(2), &forward)
                .unwrap();
            let b =
                generation_in_order(v, &pop, &f, 0.4, 0.6, &mut RandomStream::new(2), &shuffled)
                    .unwrap();
            assert_eq!(a.trials, b.trials);
            assert_eq!(a.next_population, b.next_population);
            assert_eq!(a.accepted_count, b.accepted_count);
        }
    }

    #[test]
    fn leadingones_locked_prefix_never_shrinks_small_exhaustive() {
        // N = 4, D = 3 over 1000 seeded generations.
        let f = Objective::new(ObjectiveKind::LeadingOnes, 3).unwrap();
        for v in VARIANTS {
            for seed in 0..1000 {
                let pop = random_pop(4, 3, seed);
                let out =
                    generation(v, &pop, &f, 0.5, 0.5, &mut RandomStream::new(seed + 7)).unwrap();
                for i in 0..4 {
                    assert!(
                        out.next_population.member(i).leading_ones()
                            >= pop.member(i).leading_ones()
                    );
                }
            }
        }
    }

    #[test]
    fn trial_ones_counts_trials() {
        let f = Objective::new(ObjectiveKind::Needle, 3).unwrap();
        let pop = Population::from_strs(&["100", "110", "000", "001"]).unwrap();
        let out = bde_generation(&pop, &f, 0.5, 1.0, &mut RandomStream::new(1)).unwrap();
        let mut expect = vec![0usize; 3];
        for u in &out.trials {
            for (j, g) in u.iter().enumerate() {
                expect[j] += usize::from(g);
            }
        }
        assert_eq!(out.trial_ones(), expect);
    }
}
