//! Closed-form single-gene drift formulas for BDE and the neutral-gene
//! chains of UMDA and cGA, Monte Carlo oracles for each, and numeric checks
//! of their monotonicity and band properties.

use serde::{Deserialize, Serialize};

use crate::algorithms::bde::{bde_mutant, binomial_crossover, ibde_trial, MIN_POPULATION};
use crate::algorithms::eda::{cga_neutral_step, umda_neutral_step, NeutralChain};
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::objectives::onemax;
use crate::params::check_probability;
use crate::population::Population;
use crate::stream::{derive_seed, RandomStream};

fn check_n(n: usize) -> Result<f64> {
    if n < MIN_POPULATION {
        return Err(Error::PopulationTooSmall {
            size: n,
            min: MIN_POPULATION,
        });
    }
    Ok(n as f64)
}

fn check_rates(f: f64, c: f64) -> Result<()> {
    check_probability(f)?;
    check_probability(c)
}

fn check_count(x: f64, max: f64, what: &str) -> Result<()> {
    if !(0.0..=max).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "{what} = {x} outside [0, {max}]"
        )));
    }
    Ok(())
}

/// `H_N(y)`: expected one-count of the trial population at a gene carried by
/// `y` of the `N` parents. Accepts real `y` so that band properties can be
/// evaluated at fractional arguments.
pub fn trial_ones_expectation(n: usize, f: f64, c: f64, y: f64) -> Result<f64> {
    let n = check_n(n)?;
    check_rates(f, c)?;
    check_count(y, n, "y")?;
    let fc = f * c;
    let num = 4.0 * fc * y.powi(3) - 6.0 * fc * n * y * y
        + ((2.0 * fc + 1.0) * n * n - 3.0 * n + 2.0) * y;
    Ok(num / ((n - 1.0) * (n - 2.0)))
}

/// `R_N(y⁻)`: probability that a mutant gene is one when `y⁻` of the `N − 1`
/// donor-eligible members carry a one.
pub fn mutant_one_prob(n: usize, f: f64, y_minus: f64) -> Result<f64> {
    let n = check_n(n)?;
    check_probability(f)?;
    check_count(y_minus, n - 1.0, "y_minus")?;
    let y = y_minus;
    let num = 4.0 * f * y.powi(3) - 6.0 * f * (n - 1.0) * y * y
        + ((2.0 * f + 1.0) * n * n - (5.0 + 4.0 * f) * n + 2.0 * f + 6.0) * y;
    Ok(num / ((n - 1.0) * (n - 2.0) * (n - 3.0)))
}

/// `S_N(z)`: probability that a member with a zero at a dominant gene holds a
/// one there after one generation, when `z` members (itself included) carry
/// a zero.
pub fn dominant_flip_prob(n: usize, f: f64, c: f64, z: f64) -> Result<f64> {
    let n = check_n(n)?;
    check_rates(f, c)?;
    if !(1.0..=n).contains(&z) {
        return Err(Error::InvalidParameter(format!("z = {z} outside [1, {n}]")));
    }
    let fc = f * c;
    let a1 = -4.0 * fc;
    let a2 = (6.0 * n + 6.0) * fc;
    let a3 = -c * ((1.0 + 2.0 * f) * n * n + (8.0 * f - 5.0) * n + 6.0 + 2.0 * f);
    let a4 = c * n.powi(3) + (2.0 * f - 5.0) * c * n * n + (6.0 + 2.0 * f) * c * n;
    let num = a1 * z.powi(3) + a2 * z * z + a3 * z + a4;
    Ok(num / ((n - 1.0) * (n - 2.0) * (n - 3.0)))
}

/// Probability that a mutant gene is one when the three donor genes are
/// independent Bernoulli(`p`).
pub fn biased_mutant_one_prob(p: f64, f: f64) -> Result<f64> {
    check_probability(p)?;
    check_probability(f)?;
    Ok(p + 4.0 * f * p * (1.0 - p) * (0.5 - p))
}

/// Rate constant of the exponential OneMax lower bound under biased
/// initialisation with one-probability `p ∈ (0.5, 1)`.
pub fn onemax_gamma(f: f64, c: f64, p: f64) -> Result<f64> {
    check_rates(f, c)?;
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p = {p} must lie in (0.5, 1)"
        )));
    }
    let q = p * (1.0 - p);
    let num = f * f * c * q * (p - 0.5).powi(2);
    let den = 1.0 + (1.0 - 2.0 * f * c * q) * f * (1.0 - 2.0 * p).powi(2);
    Ok(8.0 / 3.0 * num / den)
}

/// `E[onemax(U) − onemax(X)]` when target and donors are independent
/// Bernoulli(`p`) strings of length `d`.
pub fn expected_trial_fitness_gap(d: usize, f: f64, c: f64, p: f64) -> Result<f64> {
    check_rates(f, c)?;
    check_probability(p)?;
    Ok(4.0 * f * c * d as f64 * p * (1.0 - p) * (0.5 - p))
}

/// Per-generation lower bound on the flip probability of a dominant gene.
pub fn dominant_delta(f: f64, c: f64) -> f64 {
    3.0 * c * (4.0 - f) / 80.0
}

/// Growth constant of the one-count at a dominant gene.
pub fn dominant_growth_c0(f: f64, c: f64) -> f64 {
    1.0 + 0.7 * c * (0.5 - f / 8.0)
}

/// One-step conditional variance of a neutral frequency.
pub fn neutral_step_variance(chain: NeutralChain, p: f64, size: usize) -> Result<f64> {
    check_probability(p)?;
    if size == 0 {
        return Err(Error::InvalidParameter("size must be positive".into()));
    }
    let s = size as f64;
    Ok(match chain {
        NeutralChain::Umda => p * (1.0 - p) / s,
        NeutralChain::Cga => 2.0 * p * (1.0 - p) / (s * s),
    })
}

/// Smallest `N` with `N ≥ 3/(1 − FC)` and `N ≥ 15625 ln 2 / (288 (FC)²)`.
pub fn stability_threshold_n(f: f64, c: f64) -> Result<u64> {
    check_rates(f, c)?;
    let fc = f * c;
    if !(fc > 0.0 && fc < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "FC = {fc} must lie in (0, 1)"
        )));
    }
    let a = 3.0 / (1.0 - fc);
    let b = 15625.0 * std::f64::consts::LN_2 / (288.0 * fc * fc);
    Ok(a.max(b).ceil() as u64)
}

/// Outcome of comparing one closed form against its Monte Carlo oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaCheckResult {
    pub formula: String,
    pub params: String,
    pub closed_form: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub n_samples: u64,
    pub within_3_sigma: bool,
}

/// Absolute slack added to the three-standard-error band. It only matters at
/// degenerate points where the oracle is exact and the standard error is 0.
pub fn float_slack(value: f64) -> f64 {
    1e-9 * value.abs().max(1.0)
}

impl FormulaCheckResult {
    pub fn new(formula: &str, params: String, closed_form: f64, stats: Stats) -> Self {
        let within =
            (closed_form - stats.mean).abs() <= 3.0 * stats.stderr + float_slack(closed_form);
        FormulaCheckResult {
            formula: formula.to_string(),
            params,
            closed_form,
            mc_estimate: stats.mean,
            mc_stderr: stats.stderr,
            n_samples: stats.n,
            within_3_sigma: within,
        }
    }

    pub fn z_score(&self) -> f64 {
        if self.mc_stderr == 0.0 {
            0.0
        } else {
            (self.closed_form - self.mc_estimate) / self.mc_stderr
        }
    }
}

/// Running mean and standard error of a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

/// Streaming mean and variance (Welford).
#[derive(Clone, Debug, Default)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn stats(&self) -> Stats {
        let n = self.n as f64;
        let var = if self.n > 1 { self.m2 / (n - 1.0) } else { 0.0 };
        Stats {
            mean: self.mean,
            stderr: (var / n).sqrt(),
            n: self.n,
        }
    }
}

fn bernoulli_stats(ones: u64, n: u64) -> Stats {
    let p = ones as f64 / n as f64;
    Stats {
        mean: p,
        stderr: (p * (1.0 - p) / n as f64).sqrt(),
        n,
    }
}

/// Columns per oracle population. Each column of an iBDE population is an
/// independent replicate, since donors and random numbers are drawn afresh
/// for every gene, and the law of a single gene is the same under BDE and
/// iBDE.
const WIDTH: usize = 64;

/// `n` members over `WIDTH` genes; member `i` carries `genes(i)` in every
/// column.
fn column_population(n: usize, gene: impl Fn(usize) -> bool) -> Population {
    let members = (0..n)
        .map(|i| {
            if gene(i) {
                BitVector::ones(WIDTH)
            } else {
                BitVector::zeros(WIDTH)
            }
        })
        .collect();
    Population::new(members).expect("non-empty")
}

fn reps(samples: u64) -> u64 {
    samples.div_ceil(WIDTH as u64)
}

/// Monte Carlo oracle for [`trial_ones_expectation`]: trial one-counts of
/// whole selection-free generations.
pub fn mc_trial_ones(
    n: usize,
    f: f64,
    c: f64,
    y: usize,
    samples: u64,
    rng: &mut RandomStream,
) -> Result<Stats> {
    check_n(n)?;
    let pop = column_population(n, |i| i < y);
    let mut m = Moments::default();
    for _ in 0..reps(samples) {
        let mut counts = [0u32; WIDTH];
        for i in 0..n {
            let u = ibde_trial(&pop, i, f, c, rng)?;
            for j in u.ones_indices() {
                counts[j] += 1;
            }
        }
        counts.iter().for_each(|&k| m.push(f64::from(k)));
    }
    Ok(m.stats())
}

/// Monte Carlo oracle for [`mutant_one_prob`]. The target is member 0 and
/// `C = 1`, so the trial equals the mutant.
pub fn mc_mutant_one(
    n: usize,
    f: f64,
    y_minus: usize,
    samples: u64,
    rng: &mut RandomStream,
) -> Result<Stats> {
    check_n(n)?;
    let pop = column_population(n, |i| i >= 1 && i <= y_minus);
    let mut ones = 0u64;
    let r = reps(samples);
    for _ in 0..r {
        ones += ibde_trial(&pop, 0, f, 1.0, rng)?.count_ones() as u64;
    }
    Ok(bernoulli_stats(ones, r * WIDTH as u64))
}

/// Monte Carlo oracle for [`dominant_flip_prob`]. A dominant gene is one
/// after selection exactly when the trial gene is one.
pub fn mc_dominant_flip(
    n: usize,
    f: f64,
    c: f64,
    z: usize,
    samples: u64,
    rng: &mut RandomStream,
) -> Result<Stats> {
    check_n(n)?;
    let pop = column_population(n, |i| i >= z);
    let mut ones = 0u64;
    let r = reps(samples);
    for _ in 0..r {
        ones += ibde_trial(&pop, 0, f, c, rng)?.count_ones() as u64;
    }
    Ok(bernoulli_stats(ones, r * WIDTH as u64))
}

fn bernoulli_string(d: usize, p: f64, rng: &mut RandomStream) -> BitVector {
    BitVector::from_bools(&(0..d).map(|_| rng.bernoulli(p)).collect::<Vec<_>>())
}

/// Monte Carlo oracle for [`biased_mutant_one_prob`].
pub fn mc_biased_mutant(p: f64, f: f64, samples: u64, rng: &mut RandomStream) -> Result<Stats> {
    check_probability(p)?;
    const BLOCK: usize = 1000;
    let r = samples.div_ceil(BLOCK as u64);
    let mut ones = 0u64;
    for _ in 0..r {
        let x1 = bernoulli_string(BLOCK, p, rng);
        let x2 = bernoulli_string(BLOCK, p, rng);
        let x3 = bernoulli_string(BLOCK, p, rng);
        ones += bde_mutant(&x1, &x2, &x3, f, rng).count_ones() as u64;
    }
    Ok(bernoulli_stats(ones, r * BLOCK as u64))
}

/// Monte Carlo oracle for [`expected_trial_fitness_gap`]: independent trial
/// constructions from four Bernoulli(`p`) strings.
pub fn mc_trial_fitness_gap(
    d: usize,
    f: f64,
    c: f64,
    p: f64,
    samples: u64,
    rng: &mut RandomStream,
) -> Result<Stats> {
    check_probability(p)?;
    let mut m = Moments::default();
    for _ in 0..samples {
        let x = bernoulli_string(d, p, rng);
        let x1 = bernoulli_string(d, p, rng);
        let x2 = bernoulli_string(d, p, rng);
        let x3 = bernoulli_string(d, p, rng);
        let v = bde_mutant(&x1, &x2, &x3, f, rng);
        let u = binomial_crossover(&x, &v, c, rng);
        m.push((onemax(&u) - onemax(&x)) as f64);
    }
    Ok(m.stats())
}

/// Monte Carlo oracle for [`neutral_step_variance`]: the sample variance of
/// one step, with the standard error of a variance estimate
/// `sqrt((m4 − s⁴) / n)`.
pub fn mc_neutral_variance(
    chain: NeutralChain,
    p: f64,
    size: usize,
    samples: u64,
    rng: &mut RandomStream,
) -> Result<Stats> {
    let mut xs = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        xs.push(match chain {
            NeutralChain::Umda => umda_neutral_step(p, size, rng)?,
            NeutralChain::Cga => cga_neutral_step(p, size, rng)?,
        });
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    Ok(Stats {
        mean: var,
        stderr: ((m4 - var * var).max(0.0) / n).sqrt(),
        n: samples,
    })
}

/// One oracle check of the verification grid.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleCase {
    TrialOnes {
        n: usize,
        f: f64,
        c: f64,
        y: usize,
    },
    MutantOne {
        n: usize,
        f: f64,
        y_minus: usize,
    },
    DominantFlip {
        n: usize,
        f: f64,
        c: f64,
        z: usize,
    },
    BiasedMutant {
        p: f64,
        f: f64,
    },
    FitnessGap {
        d: usize,
        f: f64,
        c: f64,
        p: f64,
    },
    NeutralVariance {
        chain: NeutralChain,
        p: f64,
        size: usize,
    },
}

impl OracleCase {
    pub fn formula(&self) -> &'static str {
        match self {
            OracleCase::TrialOnes { .. } => "trial_ones_expectation",
            OracleCase::MutantOne { .. } => "mutant_one_prob",
            OracleCase::DominantFlip { .. } => "dominant_flip_prob",
            OracleCase::BiasedMutant { .. } => "biased_mutant_one_prob",
            OracleCase::FitnessGap { .. } => "expected_trial_fitness_gap",
            OracleCase::NeutralVariance { .. } => "neutral_step_variance",
        }
    }

    pub fn params(&self) -> String {
        match self {
            OracleCase::TrialOnes { n, f, c, y } => format!("N={n};F={f};C={c};y={y}"),
            OracleCase::MutantOne { n, f, y_minus } => format!("N={n};F={f};y_minus={y_minus}"),
            OracleCase::DominantFlip { n, f, c, z } => format!("N={n};F={f};C={c};z={z}"),
            OracleCase::BiasedMutant { p, f } => format!("p={p};F={f}"),
            OracleCase::FitnessGap { d, f, c, p } => format!("D={d};F={f};C={c};p={p}"),
            OracleCase::NeutralVariance { chain, p, size } => {
                format!("algo={};p={p};size={size}", chain.id())
            }
        }
    }

    pub fn closed_form(&self) -> Result<f64> {
        match *self {
            OracleCase::TrialOnes { n, f, c, y } => trial_ones_expectation(n, f, c, y as f64),
            OracleCase::MutantOne { n, f, y_minus } => mutant_one_prob(n, f, y_minus as f64),
            OracleCase::DominantFlip { n, f, c, z } => dominant_flip_prob(n, f, c, z as f64),
            OracleCase::BiasedMutant { p, f } => biased_mutant_one_prob(p, f),
            OracleCase::FitnessGap { d, f, c, p } => expected_trial_fitness_gap(d, f, c, p),
            OracleCase::NeutralVariance { chain, p, size } => neutral_step_variance(chain, p, size),
        }
    }

    pub fn oracle(&self, samples: u64, rng: &mut RandomStream) -> Result<Stats> {
        match *self {
            OracleCase::TrialOnes { n, f, c, y } => mc_trial_ones(n, f, c, y, samples, rng),
            OracleCase::MutantOne { n, f, y_minus } => mc_mutant_one(n, f, y_minus, samples, rng),
            OracleCase::DominantFlip { n, f, c, z } => mc_dominant_flip(n, f, c, z, samples, rng),
            OracleCase::BiasedMutant { p, f } => mc_biased_mutant(p, f, samples, rng),
            OracleCase::FitnessGap { d, f, c, p } => mc_trial_fitness_gap(d, f, c, p, samples, rng),
            OracleCase::NeutralVariance { chain, p, size } => {
                mc_neutral_variance(chain, p, size, samples, rng)
            }
        }
    }

    /// Runs the oracle on a stream derived from `master` and the case label,
    /// so results do not depend on evaluation order.
    pub fn check(&self, samples: u64, master: u64) -> Result<FormulaCheckResult> {
        let label = format!("{}:{}", self.formula(), self.params());
        let mut rng = RandomStream::new(derive_seed(master, &label));
        let stats = self.oracle(samples, &mut rng)?;
        Ok(FormulaCheckResult::new(
            self.formula(),
            self.params(),
            self.closed_form()?,
            stats,
        ))
    }
}

pub const GRID_N: [usize; 3] = [8, 16, 64];
pub const GRID_FC: [f64; 3] = [0.2, 0.5, 0.9];

/// The verification grid: every admissible count at `N = 8`, and the quarter
/// points `N/4`, `3N/4` at larger `N`, for all `F, C` in the grid.
pub fn verification_grid() -> Vec<OracleCase> {
    let mut cases = Vec::new();
    for &n in &GRID_N {
        let counts = |lo: usize, hi: usize| -> Vec<usize> {
            if n == 8 {
                (lo..=hi).collect()
            } else {
                vec![n / 4, 3 * n / 4]
            }
        };
        for &f in &GRID_FC {
            for &c in &GRID_FC {
                for y in counts(0, n) {
                    cases.push(OracleCase::TrialOnes { n, f, c, y });
                }
                for z in counts(1, n) {
                    cases.push(OracleCase::DominantFlip { n, f, c, z });
                }
            }
            for y_minus in counts(0, n - 1) {
                cases.push(OracleCase::MutantOne { n, f, y_minus });
            }
        }
    }
    for &f in &GRID_FC {
        for p in [0.1, 0.3, 0.6, 0.9] {
            cases.push(OracleCase::BiasedMutant { p, f });
        }
        for &c in &GRID_FC {
            for &d in &GRID_N {
                cases.push(OracleCase::FitnessGap { d, f, c, p: 0.6 });
            }
        }
    }
    for chain in [NeutralChain::Umda, NeutralChain::Cga] {
        for &size in &GRID_N {
            for p in [0.25, 0.5, 0.75] {
                cases.push(OracleCase::NeutralVariance { chain, p, size });
            }
        }
    }
    cases
}

/// Runs every case of `cases`, in parallel when the `parallel` feature is on.
pub fn run_checks(
    cases: &[OracleCase],
    samples: u64,
    master: u64,
) -> Result<Vec<FormulaCheckResult>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cases.par_iter().map(|c| c.check(samples, master)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cases.iter().map(|c| c.check(samples, master)).collect()
    }
}

/// Result of one numeric property sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl PropertyReport {
    fn new(name: &'static str) -> Self {
        PropertyReport {
            name,
            checked: 0,
            violations: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(describe());
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }
}

/// `F, C ∈ {0.1, …, 0.9}`.
pub fn property_rates() -> Vec<f64> {
    (1..=9).map(|k| f64::from(k) / 10.0).collect()
}

/// `N ∈ {8, 16, …, 256}`.
pub fn property_sizes() -> Vec<usize> {
    (1..=32).map(|k| 8 * k).collect()
}

fn h(n: usize, f: f64, c: f64, y: f64) -> f64 {
    trial_ones_expectation(n, f, c, y).expect("valid grid point")
}

fn r(n: usize, f: f64, y: f64) -> f64 {
    mutant_one_prob(n, f, y).expect("valid grid point")
}

fn s(n: usize, f: f64, c: f64, z: f64) -> f64 {
    dominant_flip_prob(n, f, c, z).expect("valid grid point")
}

/// `H_N` is increasing on `0..=N` whenever `N ≥ 3/(1 − FC)`.
pub fn check_h_monotone() -> PropertyReport {
    let mut rep = PropertyReport::new("H_N monotone");
    for f in property_rates() {
        for c in property_rates() {
            for n in property_sizes() {
                if (n as f64) < 3.0 / (1.0 - f * c) {
                    continue;
                }
                for y in 0..n {
                    let (a, b) = (h(n, f, c, y as f64), h(n, f, c, (y + 1) as f64));
                    rep.check(b > a, || format!("N={n} F={f} C={c} y={y}: {a} >= {b}"));
                }
            }
        }
    }
    rep
}

/// `H_N(y) > y` below `N/2` and `H_N(y) < y` above it.
pub fn check_h_drift_to_middle() -> PropertyReport {
    let mut rep = PropertyReport::new("H_N drifts to the middle");
    for f in property_rates() {
        for c in property_rates() {
            for n in property_sizes() {
                for y in 1..n {
                    let v = h(n, f, c, y as f64);
                    let yf = y as f64;
                    let half = n as f64 / 2.0;
                    if yf < half {
                        rep.check(v > yf, || format!("N={n} F={f} C={c} y={y}: H={v}"));
                    } else if yf > half {
                        rep.check(v < yf, || format!("N={n} F={f} C={c} y={y}: H={v}"));
                    }
                }
            }
        }
    }
    rep
}

/// Monotonicity of `R_N` for `N ≥ (5 − 2F)/(1 − F)`.
pub fn check_r_monotone() -> PropertyReport {
    let mut rep = PropertyReport::new("R_N monotone");
    for f in property_rates() {
        for n in property_sizes() {
            if (n as f64) < (5.0 - 2.0 * f) / (1.0 - f) {
                continue;
            }
            for y in 0..n - 1 {
                let (a, b) = (r(n, f, y as f64), r(n, f, (y + 1) as f64));
                rep.check(b > a, || format!("N={n} F={f} y={y}: {a} >= {b}"));
            }
        }
    }
    rep
}

/// The four band facts of `R_N` at the fractions 12/25, 13/25, 8/25, 17/25,
/// each under its own size hypothesis.
pub fn check_r_bands() -> PropertyReport {
    let mut rep = PropertyReport::new("R_N band facts");
    for f in property_rates() {
        let wide = (3125.0 - 1224.0 * f) / (625.0 - 612.0 * f);
        for n in property_sizes() {
            let nf = n as f64;
            let monotone = nf >= (5.0 - 2.0 * f) / (1.0 - f);
            if monotone {
                let v = r(n, f, 0.48 * (nf - 1.0));
                rep.check(v > 0.48, || format!("N={n} F={f}: R(0.48(N-1)) = {v}"));
            }
            if nf >= 625.0 / (24.0 * f) {
                let v = r(n, f, 0.52 * nf);
                rep.check(v < 0.52, || format!("N={n} F={f}: R(0.52N) = {v}"));
            }
            if monotone && nf > wide {
                let v = r(n, f, 0.32 * (nf - 1.0));
                rep.check(v < 0.48, || format!("N={n} F={f}: R(0.32(N-1)) = {v}"));
                let v = r(n, f, 0.68 * nf);
                rep.check(v > 0.52, || format!("N={n} F={f}: R(0.68N) = {v}"));
            }
        }
    }
    rep
}

fn s_threshold(f: f64) -> f64 {
    ((5.0 - 2.0 * f) / (1.0 - f)).max(11.0)
}

/// `S_N` decreases in `z` for `N ≥ max{(5 − 2F)/(1 − F), 11}`.
pub fn check_s_monotone() -> PropertyReport {
    let mut rep = PropertyReport::new("S_N decreasing");
    for f in property_rates() {
        for c in property_rates() {
            for n in property_sizes() {
                if (n as f64) < s_threshold(f) {
                    continue;
                }
                for z in 1..n {
                    let (a, b) = (s(n, f, c, z as f64), s(n, f, c, (z + 1) as f64));
                    rep.check(b < a, || format!("N={n} F={f} C={c} z={z}: {a} <= {b}"));
                }
            }
        }
    }
    rep
}

/// `S_N(aN) ≥ C(1 − a)(1/2 − F/8)` for `a ∈ {0.1, …, 0.9}`.
pub fn check_s_lower_bound() -> PropertyReport {
    let mut rep = PropertyReport::new("S_N lower bound");
    for f in property_rates() {
        for c in property_rates() {
            for n in property_sizes() {
                if (n as f64) < s_threshold(f) {
                    continue;
                }
                for k in 1..=9 {
                    let a = f64::from(k) / 10.0;
                    let v = s(n, f, c, a * n as f64);
                    let bound = c * (1.0 - a) * (0.5 - f / 8.0);
                    rep.check(v >= bound, || {
                        format!("N={n} F={f} C={c} a={a}: {v} < {bound}")
                    });
                }
            }
        }
    }
    rep
}

/// `aN(aN−1)(aN−2) / ((N−1)(N−2)(N−3)) ≥ a³/4` for `a ∈ (0, (2/5)√10]` and
/// integer `N ≥ 4/a`.
pub fn check_cubic_ratio_bound() -> PropertyReport {
    let mut rep = PropertyReport::new("cubic ratio bound");
    let a_max = 0.4 * 10f64.sqrt();
    let mut grid: Vec<f64> = (1..=12).map(|k| f64::from(k) / 10.0).collect();
    grid.push(a_max);
    for a in grid {
        let n_min = (4.0 / a).ceil() as usize;
        for n in n_min.max(4)..=256 {
            let an = a * n as f64;
            let nf = n as f64;
            let lhs = an * (an - 1.0) * (an - 2.0) / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0));
            let rhs = a.powi(3) / 4.0;
            rep.check(lhs >= rhs, || format!("a={a} N={n}: {lhs} < {rhs}"));
        }
    }
    rep
}

pub fn property_suite() -> Vec<PropertyReport> {
    vec![
        check_h_monotone(),
        check_h_drift_to_middle(),
        check_r_monotone(),
        check_r_bands(),
        check_s_monotone(),
        check_s_lower_bound(),
        check_cubic_ratio_bound(),
    ]
}
