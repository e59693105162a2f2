//! Run drivers: iterate generations until success, premature convergence,
//! a band exit, or the generation budget.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bde::{generation, GenerationOutcome, Variant};
use super::eda::{cga_step, umda_step, FrequencyState, NeutralChain};
use crate::analysis::FrequencyTrace;
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::params::AlgorithmParams;
use crate::population::{sample_population, Population};
use crate::stream::RandomStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Bde,
    Ibde,
    Umda,
    Cga,
    /// Reduced single-bit UMDA chain on a neutral gene.
    UmdaNeutral,
    /// Reduced single-bit cGA chain on a neutral gene.
    CgaNeutral,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Bde,
        Algorithm::Ibde,
        Algorithm::Umda,
        Algorithm::Cga,
        Algorithm::UmdaNeutral,
        Algorithm::CgaNeutral,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Bde => "bde",
            Algorithm::Ibde => "ibde",
            Algorithm::Umda => "umda",
            Algorithm::Cga => "cga",
            Algorithm::UmdaNeutral => "umda_neutral",
            Algorithm::CgaNeutral => "cga_neutral",
        }
    }

    fn variant(self) -> Option<Variant> {
        match self {
            Algorithm::Bde => Some(Variant::Original),
            Algorithm::Ibde => Some(Variant::Independent),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Success,
    FrequencyZero,
    GenerationLimit,
    BandExit,
}

impl Status {
    pub fn id(self) -> &'static str {
        match self {
            Status::Success => "success",
            Status::FrequencyZero => "frequency_zero",
            Status::GenerationLimit => "generation_limit",
            Status::BandExit => "band_exit",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Which genes to record per generation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    #[default]
    None,
    /// Only the last gene (the conventional neutral position).
    LastBit,
    AllBits,
}

impl FromStr for TraceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(TraceMode::None),
            "last" | "last_bit" => Ok(TraceMode::LastBit),
            "all" | "all_bits" => Ok(TraceMode::AllBits),
            other => Err(Error::InvalidParameter(format!(
                "unknown trace mode {other:?}"
            ))),
        }
    }
}

/// Closed frequency band `[lo, hi]`, as fractions of the population size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn contains(&self, count: usize, scale: usize) -> bool {
        let y = count as f64;
        let s = scale as f64;
        y >= self.lo * s && y <= self.hi * s
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub trace: TraceMode,
    /// When set, a run stops with [`Status::BandExit`] as soon as any gene's
    /// frequency leaves the band.
    pub band: Option<Band>,
    /// Replaces the sampled initial population (BDE/iBDE only).
    pub initial_population: Option<Population>,
}

impl RunOptions {
    pub fn traced(trace: TraceMode) -> Self {
        RunOptions {
            trace,
            ..Default::default()
        }
    }
}

/// Hook receiving every BDE/iBDE generation as it happens.
pub trait RunObserver {
    fn on_generation(&mut self, _g: u64, _parent: &Population, _outcome: &GenerationOutcome) {}
}

impl RunObserver for () {}

impl<F: FnMut(u64, &Population, &GenerationOutcome)> RunObserver for F {
    fn on_generation(&mut self, g: u64, parent: &Population, outcome: &GenerationOutcome) {
        self(g, parent, outcome)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub objective: String,
    pub status: Status,
    /// Completed whole-population updates at termination.
    pub generations: u64,
    pub trace: Option<FrequencyTrace>,
    pub params: AlgorithmParams,
    pub seed: u64,
}

fn trace_columns(mode: TraceMode, dim: usize) -> Option<Vec<usize>> {
    match mode {
        TraceMode::None => None,
        TraceMode::LastBit => Some(vec![dim - 1]),
        TraceMode::AllBits => Some((0..dim).collect()),
    }
}

/// Runs `algorithm` on `objective` from a stream seeded with `seed`.
pub fn run(
    algorithm: Algorithm,
    objective: &Objective,
    params: &AlgorithmParams,
    seed: u64,
    trace: TraceMode,
) -> Result<RunRecord> {
    let mut rng = RandomStream::new(seed);
    run_with(
        algorithm,
        objective,
        params,
        &mut rng,
        RunOptions::traced(trace),
        &mut (),
    )
}

/// Runs `algorithm` drawing from `rng`.
pub fn run_with(
    algorithm: Algorithm,
    objective: &Objective,
    params: &AlgorithmParams,
    rng: &mut RandomStream,
    options: RunOptions,
    observer: &mut dyn RunObserver,
) -> Result<RunRecord> {
    params.validate()?;
    if params.dim != objective.dim() {
        return Err(Error::DimensionMismatch {
            left: params.dim,
            right: objective.dim(),
        });
    }
    let seed = rng.seed();
    let (status, generations, trace) = match algorithm {
        Algorithm::Bde | Algorithm::Ibde => {
            let variant = algorithm.variant().expect("BDE variant");
            run_bde(variant, objective, params, rng, options, observer)?
        }
        Algorithm::Umda | Algorithm::Cga => run_eda(algorithm, objective, params, rng, &options)?,
        Algorithm::UmdaNeutral => {
            run_neutral(NeutralChain::Umda, params.mu, params, rng, &options)?
        }
        Algorithm::CgaNeutral => run_neutral(NeutralChain::Cga, params.k, params, rng, &options)?,
    };
    Ok(RunRecord {
        algorithm,
        objective: objective.name(),
        status,
        generations,
        trace,
        params: params.clone(),
        seed,
    })
}

type Outcome = (Status, u64, Option<FrequencyTrace>);

/// Population-level termination checks shared by BDE and iBDE.
fn population_status(
    pop: &Population,
    objective: &Objective,
    band: Option<Band>,
) -> Option<Status> {
    let fitness = pop.fitness().expect("population evaluated");
    let optimum = objective.optimum_value();
    if fitness.iter().any(|v| *v == optimum) {
        return Some(Status::Success);
    }
    let union = pop.column_union();
    if (0..pop.dim()).any(|j| objective.requires_one(j) && !union.get(j)) {
        return Some(Status::FrequencyZero);
    }
    if let Some(band) = band {
        let n = pop.size();
        if pop.one_counts().into_iter().any(|y| !band.contains(y, n)) {
            return Some(Status::BandExit);
        }
    }
    None
}

fn run_bde(
    variant: Variant,
    objective: &Objective,
    params: &AlgorithmParams,
    rng: &mut RandomStream,
    options: RunOptions,
    observer: &mut dyn RunObserver,
) -> Result<Outcome> {
    let mut pop = match options.initial_population {
        Some(p) => {
            if p.dim() != params.dim {
                return Err(Error::DimensionMismatch {
                    left: params.dim,
                    right: p.dim(),
                });
            }
            p
        }
        None => sample_population(params.pop_size, params.dim, params.init_p, rng)?,
    };
    if pop.size() < super::bde::MIN_POPULATION {
        return Err(Error::PopulationTooSmall {
            size: pop.size(),
            min: super::bde::MIN_POPULATION,
        });
    }
    pop.evaluate(objective);
    let mut trace = trace_columns(options.trace, params.dim)
        .map(|cols| FrequencyTrace::new(pop.size() as u32, cols));
    let mut g = 0u64;
    loop {
        if let Some(t) = trace.as_mut() {
            let counts: Vec<u32> = pop.one_counts().into_iter().map(|c| c as u32).collect();
            t.push_counts(&counts);
        }
        if let Some(status) = population_status(&pop, objective, options.band) {
            return Ok((status, g, trace));
        }
        if g >= params.max_generations {
            return Ok((Status::GenerationLimit, g, trace));
        }
        let outcome = generation(
            variant,
            &pop,
            objective,
            params.scale_factor,
            params.crossover_rate,
            rng,
        )?;
        observer.on_generation(g, &pop, &outcome);
        pop = outcome.next_population;
        g += 1;
    }
}

fn frequency_counts(p: &[f64], scale: usize) -> Vec<u32> {
    p.iter()
        .map(|&x| (x * scale as f64).round() as u32)
        .collect()
}

fn run_eda(
    algorithm: Algorithm,
    objective: &Objective,
    params: &AlgorithmParams,
    rng: &mut RandomStream,
    options: &RunOptions,
) -> Result<Outcome> {
    let scale = match algorithm {
        Algorithm::Umda => params.mu,
        _ => params.k,
    };
    let mut state = FrequencyState::uniform(params.dim, params.init_p)?;
    let mut trace = trace_columns(options.trace, params.dim)
        .map(|cols| FrequencyTrace::new(scale as u32, cols));
    let pinned: Vec<bool> = {
        let mut v = vec![false; params.dim];
        for &(j, _) in objective.pins() {
            v[j] = true;
        }
        v
    };
    let mut g = 0u64;
    loop {
        if let Some(t) = trace.as_mut() {
            t.push_counts(&frequency_counts(&state.p, scale));
        }
        // Sampling the optimum is certain once every free gene is at 1.
        if state
            .p
            .iter()
            .zip(&pinned)
            .all(|(&p, &pin)| pin || p == 1.0)
        {
            return Ok((Status::Success, g, trace));
        }
        if state
            .p
            .iter()
            .enumerate()
            .any(|(j, &p)| p == 0.0 && objective.requires_one(j))
        {
            return Ok((Status::FrequencyZero, g, trace));
        }
        if let Some(band) = options.band {
            if frequency_counts(&state.p, scale)
                .into_iter()
                .any(|y| !band.contains(y as usize, scale))
            {
                return Ok((Status::BandExit, g, trace));
            }
        }
        if g >= params.max_generations {
            return Ok((Status::GenerationLimit, g, trace));
        }
        let outcome = match algorithm {
            Algorithm::Umda => umda_step(&state, objective, params.mu, params.lambda, rng)?,
            _ => cga_step(&state, objective, params.k, rng)?,
        };
        if outcome.sampled_optimum {
            return Ok((Status::Success, g, trace));
        }
        state = outcome.next;
        g += 1;
    }
}

/// Reduced chains track one neutral frequency. Absorption at one is reported
/// as success and absorption at zero as frequency zero.
fn run_neutral(
    chain: NeutralChain,
    size: usize,
    params: &AlgorithmParams,
    rng: &mut RandomStream,
    options: &RunOptions,
) -> Result<Outcome> {
    let mut p = params.init_p;
    let mut trace = match options.trace {
        TraceMode::None => None,
        _ => Some(FrequencyTrace::new(size as u32, vec![0])),
    };
    let mut g = 0u64;
    loop {
        let count = (p * size as f64).round() as u32;
        if let Some(t) = trace.as_mut() {
            t.push_counts(&[count]);
        }
        if p == 1.0 {
            return Ok((Status::Success, g, trace));
        }
        if p == 0.0 {
            return Ok((Status::FrequencyZero, g, trace));
        }
        if let Some(band) = options.band {
            if !band.contains(count as usize, size) {
                return Ok((Status::BandExit, g, trace));
            }
        }
        if g >= params.max_generations {
            return Ok((Status::GenerationLimit, g, trace));
        }
        p = chain.step(p, size, rng)?;
        g += 1;
    }
}
