//! Experiment configuration, batch execution, canned reproductions and
//! file output.
//!
//! Run `r` of an experiment labelled `label` draws from
//! `RandomStream::for_run(derive_seed(master, label), r)`, so results are
//! identical whether runs execute sequentially or on a worker pool.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::bde::{bde_trial, generation, Variant};
use crate::algorithms::eda::{neutral_hitting_time, NeutralChain};
use crate::algorithms::run::{run_with, Algorithm, RunOptions, RunRecord, Status, TraceMode};
use crate::analysis::{
    first_band_exit, forced_mismatch_count, quantiles, reachability_report, tuple_reachable_count,
    FrequencyTrace, ReachabilityReport,
};
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::objectives::{trap_nonconverge, Objective, ObjectiveKind};
use crate::params::AlgorithmParams;
use crate::population::{sample_population, Population};
use crate::stream::{derive_seed, RandomStream};
use crate::theory::{
    dominant_delta, expected_trial_fitness_gap, mc_trial_fitness_gap, stability_threshold_n,
    FormulaCheckResult, Moments, Stats,
};

/// Master seed used by the canned reproductions unless overridden.
pub const DEFAULT_SEED: u64 = 2018;

/// Maps `f` over `0..count` in index order, on the rayon pool when the
/// `parallel` feature is enabled.
pub fn par_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

fn try_par_map<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    par_map(count, f).into_iter().collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Outputs {
    pub runs_csv: Option<PathBuf>,
    pub quantiles_csv: Option<PathBuf>,
    pub summary_json: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub algorithm: Algorithm,
    pub objective: ObjectiveKind,
    #[serde(default)]
    pub params: AlgorithmParams,
    pub runs: u64,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub trace_bits: TraceMode,
    /// Gene whose frequency quantiles are tabulated; defaults to the last.
    #[serde(default)]
    pub quantile_bit: Option<usize>,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl ExperimentConfig {
    pub fn new(
        id: &str,
        algorithm: Algorithm,
        objective: ObjectiveKind,
        params: AlgorithmParams,
        runs: u64,
        master_seed: u64,
    ) -> Self {
        ExperimentConfig {
            experiment_id: id.to_string(),
            algorithm,
            objective,
            params,
            runs,
            master_seed,
            trace_bits: TraceMode::None,
            quantile_bit: None,
            outputs: Outputs::default(),
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self) -> Result<Objective> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        self.params.validate()?;
        let neutral = matches!(
            self.algorithm,
            Algorithm::UmdaNeutral | Algorithm::CgaNeutral
        );
        // The reduced chains model a neutral gene; needle is the only
        // objective whose genes are all neutral.
        if neutral && self.objective != ObjectiveKind::Needle {
            return Err(Error::IncompatiblePair {
                algorithm: self.algorithm.id().into(),
                objective: self.objective.id().into(),
            });
        }
        Objective::new(self.objective, self.params.dim)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub success: u64,
    pub frequency_zero: u64,
    pub generation_limit: u64,
    pub band_exit: u64,
}

impl StatusCounts {
    pub fn from_records(records: &[RunRecord]) -> Self {
        let mut c = StatusCounts::default();
        for r in records {
            match r.status {
                Status::Success => c.success += 1,
                Status::FrequencyZero => c.frequency_zero += 1,
                Status::GenerationLimit => c.generation_limit += 1,
                Status::BandExit => c.band_exit += 1,
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.success + self.frequency_zero + self.generation_limit + self.band_exit
    }
}

/// Min, mean and max generations over successful runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub min: u64,
    pub mean: f64,
    pub max: u64,
}

impl RuntimeStats {
    pub fn of_successes(records: &[RunRecord]) -> Option<Self> {
        let gens: Vec<u64> = records
            .iter()
            .filter(|r| r.status == Status::Success)
            .map(|r| r.generations)
            .collect();
        let min = *gens.iter().min()?;
        let max = *gens.iter().max()?;
        let mean = gens.iter().sum::<u64>() as f64 / gens.len() as f64;
        Some(RuntimeStats { min, mean, max })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub generation: u64,
    pub values: Vec<f64>,
    pub min_all_bits: f64,
}

pub const TRAJECTORY_QUANTILES: [f64; 5] = [0.0, 0.1, 0.5, 0.9, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment_id: String,
    pub algorithm: Algorithm,
    pub objective: String,
    pub runs: Vec<RunRecord>,
    pub runtime: Option<RuntimeStats>,
    pub status_counts: StatusCounts,
    pub quantiles: Option<Vec<QuantileRow>>,
}

/// Executes `cfg.runs` independent runs and writes the configured outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let objective = cfg.validate()?;
    let master = derive_seed(cfg.master_seed, &cfg.experiment_id);
    let records = try_par_map(cfg.runs as usize, |r| {
        let mut rng = RandomStream::for_run(master, r as u64);
        run_with(
            cfg.algorithm,
            &objective,
            &cfg.params,
            &mut rng,
            RunOptions::traced(cfg.trace_bits),
            &mut (),
        )
    })?;
    let quantiles = if cfg.trace_bits == TraceMode::None {
        None
    } else {
        let traces: Vec<FrequencyTrace> = records.iter().filter_map(|r| r.trace.clone()).collect();
        let bit = cfg.quantile_bit.unwrap_or(cfg.params.dim - 1);
        Some(quantile_table(&traces, bit, &TRAJECTORY_QUANTILES)?)
    };
    let summary = ExperimentSummary {
        experiment_id: cfg.experiment_id.clone(),
        algorithm: cfg.algorithm,
        objective: objective.name(),
        runtime: RuntimeStats::of_successes(&records),
        status_counts: StatusCounts::from_records(&records),
        runs: records,
        quantiles,
    };
    if let Some(p) = &cfg.outputs.runs_csv {
        write_runs_csv(p, &summary.runs)?;
    }
    if let (Some(p), Some(q)) = (&cfg.outputs.quantiles_csv, &summary.quantiles) {
        write_quantiles_csv(p, &TRAJECTORY_QUANTILES, q)?;
    }
    if let Some(p) = &cfg.outputs.summary_json {
        write_json(p, &summary.without_traces())?;
    }
    Ok(summary)
}

impl ExperimentSummary {
    /// Copy with per-run traces dropped, for compact JSON output.
    pub fn without_traces(&self) -> ExperimentSummary {
        let mut s = self.clone();
        for r in &mut s.runs {
            r.trace = None;
        }
        s
    }
}

/// Per-generation quantiles of gene `bit` over the runs still active at
/// that generation, together with the minimum frequency over all genes of
/// those runs.
pub fn quantile_table(
    traces: &[FrequencyTrace],
    bit: usize,
    qs: &[f64],
) -> Result<Vec<QuantileRow>> {
    let first = traces.first().ok_or(Error::EmptyInput)?;
    let mut series = Vec::with_capacity(traces.len());
    for t in traces {
        if t.scale != first.scale || t.columns != first.columns {
            return Err(Error::ShapeMismatch(
                "traces differ in population size or recorded genes".into(),
            ));
        }
        let s = t.series(bit).ok_or_else(|| {
            Error::ShapeMismatch(format!("gene {bit} is not recorded in the traces"))
        })?;
        series.push(s);
    }
    let longest = traces.iter().map(|t| t.generations()).max().unwrap_or(0);
    let mut rows = Vec::with_capacity(longest);
    for g in 0..longest {
        let mut samples = Vec::new();
        let mut min_all = f64::INFINITY;
        for (t, s) in traces.iter().zip(&series) {
            if g < s.len() {
                samples.push(t.frequency(s[g]));
                min_all = min_all.min(t.frequency(t.min_all_bits[g]));
            }
        }
        rows.push(QuantileRow {
            generation: g as u64,
            values: quantiles(&samples, qs)?,
            min_all_bits: min_all,
        });
    }
    Ok(rows)
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    ensure_parent(path)?;
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub const RUNS_HEADER: [&str; 14] = [
    "run_id",
    "algo",
    "objective",
    "D",
    "N",
    "F",
    "C",
    "mu",
    "lambda",
    "K",
    "init_p",
    "seed",
    "status",
    "generations",
];

pub fn write_runs_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    write_rows(
        path,
        &RUNS_HEADER,
        records.iter().enumerate().map(|(i, r)| {
            let p = &r.params;
            vec![
                i.to_string(),
                r.algorithm.id().to_string(),
                r.objective.clone(),
                p.dim.to_string(),
                p.pop_size.to_string(),
                p.scale_factor.to_string(),
                p.crossover_rate.to_string(),
                p.mu.to_string(),
                p.lambda.to_string(),
                p.k.to_string(),
                p.init_p.to_string(),
                r.seed.to_string(),
                r.status.id().to_string(),
                r.generations.to_string(),
            ]
        }),
    )
}

fn quantile_label(q: f64) -> String {
    if q == 0.0 {
        "min".into()
    } else if q == 1.0 {
        "max".into()
    } else {
        format!("q{}", (q * 100.0).round())
    }
}

/// Writes `generation,<quantile columns>,min_all_bits`; with
/// [`TRAJECTORY_QUANTILES`] the columns are `min,q10,q50,q90,max`.
pub fn write_quantiles_csv(path: &Path, qs: &[f64], rows: &[QuantileRow]) -> Result<()> {
    let mut header = vec!["generation".to_string()];
    header.extend(qs.iter().map(|&q| quantile_label(q)));
    header.push("min_all_bits".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_rows(
        path,
        &header,
        rows.iter().map(|r| {
            let mut row = vec![r.generation.to_string()];
            row.extend(r.values.iter().map(f64::to_string));
            row.push(r.min_all_bits.to_string());
            row
        }),
    )
}

pub const THEORY_HEADER: [&str; 7] = [
    "formula",
    "params",
    "closed_form",
    "mc_estimate",
    "mc_stderr",
    "n_samples",
    "pass",
];

pub fn write_theory_csv(path: &Path, results: &[FormulaCheckResult]) -> Result<()> {
    write_rows(
        path,
        &THEORY_HEADER,
        results.iter().map(|r| {
            vec![
                r.formula.clone(),
                r.params.clone(),
                r.closed_form.to_string(),
                r.mc_estimate.to_string(),
                r.mc_stderr.to_string(),
                r.n_samples.to_string(),
                r.within_3_sigma.to_string(),
            ]
        }),
    )
}

/// First generation at which the monitored event occurred in one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingRow {
    pub algo: String,
    pub size_param: usize,
    pub run_id: u64,
    pub hit_generation: Option<u64>,
}

pub const HITTING_HEADER: [&str; 4] = ["algo", "size_param", "run_id", "hit_generation"];

/// Writes `hitting.csv`; runs that never hit within the budget get an empty
/// `hit_generation`.
pub fn write_hitting_csv(path: &Path, rows: &[HittingRow]) -> Result<()> {
    write_rows(
        path,
        &HITTING_HEADER,
        rows.iter().map(|r| {
            vec![
                r.algo.clone(),
                r.size_param.to_string(),
                r.run_id.to_string(),
                r.hit_generation.map(|g| g.to_string()).unwrap_or_default(),
            ]
        }),
    )
}

/// Mean hitting time per size parameter, in first-appearance order. Runs
/// without a hit are excluded.
pub fn mean_hitting_times(rows: &[HittingRow]) -> Vec<(usize, f64, usize)> {
    let mut sizes: Vec<usize> = Vec::new();
    for r in rows {
        if !sizes.contains(&r.size_param) {
            sizes.push(r.size_param);
        }
    }
    sizes
        .into_iter()
        .map(|s| {
            let hits: Vec<u64> = rows
                .iter()
                .filter(|r| r.size_param == s)
                .filter_map(|r| r.hit_generation)
                .collect();
            let mean = hits.iter().sum::<u64>() as f64 / hits.len().max(1) as f64;
            (s, mean, hits.len())
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" | "full" => Ok(Scale::Paper),
            other => Err(Error::InvalidParameter(format!(
                "unknown scale {other:?} (expected desk or paper)"
            ))),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        })
    }
}

pub const EXPERIMENT_IDS: [&str; 13] = [
    "table1_lo",
    "table2_bv",
    "table3_onemax",
    "fig_neutral_quantiles",
    "fig_bv_quantiles",
    "needle_stability",
    "dominant_convergence",
    "edahit_umda",
    "edahit_cga",
    "biased_init_gap",
    "reach_demo",
    "trap_demo",
    "fig_om_scaling",
];

/// BDE/iBDE dimension, population size and run count of the LeadingOnes and
/// BinaryValue runtime tables.
pub fn runtime_table_shape(scale: Scale) -> (usize, usize, u64) {
    match scale {
        Scale::Desk => (200, 200, 20),
        Scale::Paper => (1000, 1000, 100),
    }
}

/// Runtime table on `kind` for BDE and iBDE at `F = 0.2`, `C = 0.3`.
pub fn runtime_table(
    kind: ObjectiveKind,
    dim: usize,
    pop: usize,
    runs: u64,
    seed: u64,
    trace: TraceMode,
) -> Result<Vec<ExperimentSummary>> {
    [Algorithm::Bde, Algorithm::Ibde]
        .into_iter()
        .map(|algo| {
            let params =
                AlgorithmParams::bde(dim, pop, 0.2, 0.3).with_max_generations(10 * dim as u64);
            let mut cfg = ExperimentConfig::new(
                &format!("{}/{}", kind.id(), algo.id()),
                algo,
                kind,
                params,
                runs,
                seed,
            );
            cfg.trace_bits = trace;
            run_experiment(&cfg)
        })
        .collect()
}

/// Outcome counts of BDE and iBDE on OneMax, budget 2000, one summary per
/// algorithm and population size.
pub fn onemax_status_table(
    dim: usize,
    sizes: &[usize],
    runs: u64,
    seed: u64,
) -> Result<Vec<ExperimentSummary>> {
    let mut out = Vec::new();
    for algo in [Algorithm::Bde, Algorithm::Ibde] {
        for &n in sizes {
            let params = AlgorithmParams::bde(dim, n, 0.2, 0.3).with_max_generations(2000);
            let id = format!("onemax/{}/D{dim}/N{n}", algo.id());
            out.push(run_experiment(&ExperimentConfig::new(
                &id,
                algo,
                ObjectiveKind::OneMax,
                params,
                runs,
                seed,
            ))?);
        }
    }
    Ok(out)
}

pub fn table3_shape(scale: Scale) -> (usize, Vec<usize>, u64) {
    match scale {
        Scale::Desk => (100, vec![25, 50, 100], 20),
        Scale::Paper => (500, vec![25, 50, 100, 1000, 10000], 100),
    }
}

/// Band-exit bookkeeping of one Needle run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeedleRun {
    pub algo: String,
    pub run_id: u64,
    pub status: Status,
    pub generations: u64,
    /// Number of (generation, gene) pairs outside the band.
    pub exits: u64,
    pub first_exit: Option<u64>,
}

/// Needle stability: `D = 20`, `F = C = 0.9`, `N` = stability threshold + 6,
/// every gene monitored against the band `[0.4N, 0.6N]`.
pub fn needle_stability(generations: u64, runs: u64, seed: u64) -> Result<(usize, Vec<NeedleRun>)> {
    let n = stability_threshold_n(0.9, 0.9)? as usize + 6;
    let dim = 20;
    let objective = Objective::new(ObjectiveKind::Needle, dim)?;
    let params = AlgorithmParams::bde(dim, n, 0.9, 0.9).with_max_generations(generations);
    let mut rows = Vec::new();
    for algo in [Algorithm::Bde, Algorithm::Ibde] {
        let master = derive_seed(seed, &format!("needle_stability/{}", algo.id()));
        rows.extend(try_par_map(runs as usize, |r| {
            let mut rng = RandomStream::for_run(master, r as u64);
            let rec = run_with(
                algo,
                &objective,
                &params,
                &mut rng,
                RunOptions::traced(TraceMode::AllBits),
                &mut (),
            )?;
            let trace = rec.trace.as_ref().expect("traced run");
            let (lo, hi) = (0.4 * n as f64, 0.6 * n as f64);
            let mut exits = 0;
            let mut first: Option<u64> = None;
            for &bit in &trace.columns {
                let s = trace.series(bit).expect("recorded");
                exits += s
                    .iter()
                    .filter(|&&y| f64::from(y) < lo || f64::from(y) > hi)
                    .count() as u64;
                if let Some(g) = first_band_exit(&s, lo, hi)?.generation {
                    first = Some(first.map_or(g, |f| f.min(g)));
                }
            }
            Ok(NeedleRun {
                algo: algo.id().into(),
                run_id: r as u64,
                status: rec.status,
                generations: rec.generations,
                exits,
                first_exit: first,
            })
        })?);
    }
    Ok((n, rows))
}

/// Generations until every member carries a one at the dominant gene of
/// `dominant_onemax`, started from a uniform population.
pub fn dominant_convergence(
    dim: usize,
    sizes: &[usize],
    runs: u64,
    budget: u64,
    seed: u64,
) -> Result<Vec<HittingRow>> {
    let objective = Objective::new(ObjectiveKind::DominantOneMax, dim)?;
    let mut rows = Vec::new();
    for &n in sizes {
        let master = derive_seed(seed, &format!("dominant_convergence/N{n}"));
        rows.extend(try_par_map(runs as usize, |r| {
            let mut rng = RandomStream::for_run(master, r as u64);
            let mut pop = sample_population(n, dim, 0.5, &mut rng)?;
            pop.evaluate(&objective);
            let mut hit = None;
            for g in 0..=budget {
                if pop.column_intersection().get(0) {
                    hit = Some(g);
                    break;
                }
                if g < budget {
                    pop = generation(Variant::Original, &pop, &objective, 0.2, 0.3, &mut rng)?
                        .next_population;
                }
            }
            Ok(HittingRow {
                algo: "bde".into(),
                size_param: n,
                run_id: r as u64,
                hit_generation: hit,
            })
        })?);
    }
    Ok(rows)
}

/// Absorption times of the reduced neutral chains from `p = 1/2`.
pub fn eda_hitting(
    chain: NeutralChain,
    sizes: &[usize],
    runs: u64,
    seed: u64,
) -> Result<Vec<HittingRow>> {
    let algo = match chain {
        NeutralChain::Umda => Algorithm::UmdaNeutral,
        NeutralChain::Cga => Algorithm::CgaNeutral,
    };
    let mut rows = Vec::new();
    for &size in sizes {
        let budget = 1000 * (size * size) as u64;
        let master = derive_seed(seed, &format!("edahit_{}/{size}", chain.id()));
        rows.extend(try_par_map(runs as usize, |r| {
            let mut rng = RandomStream::for_run(master, r as u64);
            Ok(HittingRow {
                algo: algo.id().into(),
                size_param: size,
                run_id: r as u64,
                hit_generation: neutral_hitting_time(chain, size, 0.5, budget, &mut rng)?,
            })
        })?);
    }
    Ok(rows)
}

/// Empirical OneMax fitness gap of trial against target for independent
/// Bernoulli(0.6) strings, `D = 400`, `F = 0.2`, `C = 0.3`.
pub fn biased_init_gap(samples: u64, seed: u64) -> Result<FormulaCheckResult> {
    let (d, f, c, p) = (400, 0.2, 0.3, 0.6);
    let mut rng = RandomStream::new(derive_seed(seed, "biased_init_gap"));
    let stats = mc_trial_fitness_gap(d, f, c, p, samples, &mut rng)?;
    Ok(FormulaCheckResult::new(
        "expected_trial_fitness_gap",
        format!("D={d};F={f};C={c};p={p}"),
        expected_trial_fitness_gap(d, f, c, p)?,
        stats,
    ))
}

/// A Monte Carlo mean of a reachability quantity against its expectation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachStat {
    pub quantity: String,
    pub dim: usize,
    pub mean: f64,
    pub stderr: f64,
    pub expected: f64,
    pub n_samples: u64,
}

impl ReachStat {
    pub fn within(&self, k: f64) -> bool {
        (self.mean - self.expected).abs() <= k * self.stderr
    }
}

/// Means over random tuples of four uniform members: reachable-offspring
/// counts at each of `count_dims`, and forced mismatches against a uniform
/// target at `mismatch_dim`.
pub fn reach_stats(
    count_dims: &[usize],
    mismatch_dim: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<ReachStat>> {
    let mut out = Vec::new();
    for &d in count_dims {
        let mut rng = RandomStream::new(derive_seed(seed, &format!("reach/count/D{d}")));
        let mut m = Moments::default();
        for _ in 0..samples {
            let pop = sample_population(4, d, 0.5, &mut rng)?;
            m.push(tuple_reachable_count(&pop, 0, 1, 2, 3)? as f64);
        }
        out.push(reach_stat(
            "tuple_reachable_count",
            d,
            m.stats(),
            1.75f64.powi(d as i32),
        ));
    }
    let d = mismatch_dim;
    let mut rng = RandomStream::new(derive_seed(seed, &format!("reach/mismatch/D{d}")));
    let mut m = Moments::default();
    for _ in 0..samples {
        let pop = sample_population(4, d, 0.5, &mut rng)?;
        let target = sample_population(1, d, 0.5, &mut rng)?
            .into_members()
            .remove(0);
        m.push(forced_mismatch_count(&target, &pop, 0, 1, 2, 3)? as f64);
    }
    out.push(reach_stat(
        "forced_mismatch_count",
        d,
        m.stats(),
        d as f64 / 8.0,
    ));
    Ok(out)
}

fn reach_stat(quantity: &str, dim: usize, s: Stats, expected: f64) -> ReachStat {
    ReachStat {
        quantity: quantity.into(),
        dim,
        mean: s.mean,
        stderr: s.stderr,
        expected,
        n_samples: s.n,
    }
}

/// Exhaustive one-generation reachability of a seeded uniform population.
pub fn reach_demo(dim: usize, pop: usize, seed: u64) -> Result<(Population, ReachabilityReport)> {
    let mut rng = RandomStream::new(derive_seed(seed, "reach_demo"));
    let p = sample_population(pop, dim, 0.5, &mut rng)?;
    let report = reachability_report(&p)?;
    Ok((p, report))
}

/// One trap run. The run asserts property 𝒜 and the trial bound each
/// generation and records the largest counts seen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapRun {
    pub run_id: u64,
    pub status: Status,
    pub generations: u64,
    pub property_a_violations: u64,
    pub trial_bound_violations: u64,
    pub max_member_ones: usize,
    pub max_trial_ones: usize,
    pub optimum_found: bool,
}

/// Initial trap population: Bernoulli(0.1) genes, rejecting individuals with
/// at least `0.2D` ones.
pub fn trap_population(n: usize, dim: usize, rng: &mut RandomStream) -> Result<Population> {
    let members = (0..n)
        .map(|_| loop {
            let x =
                BitVector::from_bools(&(0..dim).map(|_| rng.bernoulli(0.1)).collect::<Vec<_>>());
            if 5 * x.count_ones() < dim {
                break x;
            }
        })
        .collect();
    Population::new(members)
}

pub fn trap_demo(
    dim: usize,
    n: usize,
    generations: u64,
    runs: u64,
    seed: u64,
) -> Result<Vec<TrapRun>> {
    let objective = Objective::new(ObjectiveKind::Trap, dim)?;
    let params = AlgorithmParams::bde(dim, n, 0.2, 0.3).with_max_generations(generations);
    let master = derive_seed(seed, "trap_demo");
    try_par_map(runs as usize, |r| {
        let mut rng = RandomStream::for_run(master, r as u64);
        let initial = trap_population(n, dim, &mut rng)?;
        let mut stats = TrapRun {
            run_id: r as u64,
            status: Status::GenerationLimit,
            generations: 0,
            property_a_violations: 0,
            trial_bound_violations: 0,
            max_member_ones: initial
                .members()
                .iter()
                .map(BitVector::count_ones)
                .max()
                .unwrap_or(0),
            max_trial_ones: 0,
            optimum_found: false,
        };
        let mut observe =
            |_g: u64, _parent: &Population, out: &crate::algorithms::GenerationOutcome| {
                for u in &out.trials {
                    let ones = u.count_ones();
                    stats.max_trial_ones = stats.max_trial_ones.max(ones);
                    if 5 * ones >= 4 * dim {
                        stats.trial_bound_violations += 1;
                    }
                }
                let next = &out.next_population;
                let widest = next
                    .members()
                    .iter()
                    .map(BitVector::count_ones)
                    .max()
                    .unwrap_or(0);
                stats.max_member_ones = stats.max_member_ones.max(widest);
                if 5 * widest >= dim {
                    stats.property_a_violations += 1;
                }
                if next
                    .members()
                    .iter()
                    .any(|x| trap_nonconverge(x) == dim as i64)
                {
                    stats.optimum_found = true;
                }
            };
        let options = RunOptions {
            initial_population: Some(initial),
            ..Default::default()
        };
        let rec = run_with(
            Algorithm::Bde,
            &objective,
            &params,
            &mut rng,
            options,
            &mut observe,
        )?;
        stats.status = rec.status;
        stats.generations = rec.generations;
        Ok(stats)
    })
}

/// Everything a canned reproduction computed.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Reproduction {
    pub id: String,
    pub scale: Scale,
    pub seed: u64,
    #[serde(skip)]
    pub summaries: Vec<ExperimentSummary>,
    pub hitting: Vec<HittingRow>,
    pub checks: Vec<FormulaCheckResult>,
    pub needle: Vec<NeedleRun>,
    pub trap: Vec<TrapRun>,
    pub reach: Vec<ReachStat>,
    pub reachability: Option<ReachabilityReport>,
    /// Short human-readable findings, one per line.
    pub notes: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Reproduction {
    fn new(id: &str, scale: Scale, seed: u64) -> Self {
        Reproduction {
            id: id.into(),
            scale,
            seed,
            ..Default::default()
        }
    }
}

fn summary_line(s: &ExperimentSummary) -> String {
    let c = s.status_counts;
    let rt = s
        .runtime
        .map(|r| format!("min {} mean {} max {}", r.min, r.mean, r.max))
        .unwrap_or_else(|| "no successful runs".into());
    format!(
        "{} {}: success {} frequency_zero {} generation_limit {} band_exit {}; {rt}",
        s.algorithm, s.objective, c.success, c.frequency_zero, c.generation_limit, c.band_exit
    )
}

fn write_summaries(rep: &mut Reproduction, out: &Path) -> Result<()> {
    let records: Vec<RunRecord> = rep
        .summaries
        .iter()
        .flat_map(|s| s.runs.iter().cloned())
        .collect();
    let runs = out.join("runs.csv");
    write_runs_csv(&runs, &records)?;
    rep.files.push(runs);
    for s in &rep.summaries {
        if let Some(q) = &s.quantiles {
            let p = out
                .join(s.experiment_id.replace('/', "_"))
                .join("freq_quantiles.csv");
            write_quantiles_csv(&p, &TRAJECTORY_QUANTILES, q)?;
            rep.files.push(p);
        }
    }
    Ok(())
}

/// Runs the canned experiment `id` and, when `out` is given, writes its data
/// files there.
pub fn reproduce(id: &str, scale: Scale, seed: u64, out: Option<&Path>) -> Result<Reproduction> {
    let mut rep = Reproduction::new(id, scale, seed);
    match id {
        "table1_lo" | "table2_bv" | "fig_neutral_quantiles" | "fig_bv_quantiles" => {
            let kind = if id.contains("lo") || id == "fig_neutral_quantiles" {
                ObjectiveKind::LeadingOnes
            } else {
                ObjectiveKind::BinaryValue
            };
            let trace = if id.starts_with("fig") {
                TraceMode::LastBit
            } else {
                TraceMode::None
            };
            let (d, n, runs) = runtime_table_shape(scale);
            rep.summaries = runtime_table(kind, d, n, runs, seed, trace)?;
        }
        "table3_onemax" => {
            let (d, sizes, runs) = table3_shape(scale);
            rep.summaries = onemax_status_table(d, &sizes, runs, seed)?;
        }
        "fig_om_scaling" => {
            let (dims, sizes, runs): (Vec<usize>, Vec<usize>, u64) = match scale {
                Scale::Desk => (vec![100, 200, 300, 400, 500], vec![100, 200], 5),
                Scale::Paper => (
                    (1..=33).map(|k| 100 * k).collect(),
                    vec![100, 200, 500],
                    100,
                ),
            };
            for &d in &dims {
                for &n in &sizes {
                    let params =
                        AlgorithmParams::bde(d, n, 0.2, 0.3).with_max_generations(50 * d as u64);
                    let cfg = ExperimentConfig::new(
                        &format!("om_scaling/D{d}/N{n}"),
                        Algorithm::Bde,
                        ObjectiveKind::OneMax,
                        params,
                        runs,
                        seed,
                    );
                    rep.summaries.push(run_experiment(&cfg)?);
                }
            }
        }
        "needle_stability" => {
            let (n, rows) = needle_stability(2000, 10, seed)?;
            let exits: u64 = rows.iter().map(|r| r.exits).sum();
            rep.notes.push(format!(
                "N = {n}, band exits over all runs, genes and generations: {exits}"
            ));
            rep.needle = rows;
        }
        "dominant_convergence" => {
            rep.hitting = dominant_convergence(50, &[64, 256, 1024], 20, 10_000, seed)?;
            let delta = dominant_delta(0.2, 0.3);
            for (n, mean, hits) in mean_hitting_times(&rep.hitting) {
                let bound = ((n as f64).ln() + 3.0) / delta;
                rep.notes.push(format!(
                    "N = {n}: mean {mean} over {hits} runs, (ln N + 3)/delta = {bound}"
                ));
            }
        }
        "edahit_umda" | "edahit_cga" => {
            let (chain, sizes): (NeutralChain, &[usize]) = if id == "edahit_umda" {
                (NeutralChain::Umda, &[32, 64, 128, 256])
            } else {
                (NeutralChain::Cga, &[16, 32, 64])
            };
            rep.hitting = eda_hitting(chain, sizes, 200, seed)?;
            for (s, mean, hits) in mean_hitting_times(&rep.hitting) {
                let norm = match chain {
                    NeutralChain::Umda => mean / s as f64,
                    NeutralChain::Cga => mean / (s * s) as f64,
                };
                rep.notes.push(format!(
                    "size {s}: mean {mean} over {hits} runs, normalised {norm}"
                ));
            }
        }
        "biased_init_gap" => {
            let check = biased_init_gap(100_000, seed)?;
            rep.notes.push(format!(
                "mean gap {} (stderr {}), expected {}",
                check.mc_estimate, check.mc_stderr, check.closed_form
            ));
            rep.checks.push(check);
        }
        "reach_demo" => {
            rep.reach = reach_stats(&[4, 8, 12], 16, 100_000, seed)?;
            let (_, report) = reach_demo(6, 4, seed)?;
            rep.notes.push(format!(
                "D = 6, N = 4: {} of {} strings reachable",
                report.reachable_count, report.search_space
            ));
            rep.reachability = Some(report);
        }
        "trap_demo" => {
            rep.trap = trap_demo(50, 20, 10_000, 5, seed)?;
            let found = rep.trap.iter().filter(|t| t.optimum_found).count();
            let viol: u64 = rep
                .trap
                .iter()
                .map(|t| t.property_a_violations + t.trial_bound_violations)
                .sum();
            rep.notes.push(format!(
                "optimum found in {found} runs, invariant violations {viol}"
            ));
        }
        other => {
            return Err(Error::UnknownExperiment {
                id: other.into(),
                known: EXPERIMENT_IDS.to_vec(),
            })
        }
    }
    for s in &rep.summaries {
        rep.notes.push(summary_line(s));
    }
    if let Some(out) = out {
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        if !rep.summaries.is_empty() {
            write_summaries(&mut rep, out)?;
        }
        if !rep.hitting.is_empty() {
            let p = out.join("hitting.csv");
            write_hitting_csv(&p, &rep.hitting)?;
            rep.files.push(p);
        }
        if !rep.checks.is_empty() {
            let p = out.join("theory_check.csv");
            write_theory_csv(&p, &rep.checks)?;
            rep.files.push(p);
        }
        if !rep.needle.is_empty() {
            let p = out.join("band_exits.csv");
            write_rows(
                &p,
                &[
                    "algo",
                    "run_id",
                    "status",
                    "generations",
                    "exits",
                    "first_exit",
                ],
                rep.needle.iter().map(|r| {
                    vec![
                        r.algo.clone(),
                        r.run_id.to_string(),
                        r.status.id().into(),
                        r.generations.to_string(),
                        r.exits.to_string(),
                        r.first_exit.map(|g| g.to_string()).unwrap_or_default(),
                    ]
                }),
            )?;
            rep.files.push(p);
        }
        if !rep.trap.is_empty() {
            let p = out.join("trap.csv");
            write_rows(
                &p,
                &[
                    "run_id",
                    "status",
                    "generations",
                    "property_a_violations",
                    "trial_bound_violations",
                    "max_member_ones",
                    "max_trial_ones",
                    "optimum_found",
                ],
                rep.trap.iter().map(|t| {
                    vec![
                        t.run_id.to_string(),
                        t.status.id().into(),
                        t.generations.to_string(),
                        t.property_a_violations.to_string(),
                        t.trial_bound_violations.to_string(),
                        t.max_member_ones.to_string(),
                        t.max_trial_ones.to_string(),
                        t.optimum_found.to_string(),
                    ]
                }),
            )?;
            rep.files.push(p);
        }
        if !rep.reach.is_empty() {
            let p = out.join("reach_stats.csv");
            write_rows(
                &p,
                &["quantity", "D", "mean", "stderr", "expected", "n_samples"],
                rep.reach.iter().map(|r| {
                    vec![
                        r.quantity.clone(),
                        r.dim.to_string(),
                        r.mean.to_string(),
                        r.stderr.to_string(),
                        r.expected.to_string(),
                        r.n_samples.to_string(),
                    ]
                }),
            )?;
            rep.files.push(p);
        }
        if let Some(r) = &rep.reachability {
            let p = out.join("reachability.json");
            write_json(&p, r)?;
            rep.files.push(p);
        }
        let p = out.join("summary.json");
        let summaries: Vec<ExperimentSummary> = rep
            .summaries
            .iter()
            .map(|s| {
                let mut s = s.without_traces();
                s.runs.clear();
                s.quantiles = None;
                s
            })
            .collect();
        write_json(
            &p,
            &serde_json::json!({ "reproduction": &rep, "summaries": summaries }),
        )?;
        rep.files.push(p);
    }
    Ok(rep)
}

/// Trial one-count of one selection-free BDE generation, used by examples
/// and the demo to sample the trial drift.
pub fn trial_ones_sample(
    pop: &Population,
    f: f64,
    c: f64,
    bit: usize,
    rng: &mut RandomStream,
) -> Result<usize> {
    let mut ones = 0;
    for i in 0..pop.size() {
        if bde_trial(pop, i, f, c, rng)?.get(bit) {
            ones += 1;
        }
    }
    Ok(ones)
}
