//! WebAssembly bindings for the bde-lab browser demo. Every export returns a
//! JSON document so the page can stay plain JavaScript.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use bde_lab::algorithms::{run, Algorithm, NeutralChain, TraceMode};
use bde_lab::harness::{eda_hitting, mean_hitting_times};
use bde_lab::theory::{dominant_flip_prob, mutant_one_prob, trial_ones_expectation};
use bde_lab::{AlgorithmParams, Error, Objective, ObjectiveKind, Result};

/// Relative drift curves `h(x) = H_N(Nx)/N`, `r(x) = R_N(x(N−1))` and
/// `s(x) = S_N(Nx)` on `points` evenly spaced `x ∈ [0, 1]`. `s` is `null`
/// below `x = 1/N`.
pub fn drift_curves_value(n: usize, f: f64, c: f64, points: usize) -> Result<Value> {
    if points < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let nf = n as f64;
    let mut xs = Vec::with_capacity(points);
    let (mut h, mut r, mut s) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..points {
        let x = k as f64 / (points - 1) as f64;
        xs.push(x);
        h.push(trial_ones_expectation(n, f, c, x * nf)? / nf);
        r.push(mutant_one_prob(n, f, x * (nf - 1.0))?);
        s.push(if x * nf >= 1.0 {
            Some(dominant_flip_prob(n, f, c, x * nf)?)
        } else {
            None
        });
    }
    Ok(json!({ "N": n, "F": f, "C": c, "x": xs, "h": h, "r": r, "s": s }))
}

/// Frequency of the last gene over one run on Needle, where every gene is
/// neutral until the optimum is sampled. `size` is N for BDE and iBDE, mu
/// for UMDA and K for cGA; the EDAs use their reduced neutral-gene chains.
pub fn neutral_trajectory_value(
    algo: &str,
    size: usize,
    dim: usize,
    f: f64,
    c: f64,
    generations: u64,
    seed: u64,
) -> Result<Value> {
    let requested: Algorithm = algo.parse()?;
    let algorithm = match requested {
        Algorithm::Umda => Algorithm::UmdaNeutral,
        Algorithm::Cga => Algorithm::CgaNeutral,
        other => other,
    };
    let params = AlgorithmParams {
        pop_size: size,
        dim,
        scale_factor: f,
        crossover_rate: c,
        mu: size,
        lambda: size,
        k: size,
        max_generations: generations,
        init_p: 0.5,
    };
    let objective = Objective::new(ObjectiveKind::Needle, dim)?;
    let rec = run(algorithm, &objective, &params, seed, TraceMode::LastBit)?;
    let trace = rec.trace.expect("traced run");
    let freq: Vec<f64> = trace
        .ones
        .iter()
        .map(|row| trace.frequency(row[0]))
        .collect();
    let min_all: Vec<f64> = trace
        .min_all_bits
        .iter()
        .map(|&m| trace.frequency(m))
        .collect();
    Ok(json!({
        "algo": requested.id(),
        "size": size,
        "status": rec.status.id(),
        "generations": rec.generations,
        "freq": freq,
        "min_all_bits": min_all,
    }))
}

/// Histogram of absorption times of a reduced neutral chain from `p = 1/2`.
pub fn hitting_histogram_value(
    chain: &str,
    size: usize,
    runs: u64,
    seed: u64,
    bins: usize,
) -> Result<Value> {
    let chain = match chain {
        "umda" => NeutralChain::Umda,
        "cga" => NeutralChain::Cga,
        other => return Err(Error::UnknownAlgorithm(other.into())),
    };
    if bins == 0 {
        return Err(Error::InvalidParameter("bins must be positive".into()));
    }
    let rows = eda_hitting(chain, &[size], runs, seed)?;
    let times: Vec<u64> = rows.iter().filter_map(|r| r.hit_generation).collect();
    let (_, mean, hits) = mean_hitting_times(&rows)[0];
    let max = times.iter().copied().max().unwrap_or(0);
    let width = (max / bins as u64 + 1).max(1);
    let mut counts = vec![0u64; bins];
    for &t in &times {
        counts[((t / width) as usize).min(bins - 1)] += 1;
    }
    let norm = match chain {
        NeutralChain::Umda => mean / size as f64,
        NeutralChain::Cga => mean / (size * size) as f64,
    };
    Ok(json!({
        "chain": chain.id(),
        "size": size,
        "runs": runs,
        "hits": hits,
        "mean": mean,
        "normalised_mean": norm,
        "bin_width": width,
        "counts": counts,
    }))
}

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string())
        .map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = driftCurves)]
pub fn drift_curves(
    n: usize,
    f: f64,
    c: f64,
    points: usize,
) -> std::result::Result<String, JsError> {
    to_js(drift_curves_value(n, f, c, points))
}

#[wasm_bindgen(js_name = neutralTrajectory)]
pub fn neutral_trajectory(
    algo: &str,
    size: usize,
    dim: usize,
    f: f64,
    c: f64,
    generations: u32,
    seed: u32,
) -> std::result::Result<String, JsError> {
    to_js(neutral_trajectory_value(
        algo,
        size,
        dim,
        f,
        c,
        u64::from(generations),
        u64::from(seed),
    ))
}

#[wasm_bindgen(js_name = hittingHistogram)]
pub fn hitting_histogram(
    chain: &str,
    size: usize,
    runs: u32,
    seed: u32,
    bins: usize,
) -> std::result::Result<String, JsError> {
    to_js(hitting_histogram_value(
        chain,
        size,
        u64::from(runs),
        u64::from(seed),
        bins,
    ))
}
