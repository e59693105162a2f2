//! Acceptance criteria. Each criterion prints one `PASS` or `FAIL` line; the
//! process exits non-zero when any criterion fails.
//!
//! `cargo test --test acceptance` runs the default set. Full-scale runtime
//! tables are opt-in: pass `-- --include-ignored` (or `--ignored` to run only
//! those). Any other free argument filters criteria by key substring.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;

use bde_lab::algorithms::TraceMode;
use bde_lab::algorithms::{cga_neutral_step, generation, umda_neutral_step, NeutralChain, Variant};
use bde_lab::analysis::{ordered_tuples, reachable_set_size};
use bde_lab::harness::{
    biased_init_gap, dominant_convergence, eda_hitting, mean_hitting_times, needle_stability,
    onemax_status_table, reach_demo, reach_stats, reproduce, runtime_table, trap_demo,
    ExperimentSummary, Scale, DEFAULT_SEED,
};
use bde_lab::stream::derive_seed;
use bde_lab::theory::{
    dominant_delta, onemax_gamma, property_suite, run_checks, verification_grid, Moments,
};
use bde_lab::{
    sample_population, BitVector, Objective, ObjectiveKind, Population, RandomStream, Status,
};

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

struct Criterion {
    key: &'static str,
    title: &'static str,
    opt_in: bool,
    check: fn() -> Verdict,
}

const SEED: u64 = DEFAULT_SEED;

fn c01_formula_oracles() -> Verdict {
    let results = run_checks(&verification_grid(), 1_000_000, SEED).expect("grid runs");
    let bad: Vec<_> = results.iter().filter(|r| !r.within_3_sigma).collect();
    let worst = results
        .iter()
        .map(|r| r.z_score().abs())
        .fold(0.0, f64::max);
    let mut detail = format!(
        "{} of {} checks within 3 SE at 1e6 samples, max |z| = {worst:.2}",
        results.len() - bad.len(),
        results.len()
    );
    for r in &bad {
        detail.push_str(&format!(
            "; outside: {} {} closed {:.6} mc {:.6} z {:.2}",
            r.formula,
            r.params,
            r.closed_form,
            r.mc_estimate,
            r.z_score()
        ));
    }
    Verdict::new(bad.is_empty(), detail)
}

fn c02_gamma() -> Verdict {
    let g = onemax_gamma(0.2, 0.3, 0.6).expect("valid rates");
    Verdict::new(
        (g - 7.62e-5).abs() <= 0.01e-5,
        format!("gamma(0.2, 0.3, 0.6) = {g:.6e}, target 7.62e-5 +- 1e-7"),
    )
}

fn mean_of(s: &ExperimentSummary) -> Option<f64> {
    s.runtime.map(|r| r.mean)
}

fn describe(s: &ExperimentSummary) -> String {
    let c = s.status_counts;
    match s.runtime {
        Some(r) => format!(
            "{} mean {:.2} (min {}, max {}, {} of {} succeeded)",
            s.algorithm,
            r.mean,
            r.min,
            r.max,
            c.success,
            s.runs.len()
        ),
        None => format!("{} no successful run", s.algorithm),
    }
}

fn desk_table(kind: ObjectiveKind, lo: f64, hi: f64) -> Verdict {
    let (d, n, runs) = (200, 200, 20);
    let rows = runtime_table(kind, d, n, runs, SEED, TraceMode::None).expect("table runs");
    let (lo, hi) = (lo * d as f64, hi * d as f64);
    let pass = rows
        .iter()
        .all(|s| mean_of(s).is_some_and(|m| (lo..=hi).contains(&m)));
    let parts: Vec<String> = rows.iter().map(describe).collect();
    Verdict::new(
        pass,
        format!(
            "D = N = 200, 20 runs: {}; target [{lo}, {hi}]",
            parts.join(", ")
        ),
    )
}

fn c03_leadingones_desk() -> Verdict {
    desk_table(ObjectiveKind::LeadingOnes, 2.0, 3.0)
}

fn c03_leadingones_full() -> Verdict {
    let rows = runtime_table(
        ObjectiveKind::LeadingOnes,
        1000,
        1000,
        100,
        SEED,
        TraceMode::None,
    )
    .expect("table runs");
    let (bde, ibde) = (mean_of(&rows[0]), mean_of(&rows[1]));
    let pass = match (bde, ibde) {
        (Some(b), Some(i)) => {
            (2300.0..=2500.0).contains(&b)
                && (2400.0..=2600.0).contains(&i)
                && (1.0..=1.10).contains(&(i / b))
        }
        _ => false,
    };
    Verdict::new(
        pass,
        format!(
            "D = N = 1000, 100 runs: {}, {}; targets bde [2300, 2500], ibde [2400, 2600], ratio [1.00, 1.10]",
            describe(&rows[0]),
            describe(&rows[1])
        ),
    )
}

fn c04_binaryvalue_desk() -> Verdict {
    desk_table(ObjectiveKind::BinaryValue, 1.0, 1.5)
}

fn c04_binaryvalue_full() -> Verdict {
    let rows = runtime_table(
        ObjectiveKind::BinaryValue,
        1000,
        1000,
        100,
        SEED,
        TraceMode::None,
    )
    .expect("table runs");
    let pass = mean_of(&rows[0]).is_some_and(|m| (1150.0..=1250.0).contains(&m));
    Verdict::new(
        pass,
        format!(
            "D = N = 1000, 100 runs: {}; target bde [1150, 1250]",
            describe(&rows[0])
        ),
    )
}

fn c05_onemax_statuses() -> Verdict {
    let sizes = [25, 100];
    let rows = onemax_status_table(500, &sizes, 100, SEED).expect("table runs");
    let mut pass = true;
    let mut parts = Vec::new();
    for s in &rows {
        let n = s.runs[0].params.pop_size;
        let want = if n == 25 {
            Status::FrequencyZero
        } else {
            Status::Success
        };
        // Run r of a 20-run experiment uses the same stream as run r of the
        // 100-run one, so the first 20 records are the 20-run variant.
        for runs in [100usize, 20] {
            let hits = s.runs[..runs].iter().filter(|r| r.status == want).count();
            pass &= hits == runs;
            parts.push(format!(
                "{} N={n} {runs} runs: {hits}x {}",
                s.algorithm,
                want.id()
            ));
        }
    }
    Verdict::new(pass, format!("D = 500, budget 2000: {}", parts.join(", ")))
}

fn c06_needle_band() -> Verdict {
    let (n, rows) = needle_stability(2000, 10, SEED).expect("needle runs");
    let mut by_algo: BTreeMap<&str, (u64, usize, Option<u64>)> = BTreeMap::new();
    for r in &rows {
        let e = by_algo.entry(r.algo.as_str()).or_insert((0, 0, None));
        e.0 += r.exits;
        e.1 += usize::from(r.exits > 0);
        if let Some(g) = r.first_exit {
            e.2 = Some(e.2.map_or(g, |x: u64| x.min(g)));
        }
    }
    let bde = by_algo.get("bde").copied().unwrap_or((0, 0, None));
    let parts: Vec<String> = by_algo
        .iter()
        .map(|(a, (exits, runs, first))| {
            format!(
                "{a}: {exits} out-of-band (gene, generation) pairs in {runs} of 10 runs, earliest at g = {}",
                first.map_or("none".into(), |g| g.to_string())
            )
        })
        .collect();
    Verdict::new(
        bde.0 == 0,
        format!(
            "N = {n}, band [{:.1}, {:.1}], 2000 generations: {}",
            0.4 * n as f64,
            0.6 * n as f64,
            parts.join("; ")
        ),
    )
}

fn c07_dominant_log() -> Verdict {
    let rows = dominant_convergence(50, &[64, 256, 1024], 20, 10_000, SEED).expect("runs");
    let delta = dominant_delta(0.2, 0.3);
    let means = mean_hitting_times(&rows);
    let mut pass = (delta - 0.04275).abs() < 1e-12;
    let mut parts = Vec::new();
    for &(n, mean, hits) in &means {
        let bound = ((n as f64).ln() + 3.0) / delta;
        pass &= hits == 20 && mean <= bound;
        parts.push(format!(
            "N = {n}: mean {mean:.2} over {hits} hits, bound {bound:.1}"
        ));
    }
    let ratio = means[2].1 / means[0].1;
    pass &= ratio <= 3.0;
    Verdict::new(
        pass,
        format!("{}; T(1024)/T(64) = {ratio:.3} <= 3", parts.join(", ")),
    )
}

fn spread(chain: NeutralChain, sizes: &[usize]) -> (bool, String) {
    let rows = eda_hitting(chain, sizes, 200, SEED).expect("runs");
    let norm: Vec<(usize, f64, usize)> = mean_hitting_times(&rows)
        .into_iter()
        .map(|(s, m, h)| {
            let unit = match chain {
                NeutralChain::Umda => s as f64,
                NeutralChain::Cga => (s * s) as f64,
            };
            (s, m / unit, h)
        })
        .collect();
    let max = norm.iter().map(|t| t.1).fold(f64::MIN, f64::max);
    let min = norm.iter().map(|t| t.1).fold(f64::MAX, f64::min);
    let all_hit = norm.iter().all(|t| t.2 == 200);
    let parts: Vec<String> = norm
        .iter()
        .map(|(s, v, _)| format!("{s}: {v:.3}"))
        .collect();
    (
        all_hit && max / min <= 1.5,
        format!(
            "{} normalised means {} (max/min {:.3})",
            chain.id(),
            parts.join(" "),
            max / min
        ),
    )
}

fn c08_eda_hitting() -> Verdict {
    let (a, da) = spread(NeutralChain::Umda, &[32, 64, 128, 256]);
    let (b, db) = spread(NeutralChain::Cga, &[16, 32, 64]);
    Verdict::new(a && b, format!("{da}; {db}; target max/min <= 1.5"))
}

/// Every trial a tuple can produce, by enumerating the mutation flips at the
/// positions where `r2` and `r3` differ and every crossover mask.
fn brute_force_reachable(pop: &Population) -> usize {
    let d = pop.dim();
    let mut seen = BTreeSet::new();
    for [i, a, b, c] in ordered_tuples(pop.size()) {
        let (x, base, u, v) = (pop.member(i), pop.member(a), pop.member(b), pop.member(c));
        let differ: Vec<usize> = (0..d).filter(|&j| u.get(j) != v.get(j)).collect();
        for flips in 0u32..(1 << differ.len()) {
            let mut mutant = base.clone();
            for (k, &j) in differ.iter().enumerate() {
                if flips >> k & 1 == 1 {
                    mutant.flip(j);
                }
            }
            for cross in 0u32..(1 << d) {
                let genes: Vec<bool> = (0..d)
                    .map(|j| {
                        if cross >> j & 1 == 1 {
                            mutant.get(j)
                        } else {
                            x.get(j)
                        }
                    })
                    .collect();
                seen.insert(genes);
            }
        }
    }
    seen.len()
}

fn c09_reachability() -> Verdict {
    let stats = reach_stats(&[4, 8, 12], 16, 100_000, SEED).expect("samples");
    let mut pass = true;
    let mut parts = Vec::new();
    for s in &stats {
        pass &= s.within(3.0);
        parts.push(format!(
            "{} D={}: {:.4} +- {:.4} vs {:.4}",
            s.quantity, s.dim, s.mean, s.stderr, s.expected
        ));
    }
    let (pop, report) = reach_demo(6, 4, SEED).expect("demo");
    let brute = brute_force_reachable(&pop);
    let direct = reachable_set_size(&pop).expect("small instance");
    pass &= report.reachable_count as usize == brute && direct as usize == brute;
    parts.push(format!(
        "D=6 N=4 reachable {} vs brute force {brute}",
        report.reachable_count
    ));
    Verdict::new(pass, parts.join("; "))
}

fn c10_trap() -> Verdict {
    let runs = trap_demo(50, 20, 10_000, 5, SEED).expect("runs");
    let a: u64 = runs.iter().map(|r| r.property_a_violations).sum();
    let t: u64 = runs.iter().map(|r| r.trial_bound_violations).sum();
    let found = runs.iter().filter(|r| r.optimum_found).count();
    let full = runs.iter().all(|r| r.generations == 10_000);
    let max_member = runs.iter().map(|r| r.max_member_ones).max().unwrap_or(0);
    let max_trial = runs.iter().map(|r| r.max_trial_ones).max().unwrap_or(0);
    Verdict::new(
        a == 0 && t == 0 && found == 0 && full,
        format!(
            "D=50 N=20, 5 seeds x 10^4 generations: property A violations {a}, trial bound violations {t}, optimum found {found}, max member ones {max_member} (< 10), max trial ones {max_trial} (< 40)"
        ),
    )
}

fn c11_biased_gap() -> Verdict {
    let check = biased_init_gap(100_000, SEED).expect("samples");
    let target = -2.304;
    let rel = (check.mc_estimate - target).abs() / target.abs();
    Verdict::new(
        rel <= 0.05 && (check.closed_form - target).abs() < 1e-9,
        format!(
            "mean gap {:.4} (se {:.4}) over 1e5 trials, closed form {:.4}, relative error {:.2}% <= 5%",
            check.mc_estimate,
            check.mc_stderr,
            check.closed_form,
            100.0 * rel
        ),
    )
}

/// Elitism, selection picks parent or trial, and converged genes stay put.
fn bde_invariants(
    variant: Variant,
    kind: ObjectiveKind,
    dim: usize,
    n: usize,
    p: f64,
    seeds: u64,
    gens: u64,
) -> Result<(), String> {
    let objective = Objective::new(kind, dim).map_err(|e| e.to_string())?;
    for s in 0..seeds {
        let mut rng = RandomStream::new(derive_seed(SEED, &format!("invariants/{kind}/{s}")));
        let mut pop = sample_population(n, dim, p, &mut rng).map_err(|e| e.to_string())?;
        pop.evaluate(&objective);
        for g in 0..gens {
            let out = generation(variant, &pop, &objective, 0.2, 0.3, &mut rng)
                .map_err(|e| e.to_string())?;
            let next = &out.next_population;
            let converged: Vec<(usize, bool)> = pop
                .converged_positions()
                .into_iter()
                .map(|j| (j, pop.member(0).get(j)))
                .collect();
            for i in 0..n {
                let (x, y) = (pop.member(i), next.member(i));
                if objective.evaluate(y) < objective.evaluate(x) {
                    return Err(format!("{kind} seed {s} g {g}: member {i} lost fitness"));
                }
                if y != x && y != &out.trials[i] {
                    return Err(format!(
                        "{kind} seed {s} g {g}: member {i} is neither parent nor trial"
                    ));
                }
                if let Some(&(j, _)) = converged.iter().find(|&&(j, v)| y.get(j) != v) {
                    return Err(format!(
                        "{kind} seed {s} g {g}: converged gene {j} changed in member {i}"
                    ));
                }
            }
            pop = out.next_population;
        }
    }
    Ok(())
}

/// Under LeadingOnes, no member's prefix of ones shrinks and no trial falls
/// below the prefix shared by the whole population.
fn locked_prefix(dim: usize, n: usize, seeds: u64, gens: u64) -> Result<(), String> {
    let objective = Objective::new(ObjectiveKind::LeadingOnes, dim).map_err(|e| e.to_string())?;
    for s in 0..seeds {
        let mut rng = RandomStream::new(derive_seed(SEED, &format!("locked/{dim}/{s}")));
        let mut pop = sample_population(n, dim, 0.5, &mut rng).map_err(|e| e.to_string())?;
        pop.evaluate(&objective);
        for g in 0..gens {
            let shared = pop
                .members()
                .iter()
                .map(BitVector::leading_ones)
                .min()
                .unwrap_or(0);
            let out = generation(Variant::Original, &pop, &objective, 0.2, 0.3, &mut rng)
                .map_err(|e| e.to_string())?;
            for i in 0..n {
                if out.next_population.member(i).leading_ones() < pop.member(i).leading_ones() {
                    return Err(format!("D={dim} seed {s} g {g}: member {i} prefix shrank"));
                }
                if out.trials[i].leading_ones() < shared {
                    return Err(format!(
                        "D={dim} seed {s} g {g}: trial {i} broke the locked prefix {shared}"
                    ));
                }
            }
            pop = out.next_population;
        }
    }
    Ok(())
}

/// Mean one-step increment of a reduced chain against zero.
fn balance(chain: NeutralChain, size: usize, p: f64, steps: u64) -> (f64, f64) {
    let mut rng = RandomStream::new(derive_seed(
        SEED,
        &format!("balance/{}/{size}/{p}", chain.id()),
    ));
    let mut m = Moments::default();
    for _ in 0..steps {
        let next = match chain {
            NeutralChain::Umda => umda_neutral_step(p, size, &mut rng),
            NeutralChain::Cga => cga_neutral_step(p, size, &mut rng),
        }
        .expect("valid state");
        m.push(next - p);
    }
    let s = m.stats();
    (s.mean, s.stderr)
}

fn c12_invariants() -> Verdict {
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    let mut cases = 0;
    for variant in [Variant::Original, Variant::Independent] {
        for (kind, dim, p) in [
            (ObjectiveKind::OneMax, 30, 0.5),
            (ObjectiveKind::OneMax, 30, 0.9),
            (ObjectiveKind::LeadingOnes, 30, 0.7),
            (ObjectiveKind::BinaryValue, 40, 0.5),
            (ObjectiveKind::BinaryValue, 100, 0.5),
            (ObjectiveKind::Needle, 12, 0.8),
            (ObjectiveKind::DominantOneMax, 30, 0.5),
            (ObjectiveKind::Trap, 30, 0.1),
        ] {
            cases += 1;
            if let Err(e) = bde_invariants(variant, kind, dim, 8, p, 5, 200) {
                failures.push(format!("{variant:?} {e}"));
            }
        }
    }
    parts.push(format!(
        "elitism and converged genes: {cases} configurations x 5 seeds x 200 generations"
    ));
    for (dim, n, seeds, gens) in [(3, 4, 10, 1000), (30, 20, 5, 300)] {
        if let Err(e) = locked_prefix(dim, n, seeds, gens) {
            failures.push(e);
        }
    }
    parts.push("locked prefix: D=3 N=4 10x1000 and D=30 N=20 5x300 generations".into());
    let mut worst = 0.0f64;
    for chain in [NeutralChain::Umda, NeutralChain::Cga] {
        for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let (mean, se) = balance(chain, 50, p, 1_000_000);
            let z = if se > 0.0 { mean / se } else { 0.0 };
            worst = worst.max(z.abs());
            if mean.abs() > 3.0 * se {
                failures.push(format!(
                    "{} p={p}: drift {mean:.3e} (se {se:.3e})",
                    chain.id()
                ));
            }
        }
    }
    parts.push(format!(
        "balance at size 50, 1e6 steps, p in 0.1..0.9: max |z| {worst:.2}"
    ));
    for rep in property_suite() {
        if !rep.passed() {
            failures.push(format!(
                "{}: {} of {} points violated",
                rep.name,
                rep.violations.len(),
                rep.checked
            ));
        }
        parts.push(format!("{} ({} points)", rep.name, rep.checked));
    }
    if !failures.is_empty() {
        parts.push(format!("failures: {}", failures.join("; ")));
    }
    Verdict::new(failures.is_empty(), parts.join("; "))
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).expect("readable dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let rel = path
                    .strip_prefix(dir)
                    .expect("nested")
                    .display()
                    .to_string();
                out.insert(rel, fs::read(&path).expect("readable file"));
            }
        }
    }
    out
}

fn c13_determinism() -> Verdict {
    let ids = [
        "table3_onemax",
        "fig_bv_quantiles",
        "needle_stability",
        "dominant_convergence",
        "edahit_umda",
        "edahit_cga",
        "biased_init_gap",
        "reach_demo",
        "trap_demo",
    ];
    let mut mismatched = Vec::new();
    let mut files = 0;
    for id in ids {
        let (a, b) = (
            tempfile::tempdir().expect("tempdir"),
            tempfile::tempdir().expect("tempdir"),
        );
        reproduce(id, Scale::Desk, SEED, Some(a.path())).expect("first run");
        reproduce(id, Scale::Desk, SEED, Some(b.path())).expect("second run");
        let (fa, fb) = (csv_files(a.path()), csv_files(b.path()));
        files += fa.len();
        if fa.is_empty() || fa != fb {
            mismatched.push(id);
        }
    }
    Verdict::new(
        mismatched.is_empty(),
        format!(
            "{} experiments, {files} CSV files compared byte for byte; differing: {}",
            ids.len(),
            if mismatched.is_empty() {
                "none".into()
            } else {
                mismatched.join(", ")
            }
        ),
    )
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        key: "c01_formula_oracles",
        title: "formula-oracle agreement",
        opt_in: false,
        check: c01_formula_oracles,
    },
    Criterion {
        key: "c02_gamma",
        title: "gamma constant",
        opt_in: false,
        check: c02_gamma,
    },
    Criterion {
        key: "c03_leadingones_desk",
        title: "LeadingOnes runtime, desk scale",
        opt_in: false,
        check: c03_leadingones_desk,
    },
    Criterion {
        key: "c03_leadingones_full",
        title: "LeadingOnes runtime, full scale",
        opt_in: true,
        check: c03_leadingones_full,
    },
    Criterion {
        key: "c04_binaryvalue_desk",
        title: "BinaryValue runtime, desk scale",
        opt_in: false,
        check: c04_binaryvalue_desk,
    },
    Criterion {
        key: "c04_binaryvalue_full",
        title: "BinaryValue runtime, full scale",
        opt_in: true,
        check: c04_binaryvalue_full,
    },
    Criterion {
        key: "c05_onemax_statuses",
        title: "OneMax success statuses",
        opt_in: false,
        check: c05_onemax_statuses,
    },
    Criterion {
        key: "c06_needle_band",
        title: "Needle stability band",
        opt_in: false,
        check: c06_needle_band,
    },
    Criterion {
        key: "c07_dominant_log",
        title: "dominant-gene logarithmic convergence",
        opt_in: false,
        check: c07_dominant_log,
    },
    Criterion {
        key: "c08_eda_hitting",
        title: "UMDA and cGA hitting-time scaling",
        opt_in: false,
        check: c08_eda_hitting,
    },
    Criterion {
        key: "c09_reachability",
        title: "reachability combinatorics",
        opt_in: false,
        check: c09_reachability,
    },
    Criterion {
        key: "c10_trap",
        title: "non-convergence trap",
        opt_in: false,
        check: c10_trap,
    },
    Criterion {
        key: "c11_biased_gap",
        title: "biased-initialisation fitness gap",
        opt_in: false,
        check: c11_biased_gap,
    },
    Criterion {
        key: "c12_invariants",
        title: "invariant suites",
        opt_in: false,
        check: c12_invariants,
    },
    Criterion {
        key: "c13_determinism",
        title: "determinism",
        opt_in: false,
        check: c13_determinism,
    },
];

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let only_ignored = args.iter().any(|a| a == "--ignored");
    let with_ignored = only_ignored || args.iter().any(|a| a == "--include-ignored");
    if args.iter().any(|a| a == "--list") {
        for c in CRITERIA {
            println!("{}: test", c.key);
        }
        return ExitCode::SUCCESS;
    }
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    let mut ran = 0;
    for c in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| c.key.contains(f.as_str())) {
            continue;
        }
        if (c.opt_in && !with_ignored) || (!c.opt_in && only_ignored) {
            if c.opt_in && !only_ignored {
                println!(
                    "SKIP {}: {} (opt-in, pass --include-ignored)",
                    c.key, c.title
                );
            }
            continue;
        }
        ran += 1;
        let verdict = panic::catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Verdict::new(false, format!("panicked: {msg}"))
        });
        if !verdict.pass {
            failed += 1;
        }
        println!(
            "{} {}: {}: {}",
            if verdict.pass { "PASS" } else { "FAIL" },
            c.key,
            c.title,
            verdict.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
