use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bde_lab::algorithms::{Algorithm, TraceMode};
use bde_lab::harness::{
    self, reproduce, run_experiment, write_json, write_theory_csv, ExperimentConfig, Outputs,
    Scale, DEFAULT_SEED,
};
use bde_lab::objectives::ObjectiveKind;
use bde_lab::params::AlgorithmParams;
use bde_lab::theory::{property_suite, run_checks, verification_grid};
use bde_lab::Result;

#[derive(Parser)]
#[command(
    name = "bde-lab",
    version,
    about = "Binary differential evolution and EDA experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one objective for a number of independent runs.
    Run(RunArgs),
    /// Re-run a canned experiment and write its data files.
    Reproduce {
        /// Experiment id, e.g. table1_lo or edahit_cga.
        id: String,
        #[arg(long, default_value = "desk")]
        scale: Scale,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check every closed form against its Monte Carlo oracle.
    VerifyTheory {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Count the strings reachable in one generation from a random population.
    Reachability {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        pop: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "bde")]
    algo: Algorithm,
    #[arg(long, default_value = "onemax")]
    objective: ObjectiveKind,
    #[arg(long, default_value_t = 100)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long = "scale-f", default_value_t = 0.2)]
    scale_f: f64,
    #[arg(long, default_value_t = 0.3)]
    cross: f64,
    #[arg(long, default_value_t = 50)]
    mu: usize,
    #[arg(long, default_value_t = 100)]
    lambda: usize,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long = "init-p", default_value_t = 0.5)]
    init_p: f64,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long = "max-gen", default_value_t = 2000)]
    max_gen: u64,
    #[arg(long, default_value = "none")]
    trace: TraceMode,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// JSON experiment config; when given, it replaces every other flag
    /// except --out.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> Result<(ExperimentConfig, PathBuf)> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => {
                let params = AlgorithmParams {
                    pop_size: self.pop,
                    dim: self.dim,
                    scale_factor: self.scale_f,
                    crossover_rate: self.cross,
                    mu: self.mu,
                    lambda: self.lambda,
                    k: self.k,
                    max_generations: self.max_gen,
                    init_p: self.init_p,
                };
                let id = format!("run/{}/{}", self.algo, self.objective);
                let mut cfg = ExperimentConfig::new(
                    &id,
                    self.algo,
                    self.objective,
                    params,
                    self.runs,
                    self.seed,
                );
                cfg.trace_bits = self.trace;
                cfg
            }
        };
        let out = self.out;
        let defaults = Outputs {
            runs_csv: Some(out.join("runs.csv")),
            quantiles_csv: (cfg.trace_bits != TraceMode::None)
                .then(|| out.join("freq_quantiles.csv")),
            summary_json: Some(out.join("summary.json")),
        };
        cfg.outputs = Outputs {
            runs_csv: cfg.outputs.runs_csv.or(defaults.runs_csv),
            quantiles_csv: cfg.outputs.quantiles_csv.or(defaults.quantiles_csv),
            summary_json: cfg.outputs.summary_json.or(defaults.summary_json),
        };
        Ok((cfg, out))
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run(args) => {
            let (cfg, _) = args.into_config()?;
            let s = run_experiment(&cfg)?;
            let c = s.status_counts;
            println!(
                "{} on {}: {} runs, success {}, frequency_zero {}, generation_limit {}, band_exit {}",
                s.algorithm,
                s.objective,
                s.runs.len(),
                c.success,
                c.frequency_zero,
                c.generation_limit,
                c.band_exit
            );
            if let Some(rt) = s.runtime {
                println!(
                    "generations over successful runs: min {} mean {} max {}",
                    rt.min, rt.mean, rt.max
                );
            }
            for p in [
                &cfg.outputs.runs_csv,
                &cfg.outputs.quantiles_csv,
                &cfg.outputs.summary_json,
            ]
            .into_iter()
            .flatten()
            {
                println!("wrote {}", p.display());
            }
        }
        Command::Reproduce {
            id,
            scale,
            seed,
            out,
        } => {
            let rep = reproduce(&id, scale, seed, Some(&out))?;
            for n in &rep.notes {
                println!("{n}");
            }
            for f in &rep.files {
                println!("wrote {}", f.display());
            }
        }
        Command::VerifyTheory { samples, seed, out } => {
            let results = run_checks(&verification_grid(), samples, seed)?;
            let path = out.join("theory_check.csv");
            write_theory_csv(&path, &results)?;
            let failed: Vec<_> = results.iter().filter(|r| !r.within_3_sigma).collect();
            println!(
                "{} of {} oracle checks within 3 standard errors",
                results.len() - failed.len(),
                results.len()
            );
            for r in &failed {
                println!(
                    "  outside: {} {} closed {} mc {} (z = {:.2})",
                    r.formula,
                    r.params,
                    r.closed_form,
                    r.mc_estimate,
                    r.z_score()
                );
            }
            let mut props_ok = true;
            for rep in property_suite() {
                println!(
                    "{}: {} points, {} violations",
                    rep.name,
                    rep.checked,
                    rep.violations.len()
                );
                props_ok &= rep.passed();
            }
            println!("wrote {}", path.display());
            if !failed.is_empty() || !props_ok {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Reachability {
            dim,
            pop,
            seed,
            out,
        } => {
            let (_, report) = harness::reach_demo(dim, pop, seed)?;
            let path = out.join("reachability.json");
            write_json(&path, &report)?;
            println!(
                "D = {}, N = {}: {} of {} strings reachable ({} tuples)",
                report.dim,
                report.pop_size,
                report.reachable_count,
                report.search_space,
                report.tuples
            );
            println!("wrote {}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
