//! One-generation steps and run drivers.

pub mod bde;
pub mod eda;
pub mod run;

pub use bde::{
    bde_generation, bde_mutant, bde_trial, binomial_crossover, draw_donors, generation,
    ibde_generation, ibde_trial, trial, GenerationOutcome, Variant, MIN_POPULATION,
};
pub use eda::{
    cga_generation, cga_neutral_step, cga_step, neutral_hitting_time, umda_generation,
    umda_neutral_step, umda_step, EdaOutcome, FrequencyState, NeutralChain,
};
pub use run::{
    run, run_with, Algorithm, Band, RunObserver, RunOptions, RunRecord, Status, TraceMode,
};
