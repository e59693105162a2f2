//! Binary differential evolution (BDE), its independent-donor variant (iBDE),
//! and the univariate EDAs UMDA and cGA, together with the closed-form
//! single-bit drift formulas that describe them and the tooling to check
//! those formulas and reproduce runtime, stability and hitting-time
//! experiments.
//!
//! Module map:
//!
//! - [`bits`], [`population`], [`stream`], [`params`]: shared data types and
//!   the deterministic random-stream contract.
//! - [`objectives`]: pseudo-Boolean benchmark functions.
//! - [`algorithms`]: one-generation steps and run drivers.
//! - [`theory`]: closed forms and their Monte Carlo checks.
//! - [`analysis`]: frequency instrumentation, hitting times, quantiles and
//!   one-generation reachability.
//! - [`harness`]: experiment configuration, canned reproductions and file
//!   output.

pub mod algorithms;
pub mod analysis;
pub mod bits;
pub mod error;
pub mod harness;
pub mod objectives;
pub mod params;
pub mod population;
pub mod stream;
pub mod theory;

pub use crate::algorithms::{run, Algorithm, GenerationOutcome, RunRecord, Status};
pub use crate::bits::{hamming, BitVector};
pub use crate::error::{Error, Result};
pub use crate::objectives::{Fitness, Objective, ObjectiveKind};
pub use crate::params::AlgorithmParams;
pub use crate::population::{sample_population, Population};
pub use crate::stream::RandomStream;
