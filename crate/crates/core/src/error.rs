use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("population size {size} is below the required minimum {min}")]
    PopulationTooSmall { size: usize, min: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("indices must be mutually distinct: {0:?}")]
    NonDistinctIndices(Vec<usize>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("empty input")]
    EmptyInput,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error(
        "unknown algorithm `{0}` (expected one of bde, ibde, umda, cga, umda_neutral, cga_neutral)"
    )]
    UnknownAlgorithm(String),

    #[error("unknown objective `{0}` (expected one of onemax, leadingones, binaryvalue, needle, dominant_onemax, trap)")]
    UnknownObjective(String),

    #[error("unknown experiment `{id}`; known ids: {}", known.join(", "))]
    UnknownExperiment {
        id: String,
        known: Vec<&'static str>,
    },

    #[error("algorithm `{algorithm}` cannot be combined with objective `{objective}`")]
    IncompatiblePair {
        algorithm: String,
        objective: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
