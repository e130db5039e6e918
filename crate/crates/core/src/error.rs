use std::path::PathBuf;

use thiserror::Error;

use crate::model::Boundary;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chain length {length} is below the minimum of {minimum} for {boundary} boundaries")]
    InvalidLength {
        length: usize,
        minimum: usize,
        boundary: Boundary,
    },

    #[error("the Z2 initial state needs an even chain length, got {0}")]
    OddLength(usize),

    #[error("{operation} is only defined for open boundaries")]
    UnsupportedBoundary { operation: &'static str },

    #[error(
        "near-defective spectrum: minimal left/right eigenvector overlap is {min_overlap:.3e}; \
         fall back to the scaling-and-squaring exponential"
    )]
    NearDefective { min_overlap: f64 },

    #[error(
        "biorthogonal expansion loses accuracy in the site basis (reconstruction residual \
         {residual:.3e}); fall back to the scaling-and-squaring exponential"
    )]
    IllConditioned { residual: f64 },

    #[error(
        "propagated orbitals are rank deficient: |R[{column},{column}]| = {magnitude:.3e}; \
         the nonunitary growth over- or underflowed at this dt"
    )]
    RankDeficient { column: usize, magnitude: f64 },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid subsystem: {0}")]
    InvalidSubsystem(String),

    #[error("subsystems overlap at site {0}")]
    OverlappingSubsystems(usize),

    #[error("similarity transform undefined: J_L * J_R = {product} is not positive")]
    GaugeUndefined { product: f64 },

    #[error("|gamma| = {0} >= 1 leaves the imaginary gauge undefined")]
    GammaOutOfRange(f64),

    #[error("the zero vector has no fractal dimension")]
    ZeroVector,

    #[error("non-positive value {value} at index {index}; logarithm undefined")]
    NonPositive { index: usize, value: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear algebra failure: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing input files: {}", .0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "))]
    MissingInputs(Vec<PathBuf>),

    #[error("malformed data in {}: {message}", path.display())]
    Malformed { path: PathBuf, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
