use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("mesh format error in {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("mesh topology error: {0}")]
    Topology(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("singular evaluation: point at distance {distance:e} from a source")]
    SingularEvaluation { distance: f64 },

    #[error("source placement failed: {0}")]
    Placement(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate collocation system (numerical rank 0)")]
    DegenerateSystem,

    #[error("thrust basis is rank deficient: rank {rank} < 6 ({which})")]
    DegenerateThrustBasis { rank: usize, which: &'static str },

    #[error(
        "grand matrix is not positive definite: min eigenvalue {min_eigenvalue:e}, symmetry defect {symmetry_defect:e}"
    )]
    NotPositiveDefinite { min_eigenvalue: f64, symmetry_defect: f64 },

    #[error("singular block {0} in grand matrix")]
    SingularBlock(&'static str),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
