//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("matrix is rank deficient: effective rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },
    #[error("iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not symmetric (max asymmetry {max_asym})")]
    NotSymmetric { max_asym: f64 },
    #[error("length {len} is not a power of two")]
    LengthNotPowerOfTwo { len: usize },
    #[error("sample count {count} exceeds population {population}")]
    CountExceedsPopulation { count: usize, population: usize },

    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("distance kind {kind} is undefined for subspaces of unequal dimension")]
    UnequalDimUnsupported { kind: &'static str },
    #[error("basis columns are not orthonormal (deviation {deviation})")]
    NotOrthonormal { deviation: f64 },

    #[error("bad dimensions: {msg}")]
    BadDims { msg: String },
    #[error("fourier projector requires an even target dimension, got {n}")]
    OddTargetDim { n: usize },
    #[error("vector length {got} does not match projector ambient dimension {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("projected basis lost rank: subspace dimension collapsed under projection")]
    DimensionCollapsed,
    #[error("materialization refused: padded length {padded} exceeds limit {limit}")]
    TooLarge { padded: usize, limit: usize },

    #[error(
        "ambient dimension {ambient} too small for {dim} prescribed angles (needs >= {needed})"
    )]
    AmbientTooSmall {
        ambient: usize,
        dim: usize,
        needed: usize,
    },

    #[error("invalid experiment config: {msg}")]
    BadConfig { msg: String },
    #[error("degenerate input for slope fit: {msg}")]
    DegenerateInput { msg: String },
    #[error("insufficient data: {msg}")]
    InsufficientData { msg: String },

    #[error("no basis supplied for label {label}")]
    MissingBasis { label: usize },
    #[error("eigenvalue gap too small: lambda_{index} and lambda_{} nearly coincide", index + 1)]
    DegenerateSpectrum { index: usize },
    #[error("eigenvalue lambda_{index} is not positive; cannot embed in {out_dim} dimensions")]
    NonPositiveEigenvalue { index: usize, out_dim: usize },
    #[error("detection bank is empty")]
    EmptyBank,
    #[error("affinity {aff} out of range for dimension {dim} (requires 0 <= aff^2 <= d)")]
    BadAffinity { aff: f64, dim: usize },
    #[error("data point {index} has zero norm")]
    DegenerateAtom { index: usize },
    #[error("cluster count {clusters} invalid for {points} points")]
    BadClusterCount { clusters: usize, points: usize },
    #[error("label slices have different lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
