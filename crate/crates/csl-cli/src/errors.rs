//! Error-to-exit-code policy and structured stderr reporting.

use csl_core::Error as CoreError;

/// Exit codes: 0 success, 2 input/validation error, 3 numerical degeneracy,
/// 4 internal invariant violation.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn validation(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            kind: "internal-invariant",
            message: message.into(),
        }
    }

    /// JSON error object written to stderr so harnesses can assert on
    /// failure modes.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "code": self.kind, "exit": self.code, "message": self.message }
        })
        .to_string()
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let (code, kind) = match &e {
            // Numerical degeneracies discovered during computation.
            CoreError::NoConvergence { .. } => (3, "no-convergence"),
            CoreError::NotSymmetric { .. } => (3, "not-symmetric"),
            CoreError::DegenerateSpectrum { .. } => (3, "degenerate-spectrum"),
            CoreError::NonPositiveEigenvalue { .. } => (3, "non-positive-eigenvalue"),
            CoreError::DimensionCollapsed => (3, "dimension-collapsed"),
            CoreError::DegenerateAtom { .. } => (3, "degenerate-atom"),
            CoreError::NotOrthonormal { .. } => (3, "not-orthonormal"),
            // Everything else is an input or configuration problem. A
            // rank-deficient matrix only reaches the CLI from a user-supplied
            // spanning set; the projection path reports DimensionCollapsed.
            CoreError::RankDeficient { .. } => (2, "rank-deficient"),
            CoreError::ShapeMismatch { .. } => (2, "shape-mismatch"),
            CoreError::NonFinite { .. } => (2, "non-finite"),
            CoreError::LengthNotPowerOfTwo { .. } => (2, "length-not-power-of-two"),
            CoreError::CountExceedsPopulation { .. } => (2, "count-exceeds-population"),
            CoreError::AmbientMismatch { .. } => (2, "ambient-mismatch"),
            CoreError::ZeroVector => (2, "zero-vector"),
            CoreError::UnequalDimUnsupported { .. } => (2, "unequal-dim-unsupported"),
            CoreError::BadDims { .. } => (2, "bad-dims"),
            CoreError::OddTargetDim { .. } => (2, "odd-target-dim"),
            CoreError::DimMismatch { .. } => (2, "dim-mismatch"),
            CoreError::TooLarge { .. } => (2, "too-large"),
            CoreError::AmbientTooSmall { .. } => (2, "ambient-too-small"),
            CoreError::BadConfig { .. } => (2, "bad-config"),
            CoreError::DegenerateInput { .. } => (2, "degenerate-input"),
            CoreError::InsufficientData { .. } => (2, "insufficient-data"),
            CoreError::MissingBasis { .. } => (2, "missing-basis"),
            CoreError::EmptyBank => (2, "empty-bank"),
            CoreError::BadAffinity { .. } => (2, "bad-affinity"),
            CoreError::BadClusterCount { .. } => (2, "bad-cluster-count"),
            CoreError::LengthMismatch { .. } => (2, "length-mismatch"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::validation("io", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::validation("json", e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
