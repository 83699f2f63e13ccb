//! Subcommand implementations.

pub mod capbench;
pub mod cluster;
pub mod detect;
pub mod geometry;
pub mod project;
pub mod synth;
pub mod visualize;

use clap::ValueEnum;
use csl_core::projection::JlFamily;

use crate::errors::{CliError, CliResult};

/// Projector families exposed on the command line.
#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Rademacher,
    Hadamard,
    Fourier,
}

impl FamilyArg {
    pub fn to_core(self) -> JlFamily {
        match self {
            FamilyArg::Gaussian => JlFamily::Gaussian,
            FamilyArg::Rademacher => JlFamily::Rademacher,
            FamilyArg::Hadamard => JlFamily::SubsampledHadamard,
            FamilyArg::Fourier => JlFamily::SubsampledFourier,
        }
    }
}

/// Seed precedence: explicit flag, then config file, then the CSL_SEED
/// environment variable, then 0 with a warning.
pub fn resolve_seed(
    flag: Option<u64>,
    config_seed: Option<u64>,
    warnings: &mut Vec<String>,
) -> CliResult<u64> {
    if let Some(seed) = flag.or(config_seed) {
        return Ok(seed);
    }
    match std::env::var("CSL_SEED") {
        Ok(text) => text.parse().map_err(|_| {
            CliError::validation(
                "bad-seed",
                format!("CSL_SEED is not a 64-bit integer: {text:?}"),
            )
        }),
        Err(_) => {
            warnings.push("no --seed, config seed, or CSL_SEED; defaulting to seed 0".to_string());
            Ok(0)
        }
    }
}

/// Parses a JSON config file, rejecting unknown keys.
pub fn load_config<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation("io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation("config-parse", format!("{}: {e}", path.display())))
}
