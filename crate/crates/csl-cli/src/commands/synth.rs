//! `csl synth`: generate a union-of-subspaces dataset.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;

use csl_core::synth::{generate_uos, UosSpec};

use crate::commands::{load_config, resolve_seed};
use crate::errors::CliResult;
use crate::io;
use crate::output::ResultJson;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub ambient_dim: usize,
    pub dims: Vec<usize>,
    pub points_per_subspace: usize,
    #[serde(default)]
    pub noise_sigma: f64,
    pub seed: Option<u64>,
}

pub fn run(
    config_path: &Path,
    out: &Path,
    labels_out: &Path,
    bases_out: Option<&str>,
    seed_flag: Option<u64>,
) -> CliResult<()> {
    let config: SynthConfig = load_config(config_path)?;
    let mut result = ResultJson::new("synth", serde_json::to_value(ConfigEcho::from(&config))?, 0);
    let seed = resolve_seed(seed_flag, config.seed, &mut result.warnings)?;
    result.seed = seed;

    let spec = UosSpec {
        ambient_dim: config.ambient_dim,
        dims: config.dims.clone(),
        points_per_subspace: config.points_per_subspace,
        noise_sigma: config.noise_sigma,
        seed,
    };
    let start = Instant::now();
    let dataset = generate_uos::<f64>(&spec)?;
    result.timing("generate", start.elapsed().as_secs_f64() * 1e3);

    let start = Instant::now();
    io::write_matrix(out, &dataset.data)?;
    io::write_labels(labels_out, &dataset.labels)?;
    if let Some(prefix) = bases_out {
        for (l, basis) in dataset.bases.iter().enumerate() {
            io::write_basis(&PathBuf::from(format!("{prefix}{l}.csv")), basis)?;
        }
    }
    result.timing("write", start.elapsed().as_secs_f64() * 1e3);

    result.metrics = serde_json::json!({
        "rows": dataset.data.rows(),
        "ambient_dim": dataset.data.cols(),
        "num_subspaces": dataset.bases.len(),
        "points_per_subspace": config.points_per_subspace,
        "noise_sigma": config.noise_sigma,
        "data_file": out.display().to_string(),
        "labels_file": labels_out.display().to_string(),
    });
    result.print()
}

/// Echo of the effective configuration (seed resolved separately).
#[derive(Debug, serde::Serialize)]
struct ConfigEcho {
    ambient_dim: usize,
    dims: Vec<usize>,
    points_per_subspace: usize,
    noise_sigma: f64,
}

impl From<&SynthConfig> for ConfigEcho {
    fn from(c: &SynthConfig) -> Self {
        Self {
            ambient_dim: c.ambient_dim,
            dims: c.dims.clone(),
            points_per_subspace: c.points_per_subspace,
            noise_sigma: c.noise_sigma,
        }
    }
}
