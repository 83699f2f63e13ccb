//! `csl detect`: Monte-Carlo error rate of the ML subspace detector under
//! the Gaussian signal model, raw or compressed, with the closed-form bound.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;

use csl_core::numerics::{Matrix, RngState};
use csl_core::projection::{JlFamily, JlProjector};
use csl_core::subspace::affinity;
use csl_core::synth::{random_rotation, random_subspace};
use csl_core::tasks::{compress_bank, detect, detection_bound, SubspaceBank};
use csl_core::Subspace;

use crate::commands::{load_config, resolve_seed};
use crate::errors::{CliError, CliResult};
use crate::output::{value_of, ResultJson};

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BankKind {
    /// Mutually orthogonal subspaces carved from one random rotation.
    Orthogonal,
    /// Independent random subspaces.
    Random,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectConfig {
    pub ambient_dim: usize,
    pub dim: usize,
    pub num_subspaces: usize,
    pub bank: BankKind,
    pub trials: usize,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub family: Option<JlFamily>,
    #[serde(default)]
    pub target_dim: Option<usize>,
    pub seed: Option<u64>,
}

fn build_bank(config: &DetectConfig, seed: u64) -> CliResult<SubspaceBank<f64>> {
    let (n, d, l) = (config.ambient_dim, config.dim, config.num_subspaces);
    let subspaces: Vec<Subspace> = match config.bank {
        BankKind::Orthogonal => {
            if l * d > n {
                return Err(CliError::validation(
                    "bad-dims",
                    format!(
                        "orthogonal bank needs ambient_dim >= {} (= L * d), got {n}",
                        l * d
                    ),
                ));
            }
            let mut rng = RngState::derive(seed, &[0xBA7F]);
            let q = random_rotation::<f64>(n, &mut rng);
            (0..l)
                .map(|i| {
                    let mut m = Matrix::zeros(n, d);
                    for j in 0..d {
                        for r in 0..n {
                            m.set(r, j, q.get(r, i * d + j));
                        }
                    }
                    Subspace::new(m).map_err(CliError::from)
                })
                .collect::<CliResult<_>>()?
        }
        BankKind::Random => (0..l)
            .map(|i| {
                random_subspace::<f64>(n, d, RngState::derive(seed, &[0xBA7F, i as u64]).seed())
                    .map_err(CliError::from)
            })
            .collect::<CliResult<_>>()?,
    };
    SubspaceBank::new(subspaces).map_err(CliError::from)
}

pub fn run(config_path: &Path, seed_flag: Option<u64>) -> CliResult<()> {
    let config: DetectConfig = load_config(config_path)?;
    if config.trials == 0 {
        return Err(CliError::validation("bad-config", "trials must be >= 1"));
    }
    if config.family.is_some() != config.target_dim.is_some() {
        return Err(CliError::validation(
            "bad-config",
            "family and target_dim must be given together",
        ));
    }
    let mut result = ResultJson::new(
        "detect",
        serde_json::json!({
            "ambient_dim": config.ambient_dim,
            "dim": config.dim,
            "num_subspaces": config.num_subspaces,
            "bank": match config.bank { BankKind::Orthogonal => "orthogonal", BankKind::Random => "random" },
            "trials": config.trials,
            "noise_sigma": config.noise_sigma,
            "family": config.family.map(|f| f.name()),
            "target_dim": config.target_dim,
        }),
        0,
    );
    let seed = resolve_seed(seed_flag, config.seed, &mut result.warnings)?;
    result.seed = seed;

    let start = Instant::now();
    let bank = build_bank(&config, seed)?;
    // Worst-case pairwise affinity feeds the correct-probability bound;
    // the noise eigenvalue bound is sigma^2 for isotropic noise.
    let mut max_affinity = 0.0f64;
    for i in 0..bank.len() {
        for j in i + 1..bank.len() {
            max_affinity = max_affinity.max(affinity(&bank.subspaces()[i], &bank.subspaces()[j])?);
        }
    }
    let bound = detection_bound(
        max_affinity,
        config.noise_sigma * config.noise_sigma,
        config.dim,
        config.num_subspaces - 1,
    )?;
    result.timing("setup", start.elapsed().as_secs_f64() * 1e3);

    let projector = match (config.family, config.target_dim) {
        (Some(family), Some(n)) => Some(JlProjector::<f64>::new(
            family,
            config.ambient_dim,
            n,
            RngState::derive(seed, &[0x11F]).seed(),
        )?),
        _ => None,
    };
    let compressed_bank = match &projector {
        Some(p) => Some(compress_bank(&bank, p)?),
        None => None,
    };

    let start = Instant::now();
    let errors: usize = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngState::derive(seed, &[0xDE7, t]);
            let truth = rng.uniform_below(config.num_subspaces as u64) as usize;
            let scale = 1.0 / (config.dim as f64).sqrt();
            let coeffs: Vec<f64> = rng
                .gaussian_vec::<f64>(config.dim)
                .into_iter()
                .map(|g| g * scale)
                .collect();
            let mut x = bank.subspaces()[truth].basis().matvec(&coeffs);
            if config.noise_sigma > 0.0 {
                let noise_scale = config.noise_sigma / (config.dim as f64).sqrt();
                for xi in x.iter_mut() {
                    *xi += rng.gaussian() * noise_scale;
                }
            }
            let decided = match (&projector, &compressed_bank) {
                (Some(p), Some(cb)) => {
                    let y = p.project_vector(&x).expect("dimensions validated");
                    detect(cb, &y).expect("nonzero projected observation")
                }
                _ => detect(&bank, &x).expect("nonzero observation"),
            };
            usize::from(decided != truth)
        })
        .sum();
    result.timing("trials", start.elapsed().as_secs_f64() * 1e3);

    let error_rate = errors as f64 / config.trials as f64;
    result.metrics = serde_json::json!({
        "error_rate": error_rate,
        "correct_rate": 1.0 - error_rate,
        "trials": config.trials,
        "compressed": projector.is_some(),
        "max_pairwise_affinity": max_affinity,
        "bound": value_of(&bound)?,
    });
    result.print()
}
