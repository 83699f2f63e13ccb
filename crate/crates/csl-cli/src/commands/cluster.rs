//! `csl cluster`: sparse subspace clustering over one or more seeds, raw or
//! compressed, with per-phase timings.

use std::path::Path;
use std::time::Instant;

use serde::Deserialize;

use csl_core::numerics::RngState;
use csl_core::projection::{JlFamily, JlProjector};
use csl_core::tasks::{cluster, OmpParams};

use crate::commands::{load_config, resolve_seed};
use crate::errors::{CliError, CliResult};
use crate::io;
use crate::output::ResultJson;
use crate::svg;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterConfig {
    pub clusters: usize,
    /// OMP sparsity cap; set to the assumed subspace dimension.
    pub k_max: usize,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    pub seed: Option<u64>,
}

fn default_residual_tol() -> f64 {
    1e-6
}

pub struct ClusterArgs<'a> {
    pub data: &'a Path,
    pub labels: Option<&'a Path>,
    pub config: &'a Path,
    pub seeds: usize,
    pub family: Option<JlFamily>,
    pub target_dim: Option<usize>,
    pub labels_out: Option<&'a Path>,
    pub svg_out: Option<&'a Path>,
    pub header: bool,
    pub seed_flag: Option<u64>,
}

pub fn run(args: ClusterArgs<'_>) -> CliResult<()> {
    let config: ClusterConfig = load_config(args.config)?;
    if args.seeds == 0 {
        return Err(CliError::validation("bad-config", "--seeds must be >= 1"));
    }
    if args.family.is_some() != args.target_dim.is_some() {
        return Err(CliError::validation(
            "bad-config",
            "--family and --n must be given together",
        ));
    }
    let mut result = ResultJson::new(
        "cluster",
        serde_json::json!({
            "data": args.data.display().to_string(),
            "clusters": config.clusters,
            "k_max": config.k_max,
            "residual_tol": config.residual_tol,
            "seeds": args.seeds,
            "family": args.family.map(|f| f.name()),
            "n": args.target_dim,
        }),
        0,
    );
    let seed = resolve_seed(args.seed_flag, config.seed, &mut result.warnings)?;
    result.seed = seed;

    let start = Instant::now();
    let data = io::read_matrix(args.data, args.header)?;
    let truth = args.labels.map(io::read_labels).transpose()?;
    if let Some(t) = &truth {
        if t.len() != data.rows() {
            return Err(csl_core::Error::LengthMismatch {
                left: t.len(),
                right: data.rows(),
            }
            .into());
        }
    }
    result.timing("load", start.elapsed().as_secs_f64() * 1e3);

    let omp = OmpParams {
        k_max: config.k_max,
        residual_tol: config.residual_tol,
    };
    let mut error_rates: Vec<f64> = Vec::new();
    let mut exact_metric = true;
    let mut first_labels: Option<Vec<usize>> = None;
    let (mut project_ms, mut coefficients_ms, mut spectral_ms) = (0.0, 0.0, 0.0);

    for s in 0..args.seeds as u64 {
        let run_seed = RngState::derive(seed, &[0xC1, s]).seed();
        let projector = match (args.family, args.target_dim) {
            (Some(family), Some(n)) => Some(JlProjector::<f64>::new(
                family,
                data.cols(),
                n,
                RngState::derive(seed, &[0xC1F, s]).seed(),
            )?),
            _ => None,
        };
        let outcome = cluster(
            &data,
            config.clusters,
            truth.as_deref(),
            projector.as_ref(),
            omp,
            run_seed,
        )?;
        project_ms += outcome.timings.project_ms;
        coefficients_ms += outcome.timings.coefficients_ms;
        spectral_ms += outcome.timings.spectral_ms;
        if let Some(err) = outcome.error {
            error_rates.push(err.rate);
            exact_metric &= err.exact;
        }
        if first_labels.is_none() {
            first_labels = Some(outcome.labels);
        }
    }
    result.timing("project", project_ms);
    result.timing("coefficients", coefficients_ms);
    result.timing("spectral", spectral_ms);

    let labels = first_labels.expect("at least one seed ran");
    if let Some(path) = args.labels_out {
        io::write_labels(path, &labels)?;
    }
    if let Some(path) = args.svg_out {
        if data.cols() < 2 {
            return Err(CliError::validation(
                "bad-dims",
                "svg scatter needs at least 2 columns",
            ));
        }
        let points: Vec<(f64, f64)> = (0..data.rows())
            .map(|i| (data.get(i, 0), data.get(i, 1)))
            .collect();
        svg::write_scatter(path, &points, &labels)?;
    }

    let median = if error_rates.is_empty() {
        None
    } else {
        let mut sorted = error_rates.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = sorted.len() / 2;
        Some(if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        })
    };
    if !exact_metric {
        result.warnings.push(
            "clustering error used greedy label matching (more than 8 labels); value is approximate"
                .to_string(),
        );
    }

    let mut metrics = serde_json::Map::new();
    if let Some(median) = median {
        metrics.insert("error_rate".into(), serde_json::json!(median));
        metrics.insert(
            "per_seed_error_rates".into(),
            serde_json::json!(error_rates),
        );
    }
    metrics.insert("seeds".into(), serde_json::json!(args.seeds));
    metrics.insert("clusters".into(), serde_json::json!(config.clusters));
    metrics.insert("rows".into(), serde_json::json!(data.rows()));
    metrics.insert(
        "compressed".into(),
        serde_json::json!(args.family.is_some()),
    );
    result.metrics = serde_json::Value::Object(metrics);
    result.print()
}
