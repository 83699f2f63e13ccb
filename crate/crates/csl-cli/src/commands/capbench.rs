//! `csl capbench`: run the projection-distortion experiment and report
//! per-dimension summaries, the decay fit, and optional constant estimates.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Deserialize;

use csl_core::capbench::{
    estimate_constants_at, fit_decay_slope, run_cap_experiment, CapExperimentConfig,
    DistortionReport, DEFAULT_C1_TARGET_EPS,
};
use csl_core::projection::JlFamily;

use crate::commands::{load_config, resolve_seed};
use crate::errors::CliResult;
use crate::io::fmt_f64;
use crate::output::{value_of, ResultJson};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapConfig {
    pub ambient_dim: usize,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub prescribed_angles: Option<Vec<f64>>,
    pub family: JlFamily,
    pub target_dims: Vec<usize>,
    pub trials: usize,
    pub seed: Option<u64>,
    /// Estimate the dimension and failure-rate constants from the report
    /// (needs >= 3 target dims and >= 200 trials).
    #[serde(default)]
    pub estimate_constants: bool,
    #[serde(default)]
    pub constants_target_eps: Option<f64>,
}

pub fn run(config_path: &Path, raw_csv: Option<&Path>, seed_flag: Option<u64>) -> CliResult<()> {
    let config: CapConfig = load_config(config_path)?;
    let mut result = ResultJson::new(
        "capbench",
        serde_json::json!({
            "ambient_dim": config.ambient_dim,
            "dims": config.dims,
            "prescribed_angles": config.prescribed_angles,
            "family": config.family.name(),
            "target_dims": config.target_dims,
            "trials": config.trials,
        }),
        0,
    );
    let seed = resolve_seed(seed_flag, config.seed, &mut result.warnings)?;
    result.seed = seed;

    let experiment = CapExperimentConfig {
        ambient_dim: config.ambient_dim,
        dims: config.dims.clone(),
        prescribed_angles: config.prescribed_angles.clone(),
        family: config.family,
        target_dims: config.target_dims.clone(),
        trials: config.trials,
        seed,
    };
    let start = Instant::now();
    let report = run_cap_experiment(&experiment)?;
    result.timing("experiment", start.elapsed().as_secs_f64() * 1e3);

    let collapsed: usize = report.summaries.iter().map(|s| s.collapsed_trials).sum();
    if collapsed > 0 {
        result.warnings.push(format!(
            "{collapsed} trials lost a subspace dimension and were skipped"
        ));
    }

    let medians: Vec<(usize, f64)> = report
        .summaries
        .iter()
        .map(|s| (s.target_dim, s.median_rel_angle))
        .collect();

    if let Some(path) = raw_csv {
        write_raw_csv(path, &report)?;
    }

    let mut metrics = serde_json::Map::new();
    metrics.insert("summaries".into(), value_of(&report.summaries)?);
    metrics.insert("records".into(), serde_json::json!(report.records.len()));
    match fit_decay_slope(&medians) {
        Ok(fit) => {
            metrics.insert("decay".into(), value_of(&fit)?);
        }
        Err(e) => result.warnings.push(format!("decay fit unavailable: {e}")),
    }
    if config.estimate_constants {
        let eps = config.constants_target_eps.unwrap_or(DEFAULT_C1_TARGET_EPS);
        match estimate_constants_at(&report, eps) {
            Ok(estimate) => {
                metrics.insert("constants".into(), value_of(&estimate)?);
            }
            Err(e) => result
                .warnings
                .push(format!("constant estimation unavailable: {e}")),
        }
    }
    result.metrics = serde_json::Value::Object(metrics);
    result.print()
}

fn write_raw_csv(path: &Path, report: &DistortionReport) -> CliResult<()> {
    let mut out = String::from("target_dim,trial,pair_i,pair_j,metric,k,original,projected\n");
    for r in &report.records {
        for (k, (&orig, &proj)) in r
            .original_angles
            .iter()
            .zip(&r.projected_angles)
            .enumerate()
        {
            let _ = writeln!(
                out,
                "{},{},{},{},angle,{},{},{}",
                r.target_dim,
                r.trial,
                r.pair.0,
                r.pair.1,
                k,
                fmt_f64(orig),
                fmt_f64(proj)
            );
        }
        let _ = writeln!(
            out,
            "{},{},{},{},affinity,,{},{}",
            r.target_dim,
            r.trial,
            r.pair.0,
            r.pair.1,
            fmt_f64(r.original_affinity),
            fmt_f64(r.projected_affinity)
        );
        for &(kind, orig, proj) in &r.distances {
            let _ = writeln!(
                out,
                "{},{},{},{},dist:{},,{},{}",
                r.target_dim,
                r.trial,
                r.pair.0,
                r.pair.1,
                kind.name(),
                fmt_f64(orig),
                fmt_f64(proj)
            );
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}
