//! `csl visualize`: angle-based embedding of labeled data, raw or compressed,
//! with CSV coordinates and an optional SVG scatter.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Deserialize;

use csl_core::numerics::thin_svd;
use csl_core::projection::{JlFamily, JlProjector};
use csl_core::tasks::visualize;
use csl_core::Subspace;
use csl_core::{Error as CoreError, Matrix};

use crate::commands::{load_config, resolve_seed};
use crate::errors::{CliError, CliResult};
use crate::io::{self, fmt_f64};
use crate::output::ResultJson;
use crate::svg;

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VisualizeConfig {
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub out_dim: Option<usize>,
    pub seed: Option<u64>,
}

pub struct VisualizeArgs<'a> {
    pub data: &'a Path,
    pub labels: &'a Path,
    pub config: Option<&'a Path>,
    pub bases_prefix: Option<&'a str>,
    pub estimate_dim: Option<usize>,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub out_dim: Option<usize>,
    pub family: Option<JlFamily>,
    pub target_dim: Option<usize>,
    pub coords_out: &'a Path,
    pub svg_out: Option<&'a Path>,
    pub header: bool,
    pub seed_flag: Option<u64>,
}

/// Per-label bases estimated from the labeled rows: the top right-singular
/// vectors of each label's point block.
fn estimate_bases(data: &Matrix, labels: &[usize], dim: usize) -> CliResult<Vec<Subspace>> {
    let count = labels.iter().max().map_or(0, |&m| m + 1);
    let mut bases = Vec::with_capacity(count);
    for l in 0..count {
        let rows: Vec<usize> = (0..data.rows()).filter(|&i| labels[i] == l).collect();
        if rows.len() < dim {
            return Err(CliError::validation(
                "bad-dims",
                format!(
                    "label {l} has {} points, fewer than the estimate dimension {dim}",
                    rows.len()
                ),
            ));
        }
        let mut block = Matrix::zeros(rows.len(), data.cols());
        for (r, &i) in rows.iter().enumerate() {
            for c in 0..data.cols() {
                block.set(r, c, data.get(i, c));
            }
        }
        let svd = thin_svd(&block)?;
        bases.push(Subspace::new(svd.right.take_cols(dim))?);
    }
    Ok(bases)
}

pub fn run(args: VisualizeArgs<'_>) -> CliResult<()> {
    let config: VisualizeConfig = args
        .config
        .map(load_config)
        .transpose()?
        .unwrap_or_default();
    let u = args.u.or(config.u).unwrap_or(1.0);
    let v = args.v.or(config.v).unwrap_or(1.0);
    let out_dim = args.out_dim.or(config.out_dim).unwrap_or(2);
    if !(2..=3).contains(&out_dim) {
        return Err(CliError::validation("bad-config", "out_dim must be 2 or 3"));
    }
    if (args.family.is_some()) != (args.target_dim.is_some()) {
        return Err(CliError::validation(
            "bad-config",
            "--family and --n must be given together",
        ));
    }

    let mut result = ResultJson::new(
        "visualize",
        serde_json::json!({
            "data": args.data.display().to_string(),
            "labels": args.labels.display().to_string(),
            "u": u,
            "v": v,
            "out_dim": out_dim,
            "family": args.family.map(|f| f.name()),
            "n": args.target_dim,
        }),
        0,
    );
    let seed = resolve_seed(args.seed_flag, config.seed, &mut result.warnings)?;
    result.seed = seed;

    let start = Instant::now();
    let data = io::read_matrix(args.data, args.header)?;
    let labels = io::read_labels(args.labels)?;
    if labels.len() != data.rows() {
        return Err(CoreError::LengthMismatch {
            left: labels.len(),
            right: data.rows(),
        }
        .into());
    }
    let label_count = labels.iter().max().map_or(0, |&m| m + 1);
    let bases = match (args.bases_prefix, args.estimate_dim) {
        (Some(prefix), None) => io::read_bases(prefix, label_count, args.header)?,
        (None, Some(dim)) => estimate_bases(&data, &labels, dim)?,
        _ => {
            return Err(CliError::validation(
                "bad-config",
                "exactly one of --bases or --estimate-dim is required",
            ))
        }
    };
    result.timing("load", start.elapsed().as_secs_f64() * 1e3);

    let projector = match (args.family, args.target_dim) {
        (Some(family), Some(n)) => Some(JlProjector::<f64>::new(family, data.cols(), n, seed)?),
        _ => None,
    };

    let start = Instant::now();
    let embedding = visualize(&data, &labels, &bases, u, v, out_dim, projector.as_ref())?;
    result.timing("embed", start.elapsed().as_secs_f64() * 1e3);

    let start = Instant::now();
    let mut csv = String::from(if out_dim == 2 {
        "x,y,label\n"
    } else {
        "x,y,z,label\n"
    });
    for i in 0..embedding.coords.rows() {
        for j in 0..out_dim {
            let _ = write!(csv, "{},", fmt_f64(embedding.coords.get(i, j)));
        }
        let _ = writeln!(csv, "{}", labels[i]);
    }
    std::fs::write(args.coords_out, csv)?;
    if let Some(svg_path) = args.svg_out {
        let points: Vec<(f64, f64)> = (0..embedding.coords.rows())
            .map(|i| (embedding.coords.get(i, 0), embedding.coords.get(i, 1)))
            .collect();
        svg::write_scatter(svg_path, &points, &labels)?;
    }
    result.timing("write", start.elapsed().as_secs_f64() * 1e3);

    result.metrics = serde_json::json!({
        "rows": embedding.coords.rows(),
        "out_dim": out_dim,
        "eigenvalues": embedding.eigenvalues,
        "compressed": projector.is_some(),
        "coords_file": args.coords_out.display().to_string(),
    });
    result.print()
}
