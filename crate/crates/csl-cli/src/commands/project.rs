//! `csl project`: compress every row of a dataset with one shared projector.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use csl_core::projection::JlProjector;
use csl_core::Matrix;

use crate::commands::{resolve_seed, FamilyArg};
use crate::errors::{CliError, CliResult};
use crate::io;
use crate::output::ResultJson;

#[allow(clippy::too_many_arguments)]
pub fn run(
    input: &Path,
    header: bool,
    family: FamilyArg,
    target_dim: usize,
    out: &Path,
    binary: bool,
    seed_flag: Option<u64>,
) -> CliResult<()> {
    if binary {
        return Err(CliError::validation(
            "binary-unsupported",
            "binary output is not implemented; remove --binary and use CSV",
        ));
    }
    let mut result = ResultJson::new(
        "project",
        serde_json::json!({
            "in": input.display().to_string(),
            "family": family.to_core().name(),
            "n": target_dim,
            "out": out.display().to_string(),
        }),
        0,
    );
    let seed = resolve_seed(seed_flag, None, &mut result.warnings)?;
    result.seed = seed;

    let start = Instant::now();
    let data = io::read_matrix(input, header)?;
    result.timing("load", start.elapsed().as_secs_f64() * 1e3);

    let projector = JlProjector::<f64>::new(family.to_core(), data.cols(), target_dim, seed)?;

    let start = Instant::now();
    let rows: Vec<Vec<f64>> = (0..data.rows())
        .into_par_iter()
        .map(|i| projector.project_vector(data.row(i)))
        .collect::<Result<_, _>>()?;
    let mut projected = Matrix::zeros(data.rows(), target_dim);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, value) in row.into_iter().enumerate() {
            projected.set(i, j, value);
        }
    }
    result.timing("project", start.elapsed().as_secs_f64() * 1e3);

    let start = Instant::now();
    io::write_matrix(out, &projected)?;
    result.timing("write", start.elapsed().as_secs_f64() * 1e3);

    result.metrics = serde_json::json!({
        "rows": projected.rows(),
        "input_dim": data.cols(),
        "target_dim": target_dim,
        "padded_dim": projector.padded_dim(),
        "family": family.to_core().name(),
    });
    result.print()
}
