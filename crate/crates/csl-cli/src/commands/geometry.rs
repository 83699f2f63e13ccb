//! `csl angles` and `csl distance`: canonical angles and subspace distances
//! between two basis files.

use std::path::Path;

use clap::ValueEnum;

use csl_core::subspace::{affinity, canonical_angles, distance, DistanceKind};

use crate::errors::CliResult;
use crate::io;
use crate::output::ResultJson;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    ProjectionF,
    FubiniStudy,
    Grassmann,
    BinetCauchy,
    Procrustes,
    Asimov,
    Spectral,
    Projection,
}

impl KindArg {
    pub fn to_core(self) -> DistanceKind {
        match self {
            KindArg::ProjectionF => DistanceKind::ProjectionF,
            KindArg::FubiniStudy => DistanceKind::FubiniStudy,
            KindArg::Grassmann => DistanceKind::Grassmann,
            KindArg::BinetCauchy => DistanceKind::BinetCauchy,
            KindArg::Procrustes => DistanceKind::Procrustes,
            KindArg::Asimov => DistanceKind::Asimov,
            KindArg::Spectral => DistanceKind::Spectral,
            KindArg::Projection => DistanceKind::Projection,
        }
    }
}

pub fn run_angles(a_path: &Path, b_path: &Path, header: bool) -> CliResult<()> {
    let mut result = ResultJson::new(
        "angles",
        serde_json::json!({
            "a": a_path.display().to_string(),
            "b": b_path.display().to_string(),
        }),
        0,
    );
    let a = io::read_basis(a_path, header)?;
    let b = io::read_basis(b_path, header)?;
    let angles = canonical_angles(&a, &b)?;
    result.metrics = serde_json::json!({
        "angles_radians": angles.angles(),
        "sines": angles.sines(),
        "cosines": angles.cosines(),
        "affinity": affinity(&a, &b)?,
        "dims": [a.dim(), b.dim()],
        "ambient_dim": a.ambient_dim(),
    });
    result.print()
}

pub fn run_distance(a_path: &Path, b_path: &Path, kind: KindArg, header: bool) -> CliResult<()> {
    let mut result = ResultJson::new(
        "distance",
        serde_json::json!({
            "a": a_path.display().to_string(),
            "b": b_path.display().to_string(),
            "kind": kind.to_core().name(),
        }),
        0,
    );
    let a = io::read_basis(a_path, header)?;
    let b = io::read_basis(b_path, header)?;
    let value = distance(&a, &b, kind.to_core())?;
    let angles = canonical_angles(&a, &b)?;
    result.metrics = serde_json::json!({
        "distance": value,
        "kind": kind.to_core().name(),
        "angles_radians": angles.angles(),
        "dims": [a.dim(), b.dim()],
    });
    result.print()
}
