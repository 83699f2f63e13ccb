//! Compressed subspace learning toolkit.
//!
//! The crate provides the geometry of linear subspaces (canonical angles,
//! principal vectors, a catalog of subspace distances), Johnson-Lindenstrauss
//! random projectors including fast subsampled Hadamard/Fourier pipelines,
//! synthetic union-of-subspaces data, an empirical harness measuring how
//! random projection distorts angles and distances, and three downstream
//! tasks (angle-based visualization, active subspace detection, sparse
//! subspace clustering) runnable on raw or compressed data.
//!
//! Numerical kernels are generic over the scalar type via [`Real`]
//! (`f32`/`f64`); the concrete aliases below fix `f64`, which all stated
//! tolerances assume.

#![allow(clippy::needless_range_loop)]

pub mod capbench;
pub mod error;
pub mod numerics;
pub mod projection;
pub mod real;
pub mod subspace;
pub mod synth;
pub mod tasks;

pub use error::{Error, Result};
pub use real::Real;

/// `f64` matrix.
pub type Matrix = numerics::Matrix<f64>;
/// `f64` subspace.
pub type Subspace = subspace::Subspace<f64>;
/// `f64` canonical angle vector.
pub type CanonicalAngles = subspace::CanonicalAngles<f64>;
/// `f64` JL projector.
pub type JlProjector = projection::JlProjector<f64>;

/// `f32` matrix.
pub type Matrix32 = numerics::Matrix<f32>;
/// `f32` subspace.
pub type Subspace32 = subspace::Subspace<f32>;
