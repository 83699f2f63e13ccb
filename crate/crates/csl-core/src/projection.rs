//! Johnson-Lindenstrauss random projectors and subspace compression.
//!
//! Four families share one interface: dense Gaussian and Rademacher matrices,
//! and two fast structured pipelines (subsampled Hadamard and subsampled
//! Fourier) that run in O(N log N) per vector. All families are calibrated so
//! that E|Phi x|^2 = |x|^2; scaling constants live inside the projector so
//! downstream code treats every family identically.
//!
//! Inputs whose length is not a power of two are zero-padded before sign
//! randomization in the fast families; zero-padding is an isometry, so angles
//! and distances are unaffected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{dft, fwht, orthonormalize, Matrix, RngState};
use crate::real::{cst, Real};
use crate::subspace::Subspace;

/// Largest padded length `materialize` will expand into a dense matrix.
pub const MATERIALIZE_LIMIT: usize = 4096;

/// Projector family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JlFamily {
    /// Dense i.i.d. N(0, 1/n) entries.
    Gaussian,
    /// Dense i.i.d. +-1/sqrt(n) entries.
    Rademacher,
    /// Sign randomization, fast Walsh-Hadamard transform, uniform row
    /// sampling, rescaling.
    #[serde(rename = "hadamard")]
    SubsampledHadamard,
    /// Sign randomization, normalized DFT, uniform frequency sampling with
    /// real/imaginary stacking, rescaling.
    ///
    /// The real-valued output takes sqrt(2) * Re and sqrt(2) * Im of n/2
    /// sampled coefficients; DC and Nyquist frequencies are excluded because
    /// their coefficients are purely real and would break the per-frequency
    /// energy bookkeeping. This stacking is one valid realization of a
    /// partial-Fourier projector for real-valued downstream algorithms.
    #[serde(rename = "fourier")]
    SubsampledFourier,
    /// Deterministic coordinate restriction [I_n | 0]; a zero-distortion
    /// fixture for tests.
    #[cfg(feature = "testing")]
    Restriction,
}

impl JlFamily {
    pub fn name(&self) -> &'static str {
        match self {
            JlFamily::Gaussian => "gaussian",
            JlFamily::Rademacher => "rademacher",
            JlFamily::SubsampledHadamard => "hadamard",
            JlFamily::SubsampledFourier => "fourier",
            #[cfg(feature = "testing")]
            JlFamily::Restriction => "restriction",
        }
    }
}

#[derive(Debug, Clone)]
enum ProjectorState<T> {
    Dense(Matrix<T>),
    Hadamard {
        signs: Vec<T>,
        rows: Vec<usize>,
    },
    Fourier {
        signs: Vec<T>,
        freqs: Vec<usize>,
    },
    #[cfg(feature = "testing")]
    Restriction,
}

/// A seedable linear map R^N -> R^n.
#[derive(Debug, Clone)]
pub struct JlProjector<T> {
    family: JlFamily,
    ambient_dim: usize,
    target_dim: usize,
    padded_dim: usize,
    seed: u64,
    state: ProjectorState<T>,
}

impl<T: Real> JlProjector<T> {
    /// Builds a projector of the given family mapping R^N to R^n.
    pub fn new(family: JlFamily, ambient_dim: usize, target_dim: usize, seed: u64) -> Result<Self> {
        if target_dim == 0 || target_dim >= ambient_dim {
            return Err(Error::BadDims {
                msg: format!(
                    "target dimension {target_dim} must satisfy 1 <= n < N = {ambient_dim}"
                ),
            });
        }
        let padded_dim = match family {
            JlFamily::SubsampledHadamard | JlFamily::SubsampledFourier => {
                ambient_dim.next_power_of_two()
            }
            _ => ambient_dim,
        };
        let mut rng = RngState::new(seed);
        let state = match family {
            JlFamily::Gaussian => {
                let scale = T::one() / cst::<T>(target_dim as f64).sqrt();
                let entries: Vec<T> = (0..target_dim * ambient_dim)
                    .map(|_| T::from_f64(rng.gaussian()).unwrap() * scale)
                    .collect();
                ProjectorState::Dense(Matrix::from_raw(target_dim, ambient_dim, entries))
            }
            JlFamily::Rademacher => {
                let scale = T::one() / cst::<T>(target_dim as f64).sqrt();
                let entries: Vec<T> = rng
                    .rademacher_vec::<T>(target_dim * ambient_dim)
                    .into_iter()
                    .map(|s| s * scale)
                    .collect();
                ProjectorState::Dense(Matrix::from_raw(target_dim, ambient_dim, entries))
            }
            JlFamily::SubsampledHadamard => {
                let signs = rng.rademacher_vec(padded_dim);
                let rows = rng.sample_without_replacement(padded_dim, target_dim)?;
                ProjectorState::Hadamard { signs, rows }
            }
            JlFamily::SubsampledFourier => {
                if !target_dim.is_multiple_of(2) {
                    return Err(Error::OddTargetDim { n: target_dim });
                }
                let signs = rng.rademacher_vec(padded_dim);
                // Frequencies 1..padded/2-1: DC and Nyquist excluded.
                let population = padded_dim / 2 - 1;
                let freqs = rng
                    .sample_without_replacement(population, target_dim / 2)?
                    .into_iter()
                    .map(|f| f + 1)
                    .collect();
                ProjectorState::Fourier { signs, freqs }
            }
            #[cfg(feature = "testing")]
            JlFamily::Restriction => ProjectorState::Restriction,
        };
        Ok(Self {
            family,
            ambient_dim,
            target_dim,
            padded_dim,
            seed,
            state,
        })
    }

    pub fn family(&self) -> JlFamily {
        self.family
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn padded_dim(&self) -> usize {
        self.padded_dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn padded_signed(&self, x: &[T], signs: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.padded_dim];
        for (i, (&xi, &si)) in x.iter().zip(signs).enumerate() {
            y[i] = xi * si;
        }
        y
    }

    /// Applies the projector to a vector of length N.
    pub fn project_vector(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.ambient_dim {
            return Err(Error::DimMismatch {
                expected: self.ambient_dim,
                got: x.len(),
            });
        }
        let n = self.target_dim;
        match &self.state {
            ProjectorState::Dense(m) => Ok(m.matvec(x)),
            ProjectorState::Hadamard { signs, rows } => {
                let y = self.padded_signed(x, signs);
                let transformed = fwht(&y).expect("padded length is a power of two");
                let scale = (cst::<T>(self.padded_dim as f64) / cst::<T>(n as f64)).sqrt();
                Ok(rows.iter().map(|&r| transformed[r] * scale).collect())
            }
            ProjectorState::Fourier { signs, freqs } => {
                let y = self.padded_signed(x, signs);
                let spectrum = dft(&y).expect("padded length is a power of two");
                let scale = (cst::<T>(self.padded_dim as f64) / cst::<T>(n as f64)).sqrt()
                    * cst::<T>(2.0).sqrt();
                let mut out = vec![T::zero(); n];
                for (k, &f) in freqs.iter().enumerate() {
                    out[k] = spectrum[f].re * scale;
                    out[n / 2 + k] = spectrum[f].im * scale;
                }
                Ok(out)
            }
            #[cfg(feature = "testing")]
            ProjectorState::Restriction => Ok(x[..n].to_vec()),
        }
    }

    /// Projects every row of an M x N matrix, sharing this projector.
    pub fn project_rows(&self, data: &Matrix<T>) -> Result<Matrix<T>> {
        let mut out = Matrix::zeros(data.rows(), self.target_dim);
        for i in 0..data.rows() {
            let y = self.project_vector(data.row(i))?;
            for (j, &v) in y.iter().enumerate() {
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// Image of a subspace: the span of the projected basis, re-orthonormalized.
    ///
    /// Rank loss is surfaced as `DimensionCollapsed`, never silently reduced;
    /// for JL families it happens with probability e^{-O(n)}.
    pub fn project_subspace(&self, s: &Subspace<T>) -> Result<ProjectedSubspace<T>> {
        if s.ambient_dim() != self.ambient_dim {
            return Err(Error::DimMismatch {
                expected: self.ambient_dim,
                got: s.ambient_dim(),
            });
        }
        if s.dim() > self.target_dim {
            return Err(Error::BadDims {
                msg: format!(
                    "cannot keep dimension {} in target dimension {}",
                    s.dim(),
                    self.target_dim
                ),
            });
        }
        let mut projected = Matrix::zeros(self.target_dim, s.dim());
        for j in 0..s.dim() {
            let col = self.project_vector(&s.basis().col(j))?;
            for (i, &v) in col.iter().enumerate() {
                projected.set(i, j, v);
            }
        }
        let image = match orthonormalize(&projected) {
            Ok(q) => Subspace::new(q).expect("orthonormalized basis"),
            Err(Error::RankDeficient { .. }) => return Err(Error::DimensionCollapsed),
            Err(e) => return Err(e),
        };
        Ok(ProjectedSubspace {
            source_ambient: s.ambient_dim(),
            source_dim: s.dim(),
            image,
        })
    }

    /// Explicit n x N matrix with the same action as this projector,
    /// including the truncation of padding columns.
    ///
    /// Fast families are expanded from their stored state using the dense
    /// transform definitions, independently of the fast code path, so this
    /// doubles as a test oracle.
    pub fn materialize(&self) -> Result<Matrix<T>> {
        if self.padded_dim > MATERIALIZE_LIMIT {
            return Err(Error::TooLarge {
                padded: self.padded_dim,
                limit: MATERIALIZE_LIMIT,
            });
        }
        let (n, big_n) = (self.target_dim, self.ambient_dim);
        match &self.state {
            ProjectorState::Dense(m) => Ok(m.clone()),
            ProjectorState::Hadamard { signs, rows } => {
                let scale = (cst::<T>(self.padded_dim as f64) / cst::<T>(n as f64)).sqrt()
                    / cst::<T>(self.padded_dim as f64).sqrt();
                let mut out = Matrix::zeros(n, big_n);
                for (k, &r) in rows.iter().enumerate() {
                    for j in 0..big_n {
                        let sign = if (r & j).count_ones() % 2 == 0 {
                            T::one()
                        } else {
                            -T::one()
                        };
                        out.set(k, j, sign * signs[j] * scale);
                    }
                }
                Ok(out)
            }
            ProjectorState::Fourier { signs, freqs } => {
                let scale = (cst::<T>(self.padded_dim as f64) / cst::<T>(n as f64)).sqrt()
                    * cst::<T>(2.0).sqrt()
                    / cst::<T>(self.padded_dim as f64).sqrt();
                let mut out = Matrix::zeros(n, big_n);
                let two_pi = cst::<T>(2.0) * T::PI();
                for (k, &f) in freqs.iter().enumerate() {
                    for j in 0..big_n {
                        let phase = two_pi * cst::<T>((f * j % self.padded_dim) as f64)
                            / cst::<T>(self.padded_dim as f64);
                        out.set(k, j, phase.cos() * signs[j] * scale);
                        out.set(n / 2 + k, j, -phase.sin() * signs[j] * scale);
                    }
                }
                Ok(out)
            }
            #[cfg(feature = "testing")]
            ProjectorState::Restriction => {
                let mut out = Matrix::zeros(n, big_n);
                for i in 0..n {
                    out.set(i, i, T::one());
                }
                Ok(out)
            }
        }
    }
}

/// A subspace image under a projector, with its source dimensions.
#[derive(Debug, Clone)]
pub struct ProjectedSubspace<T> {
    pub source_ambient: usize,
    pub source_dim: usize,
    pub image: Subspace<T>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::vec_norm;

    const FAMILIES: [JlFamily; 4] = [
        JlFamily::Gaussian,
        JlFamily::Rademacher,
        JlFamily::SubsampledHadamard,
        JlFamily::SubsampledFourier,
    ];

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(
            JlProjector::<f64>::new(JlFamily::Gaussian, 8, 8, 0),
            Err(Error::BadDims { .. })
        ));
        assert!(matches!(
            JlProjector::<f64>::new(JlFamily::Gaussian, 8, 0, 0),
            Err(Error::BadDims { .. })
        ));
        assert!(matches!(
            JlProjector::<f64>::new(JlFamily::SubsampledFourier, 16, 5, 0),
            Err(Error::OddTargetDim { n: 5 })
        ));
    }

    #[test]
    fn zero_maps_to_zero_and_projection_is_linear() {
        for family in FAMILIES {
            let p = JlProjector::<f64>::new(family, 20, 6, 3).unwrap();
            let zero = p.project_vector(&[0.0; 20]).unwrap();
            assert!(vec_norm(&zero) == 0.0, "{family:?}");
            let mut rng = RngState::new(9);
            let x: Vec<f64> = rng.gaussian_vec(20);
            let doubled: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
            let px = p.project_vector(&x).unwrap();
            let pdx = p.project_vector(&doubled).unwrap();
            for (a, b) in px.iter().zip(&pdx) {
                assert_eq!(2.0 * a, *b, "{family:?}");
            }
        }
    }

    #[test]
    fn gaussian_mean_squared_norm_of_basis_vector() {
        let mut e1 = vec![0.0; 256];
        e1[0] = 1.0;
        let mean: f64 = (0..2000)
            .map(|seed| {
                let p = JlProjector::<f64>::new(JlFamily::Gaussian, 256, 64, seed).unwrap();
                let y = p.project_vector(&e1).unwrap();
                y.iter().map(|v| v * v).sum::<f64>()
            })
            .sum::<f64>()
            / 2000.0;
        assert!((0.95..=1.05).contains(&mean), "mean {mean}");
    }

    #[test]
    fn hadamard_mean_squared_norm_of_ones_vector() {
        let n_pad = 32usize;
        let x = vec![1.0; n_pad];
        let mean: f64 = (0..2000)
            .map(|seed| {
                let p =
                    JlProjector::<f64>::new(JlFamily::SubsampledHadamard, n_pad, 8, seed).unwrap();
                let y = p.project_vector(&x).unwrap();
                y.iter().map(|v| v * v).sum::<f64>()
            })
            .sum::<f64>()
            / 2000.0;
        let expect = n_pad as f64;
        assert!(
            (0.95 * expect..=1.05 * expect).contains(&mean),
            "mean {mean}"
        );
    }

    #[test]
    fn fast_paths_match_materialized_matrices() {
        let mut rng = RngState::new(17);
        for family in [JlFamily::SubsampledHadamard, JlFamily::SubsampledFourier] {
            for big_n in [5usize, 8, 13, 16, 33, 64] {
                let n = if family == JlFamily::SubsampledFourier {
                    4
                } else {
                    3
                };
                let p = JlProjector::<f64>::new(family, big_n, n, 1234).unwrap();
                let dense = p.materialize().unwrap();
                for _ in 0..20 {
                    let x: Vec<f64> = rng.gaussian_vec(big_n);
                    let fast = p.project_vector(&x).unwrap();
                    let slow = dense.matvec(&x);
                    for (a, b) in fast.iter().zip(&slow) {
                        assert!((a - b).abs() < 1e-10, "{family:?} N={big_n}");
                    }
                }
            }
        }
    }

    #[test]
    fn materialized_hadamard_rows_are_signed_scaled_hadamard_rows() {
        let p = JlProjector::<f64>::new(JlFamily::SubsampledHadamard, 8, 4, 7).unwrap();
        let m = p.materialize().unwrap();
        let magnitude = (8.0f64 / 4.0).sqrt() / 8.0f64.sqrt();
        for i in 0..4 {
            for j in 0..8 {
                assert!((m.get(i, j).abs() - magnitude).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rademacher_materializes_to_signs() {
        let p = JlProjector::<f64>::new(JlFamily::Rademacher, 10, 4, 5).unwrap();
        let m = p.materialize().unwrap();
        let magnitude = 1.0 / 2.0;
        for &e in m.entries() {
            assert!((e.abs() - magnitude).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_materializes_to_stored_matrix() {
        let p = JlProjector::<f64>::new(JlFamily::Gaussian, 12, 4, 5).unwrap();
        let m = p.materialize().unwrap();
        let mut rng = RngState::new(2);
        let x: Vec<f64> = rng.gaussian_vec(12);
        let via_matrix = m.matvec(&x);
        let direct = p.project_vector(&x).unwrap();
        for (a, b) in via_matrix.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn materialize_guards_against_huge_padding() {
        let p = JlProjector::<f64>::new(JlFamily::SubsampledHadamard, 5000, 16, 0).unwrap();
        assert!(matches!(p.materialize(), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn same_seed_reproduces_projector() {
        for family in FAMILIES {
            let a = JlProjector::<f64>::new(family, 40, 10, 99).unwrap();
            let b = JlProjector::<f64>::new(family, 40, 10, 99).unwrap();
            let x: Vec<f64> = RngState::new(1).gaussian_vec(40);
            assert_eq!(a.project_vector(&x).unwrap(), b.project_vector(&x).unwrap());
        }
    }

    #[test]
    fn project_subspace_preserves_dimension() {
        let s = Subspace::<f64>::coordinate(64, &[0, 1, 2]).unwrap();
        let p = JlProjector::new(JlFamily::Gaussian, 64, 12, 21).unwrap();
        let image = p.project_subspace(&s).unwrap();
        assert_eq!(image.image.dim(), 3);
        assert_eq!(image.image.ambient_dim(), 12);
        assert_eq!(image.source_ambient, 64);
    }

    #[test]
    fn restriction_projector_is_exact_on_leading_coordinates() {
        use crate::subspace::canonical_angles;
        let a = Subspace::<f64>::coordinate(32, &[0, 1]).unwrap();
        let b = Subspace::<f64>::coordinate(32, &[1, 2]).unwrap();
        let p = JlProjector::new(JlFamily::Restriction, 32, 8, 0).unwrap();
        let pa = p.project_subspace(&a).unwrap().image;
        let pb = p.project_subspace(&b).unwrap().image;
        let before = canonical_angles(&a, &b).unwrap();
        let after = canonical_angles(&pa, &pb).unwrap();
        for (x, y) in before.angles().iter().zip(after.angles()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
