//! Synthetic subspaces and union-of-subspaces datasets.
//!
//! Prescribed-angle pairs and seeded random subspaces provide oracle inputs
//! for the distortion and task experiments.

use crate::error::{Error, Result};
use crate::numerics::{orthonormalize, sym_eig, Matrix, RngState};
use crate::real::{cst, Real};
use crate::subspace::Subspace;

/// Target canonical angles for a constructed subspace pair.
#[derive(Debug, Clone)]
pub struct AnglePrescription<T> {
    pub ambient_dim: usize,
    /// Sorted nondecreasing, each in [0, pi/2].
    pub angles: Vec<T>,
}

impl<T: Real> AnglePrescription<T> {
    pub fn new(ambient_dim: usize, mut angles: Vec<T>) -> Result<Self> {
        let d = angles.len();
        if d == 0 || ambient_dim < 2 * d {
            return Err(Error::AmbientTooSmall {
                ambient: ambient_dim,
                dim: d,
                needed: 2 * d,
            });
        }
        let half_pi = T::PI() * cst::<T>(0.5);
        if angles
            .iter()
            .any(|t| *t < T::zero() || *t > half_pi + cst(1e-12))
        {
            return Err(Error::BadConfig {
                msg: "prescribed angles must lie in [0, pi/2]".into(),
            });
        }
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self {
            ambient_dim,
            angles,
        })
    }
}

/// Seeded random orthogonal matrix (orthonormalized Gaussian).
pub fn random_rotation<T: Real>(n: usize, rng: &mut RngState) -> Matrix<T> {
    loop {
        let g = Matrix::from_raw(n, n, rng.gaussian_vec(n * n));
        // A Gaussian matrix is singular with probability zero; retry on the
        // numerical fluke.
        if let Ok(q) = orthonormalize(&g) {
            return q;
        }
    }
}

/// Haar-like random d-dimensional subspace of R^N.
pub fn random_subspace<T: Real>(ambient_dim: usize, dim: usize, seed: u64) -> Result<Subspace<T>> {
    if dim == 0 || dim > ambient_dim {
        return Err(Error::BadDims {
            msg: format!("subspace dim {dim} in ambient {ambient_dim}"),
        });
    }
    let mut rng = RngState::new(seed);
    loop {
        let g = Matrix::from_raw(ambient_dim, dim, rng.gaussian_vec(ambient_dim * dim));
        if let Ok(s) = Subspace::from_spanning(&g) {
            return Ok(s);
        }
    }
}

/// Pair of subspaces whose canonical angles equal the prescription.
///
/// The construction places the first subspace on span(e_1..e_d) and the
/// second on span(cos(theta_k) e_k + sin(theta_k) e_{d+k}), then applies a
/// seeded random rotation so tests cannot pass by coordinate alignment.
pub fn subspace_pair_with_angles<T: Real>(
    p: &AnglePrescription<T>,
    seed: u64,
) -> Result<(Subspace<T>, Subspace<T>)> {
    let d = p.angles.len();
    let n = p.ambient_dim;
    let mut rng = RngState::new(seed);
    let rotation = random_rotation::<T>(n, &mut rng);

    let mut first = Matrix::zeros(n, d);
    let mut second = Matrix::zeros(n, d);
    for (k, &theta) in p.angles.iter().enumerate() {
        first.set(k, k, T::one());
        second.set(k, k, theta.cos());
        second.set(d + k, k, theta.sin());
    }
    let a = Subspace::new(rotation.matmul(&first))?;
    let b = Subspace::new(rotation.matmul(&second))?;
    Ok((a, b))
}

/// Union-of-subspaces dataset parameters.
#[derive(Debug, Clone)]
pub struct UosSpec {
    pub ambient_dim: usize,
    /// Dimension of each generating subspace.
    pub dims: Vec<usize>,
    pub points_per_subspace: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl UosSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::BadConfig {
                msg: "at least one subspace required".into(),
            });
        }
        if self.points_per_subspace == 0 {
            return Err(Error::BadConfig {
                msg: "points_per_subspace must be >= 1".into(),
            });
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::BadConfig {
                msg: "noise_sigma must be >= 0".into(),
            });
        }
        for &d in &self.dims {
            if d == 0 || d > self.ambient_dim {
                return Err(Error::BadDims {
                    msg: format!("subspace dim {d} in ambient {}", self.ambient_dim),
                });
            }
        }
        Ok(())
    }
}

/// Labeled points on a union of subspaces, with the generating bases.
#[derive(Debug, Clone)]
pub struct UosDataset<T> {
    /// M x N; rows are points.
    pub data: Matrix<T>,
    pub labels: Vec<usize>,
    pub bases: Vec<Subspace<T>>,
}

/// Draws points x = U_l s + w with s ~ N(0, I/d_l) and isotropic noise
/// w ~ N(0, sigma^2/d_l I_N). Deterministic per seed.
pub fn generate_uos<T: Real>(spec: &UosSpec) -> Result<UosDataset<T>> {
    generate_uos_with_noise_cov(spec, None)
}

/// As [`generate_uos`], but with an optional positive-definite N x N noise
/// covariance R_n replacing sigma^2 I: w ~ N(0, R_n/d_l).
pub fn generate_uos_with_noise_cov<T: Real>(
    spec: &UosSpec,
    noise_cov: Option<&Matrix<T>>,
) -> Result<UosDataset<T>> {
    spec.validate()?;
    let n = spec.ambient_dim;
    let l_count = spec.dims.len();
    let m = l_count * spec.points_per_subspace;

    // Square root of the general noise covariance, when supplied.
    let cov_sqrt: Option<Matrix<T>> = match noise_cov {
        None => None,
        Some(r) => {
            if r.rows() != n || r.cols() != n {
                return Err(Error::BadDims {
                    msg: format!("noise covariance must be {n}x{n}"),
                });
            }
            let eig = sym_eig(r)?;
            if eig.eigenvalues.iter().any(|&ev| ev <= T::zero()) {
                return Err(Error::BadConfig {
                    msg: "noise covariance must be positive definite".into(),
                });
            }
            let mut scaled = eig.eigenvectors.clone();
            for j in 0..n {
                let root = eig.eigenvalues[j].sqrt();
                for i in 0..n {
                    scaled.set(i, j, scaled.get(i, j) * root);
                }
            }
            Some(scaled.matmul(&eig.eigenvectors.transpose()))
        }
    };

    let bases: Vec<Subspace<T>> = spec
        .dims
        .iter()
        .enumerate()
        .map(|(l, &d)| {
            random_subspace(
                n,
                d,
                RngState::derive(spec.seed, &[0xBA5E, l as u64]).seed(),
            )
        })
        .collect::<Result<_>>()?;

    let mut data = Matrix::zeros(m, n);
    let mut labels = Vec::with_capacity(m);
    let mut rng = RngState::derive(spec.seed, &[0xDA7A]);
    for (l, basis) in bases.iter().enumerate() {
        let d = spec.dims[l];
        let coeff_scale = T::one() / cst::<T>(d as f64).sqrt();
        let noise_scale = cst::<T>(spec.noise_sigma) / cst::<T>(d as f64).sqrt();
        for p in 0..spec.points_per_subspace {
            let row = l * spec.points_per_subspace + p;
            let coeffs: Vec<T> = rng
                .gaussian_vec::<T>(d)
                .into_iter()
                .map(|g| g * coeff_scale)
                .collect();
            let mut point = basis.basis().matvec(&coeffs);
            if spec.noise_sigma > 0.0 {
                let white: Vec<T> = rng.gaussian_vec(n);
                match &cov_sqrt {
                    None => {
                        for (x, w) in point.iter_mut().zip(&white) {
                            *x += *w * noise_scale;
                        }
                    }
                    Some(root) => {
                        let shaped = root.matvec(&white);
                        let inv_sqrt_d = T::one() / cst::<T>(d as f64).sqrt();
                        for (x, w) in point.iter_mut().zip(&shaped) {
                            *x += *w * inv_sqrt_d;
                        }
                    }
                }
            }
            for (j, &v) in point.iter().enumerate() {
                data.set(row, j, v);
            }
            labels.push(l);
        }
    }
    Ok(UosDataset {
        data,
        labels,
        bases,
    })
}
