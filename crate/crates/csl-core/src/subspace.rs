//! Subspaces, canonical angles, principal vectors, affinity, and distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{orthonormalize, thin_svd, vec_norm, Matrix};
use crate::real::{cst, Real};

/// A d-dimensional linear subspace of R^N, stored as an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace<T> {
    basis: Matrix<T>,
}

impl<T: Real> Subspace<T> {
    /// Wraps a matrix whose columns are already orthonormal.
    pub fn new(basis: Matrix<T>) -> Result<Self> {
        let (n, d) = (basis.rows(), basis.cols());
        if d == 0 || d > n {
            return Err(Error::BadDims {
                msg: format!("subspace dimension {d} in ambient {n}"),
            });
        }
        let defect = basis.orthonormality_defect();
        if defect > cst(1e-10) {
            return Err(Error::NotOrthonormal {
                deviation: defect.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { basis })
    }

    /// Orthonormalizes a spanning set; fails on rank-deficient input.
    pub fn from_spanning(m: &Matrix<T>) -> Result<Self> {
        Ok(Self {
            basis: orthonormalize(m)?,
        })
    }

    /// Span of the given standard basis vectors in R^N.
    pub fn coordinate(ambient_dim: usize, axes: &[usize]) -> Result<Self> {
        let mut m = Matrix::zeros(ambient_dim, axes.len());
        for (j, &axis) in axes.iter().enumerate() {
            assert!(axis < ambient_dim);
            m.set(axis, j, T::one());
        }
        Self::new(m)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    /// Coefficients of x in this basis: `basis^T x`.
    pub fn project_coeffs(&self, x: &[T]) -> Vec<T> {
        self.basis.transpose_matvec(x)
    }

    /// Orthogonal projection of x onto the subspace, in ambient coordinates.
    pub fn project_point(&self, x: &[T]) -> Vec<T> {
        self.basis.matvec(&self.project_coeffs(x))
    }

    /// Residual `x - P x` of the orthogonal projection.
    pub fn residual(&self, x: &[T]) -> Vec<T> {
        let p = self.project_point(x);
        x.iter().zip(&p).map(|(&a, &b)| a - b).collect()
    }
}

/// Sorted canonical angles between two subspaces, each in [0, pi/2].
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalAngles<T> {
    angles: Vec<T>,
}

impl<T: Real> CanonicalAngles<T> {
    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn sines(&self) -> Vec<T> {
        self.angles.iter().map(|a| a.sin()).collect()
    }

    pub fn cosines(&self) -> Vec<T> {
        self.angles.iter().map(|a| a.cos()).collect()
    }
}

/// Paired principal vectors achieving the canonical angles.
///
/// Only the angles are canonical: when singular values tie, the pairs are not
/// unique and whatever the SVD produces is returned.
#[derive(Debug, Clone)]
pub struct PrincipalVectors<T> {
    pub in_first: Matrix<T>,
    pub in_second: Matrix<T>,
}

/// The distance catalog. Every kind is a function of the canonical angles;
/// three of them generalize to subspaces of unequal dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    /// sqrt(sum sin^2 theta_k); a.k.a. chordal distance.
    ProjectionF,
    /// arccos(prod cos theta_k).
    FubiniStudy,
    /// sqrt(sum theta_k^2); the geodesic distance.
    Grassmann,
    /// sqrt(1 - prod cos^2 theta_k).
    BinetCauchy,
    /// 2 sqrt(sum sin^2(theta_k / 2)).
    Procrustes,
    /// theta_max.
    Asimov,
    /// 2 sin(theta_max / 2).
    Spectral,
    /// sin theta_max.
    Projection,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 8] = [
        DistanceKind::ProjectionF,
        DistanceKind::FubiniStudy,
        DistanceKind::Grassmann,
        DistanceKind::BinetCauchy,
        DistanceKind::Procrustes,
        DistanceKind::Asimov,
        DistanceKind::Spectral,
        DistanceKind::Projection,
    ];

    /// Kinds defined for subspaces of unequal dimension.
    pub const GENERALIZED: [DistanceKind; 3] = [
        DistanceKind::ProjectionF,
        DistanceKind::Grassmann,
        DistanceKind::Procrustes,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DistanceKind::ProjectionF => "projection-f",
            DistanceKind::FubiniStudy => "fubini-study",
            DistanceKind::Grassmann => "grassmann",
            DistanceKind::BinetCauchy => "binet-cauchy",
            DistanceKind::Procrustes => "procrustes",
            DistanceKind::Asimov => "asimov",
            DistanceKind::Spectral => "spectral",
            DistanceKind::Projection => "projection",
        }
    }

    pub fn supports_unequal_dims(&self) -> bool {
        Self::GENERALIZED.contains(self)
    }
}

fn check_ambient<T: Real>(a: &Subspace<T>, b: &Subspace<T>) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: a.ambient_dim(),
            right: b.ambient_dim(),
        });
    }
    Ok(())
}

/// Canonical angles between two subspaces of a common ambient space.
///
/// Cosines are the singular values of `a^T b` (clamped into [0, 1]). For
/// sigma > 1/sqrt(2), where arccos loses precision, the angle is recomputed
/// from the sine route: the singular values of `(I - b b^T) a q1` are the
/// sines of the same angles, and arcsin is well conditioned there. The mix
/// keeps absolute angle error near machine precision at both ends.
pub fn canonical_angles<T: Real>(a: &Subspace<T>, b: &Subspace<T>) -> Result<CanonicalAngles<T>> {
    check_ambient(a, b)?;
    let (small, large) = if a.dim() <= b.dim() { (a, b) } else { (b, a) };
    let product = small.basis().transpose().matmul(large.basis());
    let svd = thin_svd(&product).expect("jacobi svd on a d1 x d2 cosine matrix");
    let d1 = small.dim();

    let cos_route = cst::<T>(1.0 / std::f64::consts::SQRT_2);
    let needs_sine = svd.singular_values.iter().any(|&s| s > cos_route);
    let sines_desc: Option<Vec<T>> = if needs_sine {
        // Principal directions of the smaller subspace, then their residuals
        // against the larger one; singular values are sines, descending.
        let principal = small.basis().matmul(&svd.left);
        let coeffs = large.basis().transpose().matmul(&principal);
        let reproj = large.basis().matmul(&coeffs);
        let resid = principal.sub(&reproj);
        Some(
            thin_svd(&resid)
                .expect("jacobi svd on residual matrix")
                .singular_values,
        )
    } else {
        None
    };

    let mut angles = Vec::with_capacity(d1);
    for (k, &sigma) in svd.singular_values.iter().enumerate() {
        let sigma = sigma.min(T::one()).max(T::zero());
        let theta = if sigma <= cos_route {
            sigma.acos()
        } else {
            // k-th angle ascending pairs with the k-th sine from the smallest.
            let s = sines_desc.as_ref().unwrap()[d1 - 1 - k];
            s.min(T::one()).max(T::zero()).asin()
        };
        angles.push(theta);
    }
    angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(CanonicalAngles { angles })
}

/// Principal vector pairs from the thin SVD of `a^T b`.
pub fn principal_vectors<T: Real>(a: &Subspace<T>, b: &Subspace<T>) -> Result<PrincipalVectors<T>> {
    check_ambient(a, b)?;
    let swap = a.dim() > b.dim();
    let (small, large) = if swap { (b, a) } else { (a, b) };
    let svd = thin_svd(&small.basis().transpose().matmul(large.basis()))
        .expect("jacobi svd on a d1 x d2 cosine matrix");
    let in_small = small.basis().matmul(&svd.left);
    let in_large = large.basis().matmul(&svd.right);
    Ok(if swap {
        PrincipalVectors {
            in_first: in_large,
            in_second: in_small,
        }
    } else {
        PrincipalVectors {
            in_first: in_small,
            in_second: in_large,
        }
    })
}

/// Angle between a nonzero vector and a subspace, in [0, pi/2].
///
/// cos theta = |basis^T x| / |x|; small angles switch to the sine route
/// (norm of the projection residual) for accuracy.
pub fn vector_subspace_angle<T: Real>(x: &[T], s: &Subspace<T>) -> Result<T> {
    assert_eq!(
        x.len(),
        s.ambient_dim(),
        "vector length must match ambient dimension"
    );
    let norm = vec_norm(x);
    if norm <= T::zero() {
        return Err(Error::ZeroVector);
    }
    let cos = (vec_norm(&s.project_coeffs(x)) / norm).min(T::one());
    if cos <= cst(1.0 / std::f64::consts::SQRT_2) {
        Ok(cos.acos())
    } else {
        let sin = (vec_norm(&s.residual(x)) / norm).min(T::one());
        Ok(sin.asin())
    }
}

/// Affinity sqrt(sum cos^2 theta_k), in [0, sqrt(min(d1, d2))].
pub fn affinity<T: Real>(a: &Subspace<T>, b: &Subspace<T>) -> Result<T> {
    let angles = canonical_angles(a, b)?;
    Ok(angles.cosines().iter().map(|&c| c * c).sum::<T>().sqrt())
}

/// Distance between subspaces under the chosen kind.
///
/// For unequal dimensions only the generalized kinds are defined; the
/// ordering is symmetric (internally the smaller dimension comes first).
pub fn distance<T: Real>(a: &Subspace<T>, b: &Subspace<T>, kind: DistanceKind) -> Result<T> {
    check_ambient(a, b)?;
    let angles = canonical_angles(a, b)?;
    let (d1, d2) = if a.dim() <= b.dim() {
        (a.dim(), b.dim())
    } else {
        (b.dim(), a.dim())
    };
    if d1 == d2 {
        Ok(distance_from_angles(angles.angles(), kind))
    } else {
        if !kind.supports_unequal_dims() {
            return Err(Error::UnequalDimUnsupported { kind: kind.name() });
        }
        Ok(generalized_distance_from_angles(
            angles.angles(),
            d1,
            d2,
            kind,
        ))
    }
}

/// Equal-dimension distance formulas applied to a given angle vector.
pub fn distance_from_angles<T: Real>(angles: &[T], kind: DistanceKind) -> T {
    let last = *angles.last().expect("at least one angle");
    match kind {
        DistanceKind::ProjectionF => angles.iter().map(|t| t.sin() * t.sin()).sum::<T>().sqrt(),
        DistanceKind::FubiniStudy => {
            let prod = angles.iter().fold(T::one(), |acc, t| acc * t.cos());
            prod.min(T::one()).max(-T::one()).acos()
        }
        DistanceKind::Grassmann => angles.iter().map(|&t| t * t).sum::<T>().sqrt(),
        DistanceKind::BinetCauchy => {
            let prod = angles
                .iter()
                .fold(T::one(), |acc, t| acc * (t.cos() * t.cos()));
            (T::one() - prod).max(T::zero()).sqrt()
        }
        DistanceKind::Procrustes => {
            let two = cst::<T>(2.0);
            let half = cst::<T>(0.5);
            two * angles
                .iter()
                .map(|&t| (t * half).sin().powi(2))
                .sum::<T>()
                .sqrt()
        }
        DistanceKind::Asimov => last,
        DistanceKind::Spectral => cst::<T>(2.0) * (last * cst::<T>(0.5)).sin(),
        DistanceKind::Projection => last.sin(),
    }
}

/// Generalized formulas for d1 < d2; `angles` holds the d1 canonical angles.
pub fn generalized_distance_from_angles<T: Real>(
    angles: &[T],
    d1: usize,
    d2: usize,
    kind: DistanceKind,
) -> T {
    let gap = cst::<T>((d2 - d1) as f64);
    let half = cst::<T>(0.5);
    match kind {
        DistanceKind::ProjectionF => {
            (gap * half + angles.iter().map(|t| t.sin() * t.sin()).sum::<T>()).sqrt()
        }
        DistanceKind::Grassmann => {
            let quarter_pi_sq = T::PI() * T::PI() * cst::<T>(0.25);
            (gap * quarter_pi_sq + angles.iter().map(|&t| t * t).sum::<T>()).sqrt()
        }
        DistanceKind::Procrustes => {
            let two = cst::<T>(2.0);
            (gap + two * angles.iter().map(|&t| (t * half).sin().powi(2)).sum::<T>()).sqrt()
        }
        _ => unreachable!("only generalized kinds reach here"),
    }
}
