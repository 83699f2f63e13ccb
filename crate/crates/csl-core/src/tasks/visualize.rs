//! Angle-based subspace visualization: dissimilarity construction followed by
//! classical multidimensional scaling.

use crate::error::{Error, Result};
use crate::numerics::{sym_eig, vec_dot, vec_norm, Matrix};
use crate::projection::JlProjector;
use crate::real::{cst, Real};
use crate::subspace::{vector_subspace_angle, Subspace};

/// Pairwise dissimilarities between labeled points on a union of subspaces.
///
/// For points with the same label the entry is sin^2 of the angle between
/// their spans. Otherwise it is
/// (v sin(theta_ij) + u min_k(sin(tt_ik) + sin(tt_jk)))^2, where tt_ik is the
/// angle between point i and subspace k and the minimum ranges over all
/// subspaces, the two home subspaces included. u and v weight the two terms;
/// both default to 1 at the command-line level so the terms are directly
/// comparable.
#[derive(Debug, Clone)]
pub struct DissimilarityMatrix<T> {
    pub matrix: Matrix<T>,
    pub u: T,
    pub v: T,
}

pub fn dissimilarity<T: Real>(
    points: &Matrix<T>,
    labels: &[usize],
    bases: &[Subspace<T>],
    u: T,
    v: T,
) -> Result<DissimilarityMatrix<T>> {
    let m = points.rows();
    assert_eq!(labels.len(), m, "one label per point");
    if u < T::zero() || v < T::zero() {
        return Err(Error::BadConfig {
            msg: "u and v must be nonnegative".into(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= bases.len()) {
        return Err(Error::MissingBasis { label: bad });
    }

    // Unit-normalized points; zero vectors are rejected.
    let mut unit = Vec::with_capacity(m);
    for i in 0..m {
        let row = points.row(i);
        let norm = vec_norm(row);
        if norm <= T::zero() {
            return Err(Error::ZeroVector);
        }
        unit.push(row.iter().map(|&x| x / norm).collect::<Vec<T>>());
    }

    // sin of the angle between each point and each subspace.
    let mut sin_point_subspace = Matrix::zeros(m, bases.len());
    for i in 0..m {
        for (k, basis) in bases.iter().enumerate() {
            let angle = vector_subspace_angle(&unit[i], basis)?;
            sin_point_subspace.set(i, k, angle.sin());
        }
    }

    let mut d = Matrix::zeros(m, m);
    for i in 0..m {
        for j in i + 1..m {
            let cos = vec_dot(&unit[i], &unit[j]).abs().min(T::one());
            let sin_sq = (T::one() - cos * cos).max(T::zero());
            let entry = if labels[i] == labels[j] {
                sin_sq
            } else {
                let sin_ij = sin_sq.sqrt();
                let mut best = T::infinity();
                for k in 0..bases.len() {
                    let c = sin_point_subspace.get(i, k) + sin_point_subspace.get(j, k);
                    if c < best {
                        best = c;
                    }
                }
                let combined = v * sin_ij + u * best;
                combined * combined
            };
            d.set(i, j, entry);
            d.set(j, i, entry);
        }
    }
    Ok(DissimilarityMatrix { matrix: d, u, v })
}

/// Low-dimensional embedding: column i is sqrt(lambda_i) v_i for the top
/// eigenpairs of the double-centered dissimilarity matrix.
#[derive(Debug, Clone)]
pub struct EmbeddingCoords<T> {
    /// M x out_dim coordinates.
    pub coords: Matrix<T>,
    /// Retained eigenvalues, nonincreasing.
    pub eigenvalues: Vec<T>,
}

/// Classical MDS on a dissimilarity matrix.
///
/// Double-centers D into B = -1/2 H D H with H = I - (1/M) 1 1^T, takes the
/// top `out_dim` eigenpairs, and scales eigenvectors by sqrt(lambda). The
/// eigenvector sign is fixed so the largest-magnitude entry is positive,
/// making the output deterministic.
///
/// The leading eigenvalues must be simple: a repeated eigenvalue makes the
/// embedding non-unique and raises `DegenerateSpectrum`. A near-zero or
/// negative retained eigenvalue raises `NonPositiveEigenvalue`. The top-pair
/// gap is tested first (it already subsumes the all-zero spectrum), then
/// positivity of the retained eigenvalues, then the remaining gaps.
pub fn classical_mds<T: Real>(
    d: &DissimilarityMatrix<T>,
    out_dim: usize,
) -> Result<EmbeddingCoords<T>> {
    let m = d.matrix.rows();
    assert!(
        (1..=3).contains(&out_dim),
        "embedding dimension must be 1, 2, or 3"
    );
    assert!(m > out_dim, "need more points than embedding dimensions");

    // b_ij = -1/2 (d_ij - rowmean_i - colmean_j + grandmean); D is symmetric
    // so row and column means coincide.
    let mf = cst::<T>(m as f64);
    let mut row_mean = vec![T::zero(); m];
    for i in 0..m {
        row_mean[i] = d.matrix.row(i).iter().copied().sum::<T>() / mf;
    }
    let grand = row_mean.iter().copied().sum::<T>() / mf;
    let half = cst::<T>(0.5);
    let mut b = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let centered = d.matrix.get(i, j) - row_mean[i] - row_mean[j] + grand;
            b.set(i, j, -half * centered);
        }
    }

    let eig = sym_eig(&b)?;
    let lambda = &eig.eigenvalues;
    let rel_gap = |i: usize| -> T {
        // Gap between lambda_i and lambda_{i+1} (0-indexed i), relative to
        // the local eigenvalue magnitude.
        let a = lambda[i];
        let b = lambda[i + 1];
        let scale = a.abs().max(b.abs()).max(T::min_positive_value());
        (a - b) / scale
    };
    let gap_tol = cst::<T>(1e-9);
    let pos_tol = lambda[0].max(T::zero()) * cst::<T>(1e-12);

    if rel_gap(0) < gap_tol {
        return Err(Error::DegenerateSpectrum { index: 1 });
    }
    for i in 0..out_dim {
        if lambda[i] <= pos_tol {
            return Err(Error::NonPositiveEigenvalue {
                index: i + 1,
                out_dim,
            });
        }
    }
    // Each retained eigenvalue must also be separated from its successor.
    for i in 1..out_dim.min(m - 1) {
        if rel_gap(i) < gap_tol {
            return Err(Error::DegenerateSpectrum { index: i + 1 });
        }
    }

    let mut coords = Matrix::zeros(m, out_dim);
    let mut eigenvalues = Vec::with_capacity(out_dim);
    for j in 0..out_dim {
        let mut v = eig.eigenvectors.col(j);
        let mut max_idx = 0;
        for (i, e) in v.iter().enumerate() {
            if e.abs() > v[max_idx].abs() {
                max_idx = i;
            }
        }
        if v[max_idx] < T::zero() {
            for e in v.iter_mut() {
                *e = -*e;
            }
        }
        let scale = lambda[j].sqrt();
        for (i, &e) in v.iter().enumerate() {
            coords.set(i, j, e * scale);
        }
        eigenvalues.push(lambda[j]);
    }
    Ok(EmbeddingCoords {
        coords,
        eigenvalues,
    })
}

/// Full visualization pipeline, optionally on compressed data.
///
/// With a projector, points go through `project_vector` and bases through
/// `project_subspace`; the dissimilarity and MDS stages are identical on both
/// paths.
pub fn visualize<T: Real>(
    points: &Matrix<T>,
    labels: &[usize],
    bases: &[Subspace<T>],
    u: T,
    v: T,
    out_dim: usize,
    projector: Option<&JlProjector<T>>,
) -> Result<EmbeddingCoords<T>> {
    match projector {
        None => classical_mds(&dissimilarity(points, labels, bases, u, v)?, out_dim),
        Some(p) => {
            let compressed_points = p.project_rows(points)?;
            let compressed_bases: Vec<Subspace<T>> = bases
                .iter()
                .map(|b| p.project_subspace(b).map(|ps| ps.image))
                .collect::<Result<_>>()?;
            classical_mds(
                &dissimilarity(&compressed_points, labels, &compressed_bases, u, v)?,
                out_dim,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngState;
    use crate::projection::JlFamily;
    use crate::synth::{generate_uos, UosSpec};

    fn line_subspace(ambient: usize, axis: usize) -> Subspace<f64> {
        Subspace::coordinate(ambient, &[axis]).unwrap()
    }

    #[test]
    fn same_label_entries_are_sine_squared() {
        let points = Matrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0], // same direction
            vec![0.0, 3.0, 0.0], // orthogonal
        ])
        .unwrap();
        let bases = vec![line_subspace(3, 0)];
        let d = dissimilarity(&points, &[0, 0, 0], &bases, 1.0, 1.0).unwrap();
        assert!(d.matrix.get(0, 1).abs() < 1e-15, "identical directions");
        assert!((d.matrix.get(0, 2) - 1.0).abs() < 1e-12, "orthogonal pair");
        // symmetry and zero diagonal by construction
        for i in 0..3 {
            assert_eq!(d.matrix.get(i, i), 0.0);
            for j in 0..3 {
                assert_eq!(d.matrix.get(i, j), d.matrix.get(j, i));
            }
        }
    }

    #[test]
    fn cross_label_entry_reduces_to_v_squared_in_overlap() {
        // x_i on axis 0, x_j on axis 1, orthogonal, and a third subspace
        // containing both directions: the min over k hits 0 there.
        let points = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let bases = vec![
            line_subspace(3, 0),
            line_subspace(3, 1),
            Subspace::coordinate(3, &[0, 1]).unwrap(),
        ];
        let v = 0.7;
        let d = dissimilarity(&points, &[0, 1], &bases, 1.0, v).unwrap();
        assert!((d.matrix.get(0, 1) - v * v).abs() < 1e-12);
    }

    #[test]
    fn u_zero_reduces_cross_entries_to_sine_squared() {
        let points = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let bases = vec![line_subspace(3, 0), line_subspace(3, 1)];
        let d = dissimilarity(&points, &[0, 1], &bases, 0.0, 1.0).unwrap();
        assert!((d.matrix.get(0, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_basis_and_zero_vector_are_rejected() {
        let points = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let bases = vec![line_subspace(2, 0)];
        assert!(matches!(
            dissimilarity(&points, &[0, 1], &bases, 1.0, 1.0),
            Err(Error::MissingBasis { label: 1 })
        ));
        let zero = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            dissimilarity(&zero, &[0, 0], &bases, 1.0, 1.0),
            Err(Error::ZeroVector)
        ));
    }

    fn squared_distance_matrix(coords: &[(f64, f64)]) -> DissimilarityMatrix<f64> {
        let m = coords.len();
        let mut d = Matrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let dx = coords[i].0 - coords[j].0;
                let dy = coords[i].1 - coords[j].1;
                d.set(i, j, dx * dx + dy * dy);
            }
        }
        DissimilarityMatrix {
            matrix: d,
            u: 1.0,
            v: 1.0,
        }
    }

    #[test]
    fn mds_recovers_a_line() {
        let d = squared_distance_matrix(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        // Two or more output dimensions hit the flat second eigenvalue.
        assert!(matches!(
            classical_mds(&d, 2),
            Err(Error::NonPositiveEigenvalue { .. })
        ));
        let embedding = classical_mds(&d, 1).unwrap();
        let c = embedding.coords.col(0);
        let flip = if c[0] < c[2] { 1.0 } else { -1.0 };
        let got: Vec<f64> = c.iter().map(|x| flip * x).collect();
        for (a, b) in got.iter().zip(&[-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-9, "{got:?}");
        }
    }

    #[test]
    fn mds_reconstructs_rectangle_distances() {
        let pts = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)];
        let d = squared_distance_matrix(&pts);
        let embedding = classical_mds(&d, 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let dx = embedding.coords.get(i, 0) - embedding.coords.get(j, 0);
                let dy = embedding.coords.get(i, 1) - embedding.coords.get(j, 1);
                let got = (dx * dx + dy * dy).sqrt();
                let expect = d.matrix.get(i, j).sqrt();
                assert!(
                    (got - expect).abs() < 1e-8,
                    "pair ({i},{j}): {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn mds_rejects_degenerate_spectra() {
        // Identical points: all eigenvalues zero.
        let d = DissimilarityMatrix {
            matrix: Matrix::<f64>::zeros(4, 4),
            u: 1.0,
            v: 1.0,
        };
        assert!(matches!(
            classical_mds(&d, 2),
            Err(Error::DegenerateSpectrum { .. })
        ));
        // Unit square: top two eigenvalues coincide by symmetry.
        let square = squared_distance_matrix(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert!(matches!(
            classical_mds(&square, 2),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn embedding_column_norms_match_eigenvalues() {
        let pts = [(0.0, 0.0), (3.0, 0.1), (1.5, 2.0), (0.3, 1.1), (2.2, 0.7)];
        let d = squared_distance_matrix(&pts);
        let embedding = classical_mds(&d, 2).unwrap();
        for j in 0..2 {
            let norm_sq: f64 = embedding.coords.col(j).iter().map(|x| x * x).sum();
            assert!((norm_sq - embedding.eigenvalues[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn restriction_projector_reproduces_the_embedding_exactly() {
        let spec = UosSpec {
            ambient_dim: 16,
            dims: vec![2, 2, 2],
            points_per_subspace: 6,
            noise_sigma: 0.0,
            seed: 33,
        };
        let ds = generate_uos::<f64>(&spec).unwrap();
        // Restriction keeps the first 16 of 24 coordinates: embed the data in
        // a larger ambient space by zero padding, then restrict back.
        let mut padded = Matrix::zeros(ds.data.rows(), 24);
        for i in 0..ds.data.rows() {
            for j in 0..16 {
                padded.set(i, j, ds.data.get(i, j));
            }
        }
        let padded_bases: Vec<Subspace<f64>> = ds
            .bases
            .iter()
            .map(|b| {
                let mut m = Matrix::zeros(24, b.dim());
                for i in 0..16 {
                    for j in 0..b.dim() {
                        m.set(i, j, b.basis().get(i, j));
                    }
                }
                Subspace::new(m).unwrap()
            })
            .collect();
        let p = JlProjector::<f64>::new(JlFamily::Restriction, 24, 16, 0).unwrap();
        let plain = visualize(&ds.data, &ds.labels, &ds.bases, 1.0, 1.0, 2, None).unwrap();
        let compressed =
            visualize(&padded, &ds.labels, &padded_bases, 1.0, 1.0, 2, Some(&p)).unwrap();
        let diff = plain.coords.sub(&compressed.coords).max_abs();
        assert!(diff < 1e-9, "restriction changed the embedding by {diff}");
    }

    #[test]
    fn compressed_embedding_stays_close_after_alignment() {
        // Gaussian compression at n = 8d should perturb the picture only
        // mildly; measured with an orthogonal Procrustes alignment.
        let d_sub = 3usize;
        let spec = UosSpec {
            ambient_dim: 128,
            dims: vec![d_sub; 3],
            points_per_subspace: 12,
            noise_sigma: 0.0,
            seed: 44,
        };
        let ds = generate_uos::<f64>(&spec).unwrap();
        let plain = visualize(&ds.data, &ds.labels, &ds.bases, 1.0, 1.0, 2, None).unwrap();
        let mut ratios = Vec::new();
        for seed in 0..50u64 {
            let p =
                JlProjector::<f64>::new(JlFamily::Gaussian, 128, 8 * d_sub, 1000 + seed).unwrap();
            let compressed =
                visualize(&ds.data, &ds.labels, &ds.bases, 1.0, 1.0, 2, Some(&p)).unwrap();
            let aligned = procrustes_align(&compressed.coords, &plain.coords);
            let err = aligned.sub(&plain.coords).frobenius_norm() / plain.coords.frobenius_norm();
            ratios.push(err);
        }
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = ratios[ratios.len() / 2];
        assert!(median <= 0.3, "median aligned distortion {median}");
    }

    /// Best orthogonal alignment of `a` onto `b` (rotation or reflection).
    fn procrustes_align(a: &Matrix<f64>, b: &Matrix<f64>) -> Matrix<f64> {
        use crate::numerics::thin_svd;
        let product = a.transpose().matmul(b);
        let svd = thin_svd(&product).unwrap();
        let rotation = svd.left.matmul(&svd.right.transpose());
        a.matmul(&rotation)
    }

    #[test]
    fn random_planar_configurations_round_trip() {
        let mut rng = RngState::new(55);
        for _ in 0..5 {
            let m = 8;
            let pts: Vec<(f64, f64)> = (0..m)
                .map(|_| (rng.gaussian() * 2.0, rng.gaussian()))
                .collect();
            let d = squared_distance_matrix(&pts);
            let embedding = classical_mds(&d, 2).unwrap();
            for i in 0..m {
                for j in 0..m {
                    let dx = embedding.coords.get(i, 0) - embedding.coords.get(j, 0);
                    let dy = embedding.coords.get(i, 1) - embedding.coords.get(j, 1);
                    let got = (dx * dx + dy * dy).sqrt();
                    let expect = d.matrix.get(i, j).sqrt();
                    assert!((got - expect).abs() < 1e-8);
                }
            }
        }
    }
}
