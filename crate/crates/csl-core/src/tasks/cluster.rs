//! Sparse subspace clustering: self-expressive coefficients by orthogonal
//! matching pursuit, spectral clustering of the induced affinity graph, and
//! the permutation-minimal error metric.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{sym_eig, thin_svd, vec_dot, vec_norm, Matrix, RngState};
use crate::projection::JlProjector;
use crate::real::{cst, Real};

/// Stopping parameters for the per-point OMP solve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OmpParams {
    /// Maximum number of selected atoms; defaults to the assumed subspace
    /// dimension.
    pub k_max: usize,
    /// Relative residual threshold.
    pub residual_tol: f64,
}

impl OmpParams {
    pub fn for_dim(dim: usize) -> Self {
        Self {
            k_max: dim,
            residual_tol: 1e-6,
        }
    }
}

/// Self-expressive coefficients by orthogonal matching pursuit.
///
/// Every point is greedily decomposed over the dictionary of all other
/// points (self excluded): atoms are selected by maximal absolute correlation
/// against unit-normalized candidates, coefficients are refit by least
/// squares on the original vectors after every selection, and the loop stops
/// at `k_max` atoms or once the residual falls below
/// `residual_tol * |x_j|`. Row j of the result holds the coefficients of
/// point j; residual norms are nonincreasing across iterations.
pub fn ssc_omp<T: Real>(points: &Matrix<T>, k_max: usize, residual_tol: T) -> Result<Matrix<T>> {
    let m = points.rows();
    assert!(m >= 2, "need at least two points");
    assert!(k_max >= 1, "k_max must be >= 1");

    let norms: Vec<T> = (0..m).map(|i| vec_norm(points.row(i))).collect();
    if let Some(bad) = norms.iter().position(|&n| n <= T::zero()) {
        return Err(Error::DegenerateAtom { index: bad });
    }
    let unit: Vec<Vec<T>> = (0..m)
        .map(|i| points.row(i).iter().map(|&x| x / norms[i]).collect())
        .collect();

    let rows: Vec<Vec<T>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let target = points.row(j);
            let stop = residual_tol * norms[j];
            let mut residual: Vec<T> = target.to_vec();
            let mut support: Vec<usize> = Vec::new();
            let mut coeffs: Vec<T> = Vec::new();

            while support.len() < k_max && vec_norm(&residual) > stop {
                let mut best: Option<(usize, T)> = None;
                for i in 0..m {
                    if i == j || support.contains(&i) {
                        continue;
                    }
                    let corr = vec_dot(&unit[i], &residual).abs();
                    if best.is_none_or(|(_, b)| corr > b) {
                        best = Some((i, corr));
                    }
                }
                let (pick, corr) = best.expect("m >= 2 leaves at least one candidate");
                if corr <= cst::<T>(1e-12) * norms[j] {
                    break; // nothing correlates; e.g. all remaining atoms orthogonal
                }
                support.push(pick);

                // Least-squares refit on the original selected points.
                let cols = support.len();
                let mut dictionary = Matrix::zeros(points.cols(), cols);
                for (c, &i) in support.iter().enumerate() {
                    for (r, &value) in points.row(i).iter().enumerate() {
                        dictionary.set(r, c, value);
                    }
                }
                let svd = thin_svd(&dictionary).expect("small dense least-squares system");
                let mut projected = svd.left.transpose_matvec(target);
                for (k, p) in projected.iter_mut().enumerate() {
                    let s = svd.singular_values[k];
                    *p = if s > cst::<T>(1e-12)
                        * svd.singular_values[0].max(T::min_positive_value())
                    {
                        *p / s
                    } else {
                        T::zero()
                    };
                }
                coeffs = svd.right.matvec(&projected);
                let approx = dictionary.matvec(&coeffs);
                residual = target.iter().zip(&approx).map(|(&t, &a)| t - a).collect();
            }

            let mut row = vec![T::zero(); m];
            for (&i, &c) in support.iter().zip(&coeffs) {
                row[i] = c;
            }
            row
        })
        .collect();

    let mut out = Matrix::zeros(m, m);
    for (j, row) in rows.into_iter().enumerate() {
        for (i, v) in row.into_iter().enumerate() {
            out.set(j, i, v);
        }
    }
    Ok(out)
}

/// Symmetric affinity |C| + |C|^T from a coefficient matrix.
pub fn affinity_from_coefficients<T: Real>(coefficients: &Matrix<T>) -> Matrix<T> {
    let m = coefficients.rows();
    let mut w = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let v = coefficients.get(i, j).abs() + coefficients.get(j, i).abs();
            w.set(i, j, v);
        }
    }
    w
}

/// Spectral clustering with the symmetric normalized Laplacian.
///
/// Zero-degree vertices get degree 1e-12 to keep the normalization defined.
/// The embedding rows (eigenvectors of the smallest `clusters` eigenvalues,
/// row-normalized, zero rows left as zero) go through k-means with k-means++
/// seeding, at most 100 iterations, best inertia of 10 restarts.
pub fn spectral_cluster<T: Real>(w: &Matrix<T>, clusters: usize, seed: u64) -> Result<Vec<usize>> {
    let m = w.rows();
    assert_eq!(m, w.cols(), "affinity matrix must be square");
    if clusters == 0 || clusters > m {
        return Err(Error::BadClusterCount {
            clusters,
            points: m,
        });
    }

    let floor = cst::<T>(1e-12);
    let inv_sqrt_degree: Vec<T> = (0..m)
        .map(|i| {
            let d: T = w.row(i).iter().copied().sum();
            T::one() / d.max(floor).sqrt()
        })
        .collect();
    let mut laplacian = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let normalized = inv_sqrt_degree[i] * w.get(i, j) * inv_sqrt_degree[j];
            let value = if i == j {
                T::one() - normalized
            } else {
                -normalized
            };
            laplacian.set(i, j, value);
        }
    }

    let eig = sym_eig(&laplacian)?;
    // Eigenvalues are sorted nonincreasing; the embedding uses the smallest.
    let mut embedding = Matrix::zeros(m, clusters);
    for k in 0..clusters {
        let col = eig.eigenvectors.col(m - 1 - k);
        for (i, &v) in col.iter().enumerate() {
            embedding.set(i, k, v);
        }
    }
    for i in 0..m {
        let norm = vec_norm(embedding.row(i));
        if norm > floor {
            for k in 0..clusters {
                embedding.set(i, k, embedding.get(i, k) / norm);
            }
        }
    }

    Ok(kmeans(&embedding, clusters, seed))
}

/// Lloyd's algorithm with k-means++ seeding; deterministic under the seed.
fn kmeans<T: Real>(data: &Matrix<T>, k: usize, seed: u64) -> Vec<usize> {
    const RESTARTS: usize = 10;
    const MAX_ITERS: usize = 100;
    let m = data.rows();
    let dim = data.cols();

    let sq_dist =
        |a: &[T], b: &[T]| -> T { a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum() };

    let mut best: Option<(T, Vec<usize>)> = None;
    for restart in 0..RESTARTS {
        let mut rng = RngState::derive(seed, &[0x6bea_u64, restart as u64]);

        // k-means++ seeding.
        let mut centers: Vec<Vec<T>> = Vec::with_capacity(k);
        centers.push(data.row(rng.uniform_below(m as u64) as usize).to_vec());
        let mut dist_sq: Vec<T> = (0..m).map(|i| sq_dist(data.row(i), &centers[0])).collect();
        while centers.len() < k {
            let total: T = dist_sq.iter().copied().sum();
            let next = if total <= T::zero() {
                // All points coincide with existing centers; spread arbitrarily.
                rng.uniform_below(m as u64) as usize
            } else {
                let mut target = T::from_f64(rng.uniform()).unwrap() * total;
                let mut chosen = m - 1;
                for (i, &d) in dist_sq.iter().enumerate() {
                    if target < d {
                        chosen = i;
                        break;
                    }
                    target -= d;
                }
                chosen
            };
            centers.push(data.row(next).to_vec());
            for i in 0..m {
                let d = sq_dist(data.row(i), centers.last().unwrap());
                if d < dist_sq[i] {
                    dist_sq[i] = d;
                }
            }
        }

        let mut assignment = vec![0usize; m];
        for _ in 0..MAX_ITERS {
            let mut changed = false;
            for i in 0..m {
                let mut best_c = 0usize;
                let mut best_d = T::infinity();
                for (c, center) in centers.iter().enumerate() {
                    let d = sq_dist(data.row(i), center);
                    if d < best_d {
                        best_d = d;
                        best_c = c;
                    }
                }
                if assignment[i] != best_c {
                    assignment[i] = best_c;
                    changed = true;
                }
            }

            // Recompute centers; an emptied cluster steals the point farthest
            // from its current center.
            let mut counts = vec![0usize; k];
            let mut sums = vec![vec![T::zero(); dim]; k];
            for i in 0..m {
                counts[assignment[i]] += 1;
                for (s, &v) in sums[assignment[i]].iter_mut().zip(data.row(i)) {
                    *s += v;
                }
            }
            for c in 0..k {
                if counts[c] == 0 {
                    let far = (0..m)
                        .max_by(|&a, &b| {
                            sq_dist(data.row(a), &centers[assignment[a]])
                                .partial_cmp(&sq_dist(data.row(b), &centers[assignment[b]]))
                                .unwrap()
                        })
                        .unwrap();
                    assignment[far] = c;
                    counts[c] = 1;
                    sums[c] = data.row(far).to_vec();
                    // The donor cluster keeps its remaining mass; exact sums
                    // are restored on the next iteration.
                    changed = true;
                }
            }
            for c in 0..k {
                if counts[c] > 0 {
                    let n = cst::<T>(counts[c] as f64);
                    centers[c] = sums[c].iter().map(|&s| s / n).collect();
                }
            }
            if !changed {
                break;
            }
        }

        let inertia: T = (0..m)
            .map(|i| sq_dist(data.row(i), &centers[assignment[i]]))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, assignment));
        }
    }
    best.expect("at least one restart").1
}

/// Permutation-minimal misclassification rate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClusteringErrorRate {
    pub rate: f64,
    /// Exact brute force over label permutations; `false` means the greedy
    /// approximation used beyond 8 labels.
    pub exact: bool,
}

/// Fraction of points mislabeled under the best relabeling of the predicted
/// clusters. Exact (all permutations) up to 8 labels, greedy matching beyond.
pub fn clustering_error(predicted: &[usize], truth: &[usize]) -> Result<ClusteringErrorRate> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let m = predicted.len();
    assert!(m > 0, "empty labelings");
    let k = predicted.iter().chain(truth).copied().max().unwrap() + 1;

    // Confusion counts.
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &t) in predicted.iter().zip(truth) {
        confusion[p][t] += 1;
    }

    if k <= 8 {
        let mut perm: Vec<usize> = (0..k).collect();
        let mut best_matches = 0usize;
        permute(&mut perm, 0, &mut |perm| {
            let matches: usize = (0..k).map(|p| confusion[p][perm[p]]).sum();
            if matches > best_matches {
                best_matches = matches;
            }
        });
        Ok(ClusteringErrorRate {
            rate: 1.0 - best_matches as f64 / m as f64,
            exact: true,
        })
    } else {
        // Greedy: repeatedly match the heaviest remaining (pred, true) cell.
        let mut used_p = vec![false; k];
        let mut used_t = vec![false; k];
        let mut matched = 0usize;
        for _ in 0..k {
            let mut best = (0usize, 0usize, 0usize);
            for p in 0..k {
                if used_p[p] {
                    continue;
                }
                for t in 0..k {
                    if !used_t[t] && confusion[p][t] > best.2 {
                        best = (p, t, confusion[p][t]);
                    }
                }
            }
            if best.2 == 0 {
                break;
            }
            used_p[best.0] = true;
            used_t[best.1] = true;
            matched += best.2;
        }
        Ok(ClusteringErrorRate {
            rate: 1.0 - matched as f64 / m as f64,
            exact: false,
        })
    }
}

fn permute<F: FnMut(&[usize])>(perm: &mut Vec<usize>, at: usize, visit: &mut F) {
    if at == perm.len() {
        visit(perm);
        return;
    }
    for i in at..perm.len() {
        perm.swap(at, i);
        permute(perm, at + 1, visit);
        perm.swap(at, i);
    }
}

/// Wall-clock milliseconds per pipeline phase.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub project_ms: f64,
    pub coefficients_ms: f64,
    pub spectral_ms: f64,
}

/// Outcome of the full clustering pipeline.
#[derive(Debug, Clone)]
pub struct ClusteringResult<T> {
    pub labels: Vec<usize>,
    pub coefficients: Matrix<T>,
    pub affinity: Matrix<T>,
    pub error: Option<ClusteringErrorRate>,
    pub timings: PhaseTimings,
}

/// End-to-end clustering: optional compression, OMP coefficients, spectral
/// clustering, and the error against ground truth when labels are supplied.
pub fn cluster<T: Real>(
    data: &Matrix<T>,
    clusters: usize,
    truth: Option<&[usize]>,
    projector: Option<&JlProjector<T>>,
    omp: OmpParams,
    seed: u64,
) -> Result<ClusteringResult<T>> {
    let mut timings = PhaseTimings::default();

    let working = match projector {
        None => data.clone(),
        Some(p) => {
            let start = Instant::now();
            let compressed = p.project_rows(data)?;
            timings.project_ms = start.elapsed().as_secs_f64() * 1e3;
            compressed
        }
    };

    let start = Instant::now();
    let coefficients = ssc_omp(&working, omp.k_max, cst::<T>(omp.residual_tol))?;
    timings.coefficients_ms = start.elapsed().as_secs_f64() * 1e3;

    let start = Instant::now();
    let affinity = affinity_from_coefficients(&coefficients);
    let labels = spectral_cluster(&affinity, clusters, seed)?;
    timings.spectral_ms = start.elapsed().as_secs_f64() * 1e3;

    let error = match truth {
        Some(t) => Some(clustering_error(&labels, t)?),
        None => None,
    };
    Ok(ClusteringResult {
        labels,
        coefficients,
        affinity,
        error,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::JlFamily;
    use crate::synth::{generate_uos, UosSpec};

    #[test]
    fn orthogonal_points_get_empty_supports() {
        let points = Matrix::<f64>::identity(4);
        let c = ssc_omp(&points, 2, 1e-6).unwrap();
        assert!(c.max_abs() == 0.0, "no atom correlates with any other");
    }

    #[test]
    fn duplicated_direction_is_recovered_exactly() {
        // Point 2 is 0.5 * point 0.
        let points = Matrix::<f64>::from_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let c = ssc_omp(&points, 2, 1e-6).unwrap();
        assert!((c.get(2, 0) - 0.5).abs() < 1e-12);
        assert_eq!(c.get(2, 1), 0.0);
        assert_eq!(c.get(2, 2), 0.0);
    }

    #[test]
    fn residuals_are_nonincreasing() {
        let spec = UosSpec {
            ambient_dim: 20,
            dims: vec![3, 3],
            points_per_subspace: 15,
            noise_sigma: 0.05,
            seed: 61,
        };
        let ds = generate_uos::<f64>(&spec).unwrap();
        // Track residual decay by running OMP at increasing k_max: the final
        // residual with k atoms bounds the one with k+1.
        let m = ds.data.rows();
        let mut previous = vec![f64::INFINITY; m];
        for k_max in 1..=4 {
            let c = ssc_omp(&ds.data, k_max, 0.0).unwrap();
            for j in 0..m {
                let approx: Vec<f64> = (0..ds.data.cols())
                    .map(|col| {
                        (0..m)
                            .map(|i| c.get(j, i) * ds.data.get(i, col))
                            .sum::<f64>()
                    })
                    .collect();
                let resid: f64 = ds
                    .data
                    .row(j)
                    .iter()
                    .zip(&approx)
                    .map(|(&t, &a)| (t - a) * (t - a))
                    .sum::<f64>()
                    .sqrt();
                assert!(resid <= previous[j] + 1e-9, "point {j} at k_max {k_max}");
                previous[j] = resid;
            }
        }
    }

    #[test]
    fn subspace_preserving_property_holds_on_clean_data() {
        let mut good_points = 0usize;
        let mut total = 0usize;
        for seed in 0..20u64 {
            let spec = UosSpec {
                ambient_dim: 40,
                dims: vec![3, 3],
                points_per_subspace: 20,
                noise_sigma: 0.0,
                seed: 70 + seed,
            };
            let ds = generate_uos::<f64>(&spec).unwrap();
            let c = ssc_omp(&ds.data, 3, 1e-6).unwrap();
            for j in 0..ds.data.rows() {
                total += 1;
                let own = ds.labels[j];
                let pure = (0..ds.data.rows()).all(|i| c.get(j, i) == 0.0 || ds.labels[i] == own);
                if pure {
                    good_points += 1;
                }
            }
        }
        let fraction = good_points as f64 / total as f64;
        assert!(fraction >= 0.98, "subspace-preserving fraction {fraction}");
    }

    #[test]
    fn zero_norm_point_is_rejected() {
        let points = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            ssc_omp(&points, 1, 1e-6),
            Err(Error::DegenerateAtom { index: 1 })
        ));
    }

    #[test]
    fn disconnected_blocks_split_perfectly() {
        let mut w = Matrix::<f64>::zeros(6, 6);
        for block in [&[0usize, 1, 2][..], &[3, 4, 5][..]] {
            for &i in block {
                for &j in block {
                    if i != j {
                        w.set(i, j, 1.0);
                    }
                }
            }
        }
        let labels = spectral_cluster(&w, 2, 1).unwrap();
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[0], labels[2]);
        assert_eq!(labels[3], labels[4]);
        assert_eq!(labels[3], labels[5]);
        assert_ne!(labels[0], labels[3]);
    }

    #[test]
    fn all_ones_affinity_is_one_cluster() {
        let mut w = Matrix::<f64>::zeros(5, 5);
        for i in 0..5 {
            for j in 0..5 {
                w.set(i, j, 1.0);
            }
        }
        let labels = spectral_cluster(&w, 1, 2).unwrap();
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn planted_blocks_with_noise_recover() {
        let mut rng = RngState::new(3);
        for seed in 0..10u64 {
            let m = 30;
            let truth: Vec<usize> = (0..m).map(|i| i / 10).collect();
            let mut w = Matrix::<f64>::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    let within = truth[i] == truth[j];
                    let noise = rng.uniform() < 0.05;
                    if within != noise {
                        w.set(i, j, 1.0);
                    }
                }
            }
            // Symmetrize the noisy graph.
            let w = w.add(&w.transpose()).scale(0.5);
            let labels = spectral_cluster(&w, 3, seed).unwrap();
            let err = clustering_error(&labels, &truth).unwrap();
            assert_eq!(err.rate, 0.0, "seed {seed}");
        }
    }

    #[test]
    fn bad_cluster_count_is_rejected() {
        let w = Matrix::<f64>::zeros(3, 3);
        assert!(matches!(
            spectral_cluster(&w, 0, 0),
            Err(Error::BadClusterCount { .. })
        ));
        assert!(matches!(
            spectral_cluster(&w, 4, 0),
            Err(Error::BadClusterCount { .. })
        ));
    }

    #[test]
    fn error_metric_examples() {
        assert_eq!(
            clustering_error(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap().rate,
            0.0
        );
        assert_eq!(
            clustering_error(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap().rate,
            0.0
        );
        assert_eq!(
            clustering_error(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap().rate,
            0.5
        );
        assert!(matches!(
            clustering_error(&[0, 1], &[0, 1, 0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn error_metric_is_permutation_invariant() {
        let mut rng = RngState::new(91);
        let pred: Vec<usize> = (0..40).map(|_| rng.uniform_below(4) as usize).collect();
        let truth: Vec<usize> = (0..40).map(|_| rng.uniform_below(4) as usize).collect();
        let base = clustering_error(&pred, &truth).unwrap().rate;
        let relabel = [2usize, 3, 0, 1];
        let shuffled: Vec<usize> = pred.iter().map(|&p| relabel[p]).collect();
        assert_eq!(clustering_error(&shuffled, &truth).unwrap().rate, base);
        let shuffled_truth: Vec<usize> = truth.iter().map(|&t| relabel[t]).collect();
        assert_eq!(clustering_error(&pred, &shuffled_truth).unwrap().rate, base);
    }

    #[test]
    fn greedy_mode_engages_beyond_eight_labels() {
        let pred: Vec<usize> = (0..10).collect();
        let truth: Vec<usize> = (0..10).collect();
        let e = clustering_error(&pred, &truth).unwrap();
        assert_eq!(e.rate, 0.0);
        assert!(!e.exact);
    }

    #[test]
    fn two_points_two_clusters() {
        let data = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let result = cluster(
            &data,
            2,
            Some(&[0, 1]),
            None,
            OmpParams {
                k_max: 1,
                residual_tol: 1e-6,
            },
            5,
        )
        .unwrap();
        assert_eq!(result.error.unwrap().rate, 0.0);
    }

    #[test]
    fn pipeline_recovers_clean_clusters_and_compression_stays_close() {
        let spec = UosSpec {
            ambient_dim: 100,
            dims: vec![4, 4, 4],
            points_per_subspace: 25,
            noise_sigma: 0.0,
            seed: 80,
        };
        let ds = generate_uos::<f64>(&spec).unwrap();
        let omp = OmpParams {
            k_max: 4,
            residual_tol: 1e-6,
        };
        let plain = cluster(&ds.data, 3, Some(&ds.labels), None, omp, 7).unwrap();
        assert!(plain.error.unwrap().rate <= 0.02, "plain {:?}", plain.error);

        let p = JlProjector::<f64>::new(JlFamily::Gaussian, 100, 25, 99).unwrap();
        let compressed = cluster(&ds.data, 3, Some(&ds.labels), Some(&p), omp, 7).unwrap();
        assert!(
            compressed.error.unwrap().rate <= plain.error.unwrap().rate + 0.05,
            "compressed {:?}",
            compressed.error
        );
        assert!(compressed.timings.project_ms > 0.0);
    }
}
