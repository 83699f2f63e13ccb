//! Symmetric eigendecomposition via cyclic Jacobi with threshold sweeps.

use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::real::{cst, Real};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct EigResult<T> {
    /// Sorted nonincreasing.
    pub eigenvalues: Vec<T>,
    /// Unit-norm eigenvector columns, ordered to match `eigenvalues`.
    pub eigenvectors: Matrix<T>,
}

/// Computes all eigenpairs of a symmetric matrix.
///
/// Input symmetry is verified to within 1e-10 relative to the matrix scale,
/// then the working copy is symmetrized exactly so rotations stay consistent.
pub fn sym_eig<T: Real>(m: &Matrix<T>) -> Result<EigResult<T>> {
    let n = m.rows();
    assert_eq!(n, m.cols(), "sym_eig requires a square matrix");

    let scale = m.max_abs();
    let sym_tol = cst::<T>(1e-10) * scale.max(T::one());
    let mut max_asym = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            max_asym = max_asym.max((m.get(i, j) - m.get(j, i)).abs());
        }
    }
    if max_asym > sym_tol {
        return Err(Error::NotSymmetric {
            max_asym: max_asym.to_f64().unwrap_or(f64::NAN),
        });
    }

    let half = cst::<T>(0.5);
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, (m.get(i, j) + m.get(j, i)) * half);
        }
    }
    let mut v = Matrix::identity(n);

    let off_tol = T::epsilon() * a.frobenius_norm().max(T::min_positive_value());
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a.get(p, q) * a.get(p, q);
            }
        }
        if off.sqrt() <= off_tol {
            converged = true;
            break;
        }
        // Threshold for this sweep: skip rotations on entries already tiny
        // relative to the current off-diagonal mass.
        let thresh = (off.sqrt() / cst::<T>((n * n) as f64)).max(off_tol / cst::<T>(n as f64));
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.abs() <= thresh * cst(1e-3) {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let tau = (aqq - app) / (cst::<T>(2.0) * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    T::one() / (tau - (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, T::zero());
                a.set(q, p, T::zero());
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, c * aip - s * aiq);
                    a.set(p, i, c * aip - s * aiq);
                    a.set(i, q, s * aip + c * aiq);
                    a.set(q, i, s * aip + c * aiq);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    if !converged {
        // Final check: the loop may have exhausted sweeps just before the test.
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a.get(p, q) * a.get(p, q);
            }
        }
        if off.sqrt() > off_tol {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).partial_cmp(&a.get(i, i)).unwrap());
    let eigenvalues: Vec<T> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (jj, &j) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors.set(i, jj, v.get(i, j));
        }
    }
    Ok(EigResult {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngState;

    fn check_invariants(m: &Matrix<f64>, eig: &EigResult<f64>) {
        let n = m.rows();
        let scale = m.frobenius_norm().max(1e-300);
        assert!(eig.eigenvectors.orthonormality_defect() < 1e-10);
        for w in eig.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for j in 0..n {
            let v = eig.eigenvectors.col(j);
            let mv = m.matvec(&v);
            let lv: Vec<f64> = v.iter().map(|e| e * eig.eigenvalues[j]).collect();
            let err = mv
                .iter()
                .zip(&lv)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-8 * scale, "eigenpair {j} residual {err}");
        }
        let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
        let sum: f64 = eig.eigenvalues.iter().sum();
        assert!((trace - sum).abs() <= 1e-8 * scale);
    }

    #[test]
    fn diagonal() {
        let m = Matrix::<f64>::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let eig = sym_eig(&m).unwrap();
        assert!((eig.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(eig.eigenvectors.get(0, 0).abs() > 0.999);
        check_invariants(&m, &eig);
    }

    #[test]
    fn exchange_matrix_closed_form() {
        let m = Matrix::<f64>::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let eig = sym_eig(&m).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-14);
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        for (j, expect) in [
            (0usize, [inv_sqrt2, inv_sqrt2]),
            (1, [inv_sqrt2, -inv_sqrt2]),
        ] {
            let v = eig.eigenvectors.col(j);
            let flip = if v[0] * expect[0] + v[1] * expect[1] < 0.0 {
                -1.0
            } else {
                1.0
            };
            assert!((flip * v[0] - expect[0]).abs() < 1e-12);
            assert!((flip * v[1] - expect[1]).abs() < 1e-12);
        }
        check_invariants(&m, &eig);
    }

    #[test]
    fn random_symmetric_reconstructs() {
        let mut rng = RngState::new(21);
        for n in [3usize, 5, 9] {
            let raw: Vec<f64> = rng.gaussian_vec(n * n);
            let g = Matrix::from_raw(n, n, raw);
            let m = g.add(&g.transpose()).scale(0.5);
            let eig = sym_eig(&m).unwrap();
            check_invariants(&m, &eig);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]).unwrap();
        assert!(matches!(sym_eig(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn one_by_one() {
        let m = Matrix::<f64>::from_rows(&[vec![-4.0]]).unwrap();
        let eig = sym_eig(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![-4.0]);
    }
}
