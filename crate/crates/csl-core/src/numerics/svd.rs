//! Thin singular value decomposition via one-sided Jacobi.
//!
//! One-sided Jacobi orthogonalizes the columns of the working matrix with
//! plane rotations accumulated into V. It delivers high relative accuracy for
//! small singular values, which downstream angle extraction depends on
//! (singular values become cosines of nearly right angles).

use crate::error::{Error, Result};
use crate::numerics::{vec_dot, vec_norm, Matrix};
use crate::real::{cst, Real};

const MAX_SWEEPS: usize = 100;

/// Thin SVD `A = left * diag(singular_values) * right^T`.
#[derive(Debug, Clone)]
pub struct SvdResult<T> {
    /// m x k with orthonormal columns, k = min(m, n).
    pub left: Matrix<T>,
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<T>,
    /// n x k with orthonormal columns.
    pub right: Matrix<T>,
}

impl<T: Real> SvdResult<T> {
    /// Reconstructs `left * diag(sigma) * right^T`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let (m, k) = (self.left.rows(), self.singular_values.len());
        let n = self.right.rows();
        let mut out = Matrix::zeros(m, n);
        for j in 0..k {
            let s = self.singular_values[j];
            if s == T::zero() {
                continue;
            }
            for r in 0..m {
                let lr = self.left.get(r, j) * s;
                for c in 0..n {
                    out.set(r, c, out.get(r, c) + lr * self.right.get(c, j));
                }
            }
        }
        out
    }
}

/// Computes the thin SVD of `m` by one-sided Jacobi with cyclic sweeps.
pub fn thin_svd<T: Real>(m: &Matrix<T>) -> Result<SvdResult<T>> {
    let (rows, cols) = (m.rows(), m.cols());
    assert!(
        rows >= 1 && cols >= 1,
        "thin_svd requires a nonempty matrix"
    );

    // Column-major working copy; rotations touch whole columns.
    let mut work: Vec<Vec<T>> = (0..cols).map(|j| m.col(j)).collect();
    let mut v: Vec<Vec<T>> = (0..cols)
        .map(|j| {
            let mut e = vec![T::zero(); cols];
            e[j] = T::one();
            e
        })
        .collect();

    let tol = T::epsilon() * cst::<T>(cols.max(rows) as f64);
    // Columns this small relative to the input are numerically zero; pairs
    // involving them are treated as orthogonal. Without the floor, a forced
    // zero column (cols > rows) keeps correlation +-1 and the sweep cycles.
    let zero_floor = {
        let f = m.frobenius_norm() * T::epsilon();
        f * f
    };
    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (cp, cq) = {
                    let (lo, hi) = work.split_at_mut(q);
                    (&mut lo[p], &mut hi[0])
                };
                let app = vec_dot(cp, cp);
                let aqq = vec_dot(cq, cq);
                let apq = vec_dot(cp, cq);
                if app <= zero_floor || aqq <= zero_floor || apq.abs() <= tol * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (cst::<T>(2.0) * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    T::one() / (tau - (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for i in 0..rows {
                    let a = cp[i];
                    let b = cq[i];
                    cp[i] = c * a - s * b;
                    cq[i] = s * a + c * b;
                }
                let (vp, vq) = {
                    let (lo, hi) = v.split_at_mut(q);
                    (&mut lo[p], &mut hi[0])
                };
                for i in 0..cols {
                    let a = vp[i];
                    let b = vq[i];
                    vp[i] = c * a - s * b;
                    vq[i] = s * a + c * b;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    // Singular values are the column norms; sort nonincreasing.
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<T> = work.iter().map(|c| vec_norm(c)).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let k = rows.min(cols);
    let sigma_max = norms[order[0]];
    let drop_tol = sigma_max * T::epsilon() * cst::<T>(rows.max(cols) as f64);

    let mut left_cols: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut singular_values = Vec::with_capacity(k);
    for &j in order.iter().take(k) {
        let norm = norms[j];
        if norm > drop_tol && norm > T::zero() {
            singular_values.push(norm);
            left_cols.push(work[j].iter().map(|&e| e / norm).collect());
        } else {
            singular_values.push(norm);
            left_cols.push(Vec::new()); // completed below
        }
    }
    complete_orthonormal(&mut left_cols, rows);

    let mut left = Matrix::zeros(rows, k);
    let mut right = Matrix::zeros(cols, k);
    for (jj, col) in left_cols.iter().enumerate() {
        for (i, &e) in col.iter().enumerate() {
            left.set(i, jj, e);
        }
    }
    for (jj, &j) in order.iter().take(k).enumerate() {
        for i in 0..cols {
            right.set(i, jj, v[j][i]);
        }
    }
    Ok(SvdResult {
        left,
        singular_values,
        right,
    })
}

/// Fills empty slots with unit vectors orthogonal to every filled column.
fn complete_orthonormal<T: Real>(cols: &mut [Vec<T>], dim: usize) {
    for idx in 0..cols.len() {
        if !cols[idx].is_empty() {
            continue;
        }
        let mut best: Option<(T, Vec<T>)> = None;
        for cand in 0..dim {
            let mut v = vec![T::zero(); dim];
            v[cand] = T::one();
            for other in cols.iter().filter(|c| !c.is_empty()) {
                let coeff = vec_dot(other, &v);
                for (ve, &oe) in v.iter_mut().zip(other) {
                    *ve -= coeff * oe;
                }
            }
            let norm = vec_norm(&v);
            if best.as_ref().is_none_or(|(n, _)| norm > *n) {
                best = Some((norm, v));
            }
            if norm > cst(0.5) {
                break;
            }
        }
        let (norm, mut v) = best.expect("dim > 0");
        debug_assert!(norm > T::zero());
        for e in v.iter_mut() {
            *e /= norm;
        }
        cols[idx] = v;
    }
}
