//! Maximum-likelihood active subspace detection, with a compressed variant
//! and the closed-form correct-probability lower bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::vec_norm;
use crate::projection::JlProjector;
use crate::real::Real;
use crate::subspace::Subspace;

/// Candidate subspaces for the detection hypotheses.
#[derive(Debug, Clone)]
pub struct SubspaceBank<T> {
    subspaces: Vec<Subspace<T>>,
}

impl<T: Real> SubspaceBank<T> {
    pub fn new(subspaces: Vec<Subspace<T>>) -> Result<Self> {
        let first = subspaces.first().ok_or(Error::EmptyBank)?;
        let ambient = first.ambient_dim();
        for s in &subspaces {
            if s.ambient_dim() != ambient {
                return Err(Error::AmbientMismatch {
                    left: ambient,
                    right: s.ambient_dim(),
                });
            }
        }
        Ok(Self { subspaces })
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspaces[0].ambient_dim()
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn subspaces(&self) -> &[Subspace<T>] {
        &self.subspaces
    }
}

/// Index of the hypothesis maximizing the projection energy |U_i^T x|.
///
/// Ties break toward the smallest index; under the Gaussian signal model a
/// tie is a measure-zero event, and determinism is preferred. The decision is
/// invariant to positive scaling of x and to the choice of orthonormal basis
/// for each subspace.
pub fn detect<T: Real>(bank: &SubspaceBank<T>, x: &[T]) -> Result<usize> {
    assert_eq!(
        x.len(),
        bank.ambient_dim(),
        "observation length must match the bank"
    );
    if vec_norm(x) <= T::zero() {
        return Err(Error::ZeroVector);
    }
    let mut best = 0usize;
    let mut best_energy = T::neg_infinity();
    for (i, s) in bank.subspaces.iter().enumerate() {
        let energy = vec_norm(&s.project_coeffs(x));
        if energy > best_energy {
            best_energy = energy;
            best = i;
        }
    }
    Ok(best)
}

/// Bank of projected subspaces V_i = orthonormalize(Phi U_i).
///
/// Building it once amortizes the projection across many detections with the
/// same (bank, projector) pair.
pub fn compress_bank<T: Real>(
    bank: &SubspaceBank<T>,
    projector: &JlProjector<T>,
) -> Result<SubspaceBank<T>> {
    let compressed: Vec<Subspace<T>> = bank
        .subspaces
        .iter()
        .map(|s| projector.project_subspace(s).map(|p| p.image))
        .collect::<Result<_>>()?;
    SubspaceBank::new(compressed)
}

/// One-shot compressed detection: project the bank and the observation, then
/// run [`detect`] in the reduced space.
pub fn detect_compressed<T: Real>(
    bank: &SubspaceBank<T>,
    x: &[T],
    projector: &JlProjector<T>,
) -> Result<usize> {
    let compressed = compress_bank(bank, projector)?;
    let y = projector.project_vector(x)?;
    detect(&compressed, &y)
}

/// Correct-probability lower bound for the ML detector under the Gaussian
/// signal model with noise eigenvalue bound delta.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionBound {
    pub affinity: f64,
    pub noise_bound: f64,
    pub dim: usize,
    /// Number of competing hypotheses (L - 1).
    pub competing: usize,
    /// Exponent C(aff, delta) in the e^{-C d} failure term.
    pub exponent: f64,
    /// Lower bound on the correct probability, clamped into [0, 1].
    pub probability_lower_bound: f64,
    /// True when the bound carries no information (the unclamped value is
    /// nonpositive, or the exponent's base went negative).
    pub vacuous: bool,
}

/// Evaluates the detection bound
/// C = (1/8) base^2 / (4 + base) with base = (1 - aff^2/d - delta)/(1 + delta) - 8/d
/// and P >= 1 - 4 * competing * e^{-C d}.
pub fn detection_bound(
    affinity: f64,
    noise_bound: f64,
    dim: usize,
    competing: usize,
) -> Result<DetectionBound> {
    if !(0.0..).contains(&affinity) || affinity * affinity > dim as f64 * (1.0 + 1e-12) {
        return Err(Error::BadAffinity { aff: affinity, dim });
    }
    if noise_bound < 0.0 {
        return Err(Error::BadConfig {
            msg: "noise eigenvalue bound must be >= 0".into(),
        });
    }
    let d = dim as f64;
    let base = (1.0 - affinity * affinity / d - noise_bound) / (1.0 + noise_bound) - 8.0 / d;
    let exponent = 0.125 * base * base / (4.0 + base);
    let raw = 1.0 - 4.0 * competing as f64 * (-exponent * d).exp();
    let vacuous = base < 0.0 || raw <= 0.0;
    Ok(DetectionBound {
        affinity,
        noise_bound,
        dim,
        competing,
        exponent,
        probability_lower_bound: raw.clamp(0.0, 1.0),
        vacuous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{orthonormalize, Matrix, RngState};
    use crate::projection::JlFamily;
    use crate::synth::random_rotation;

    fn orthogonal_bank(ambient: usize, dim: usize, count: usize, seed: u64) -> SubspaceBank<f64> {
        let mut rng = RngState::new(seed);
        let q = random_rotation::<f64>(ambient, &mut rng);
        let subspaces = (0..count)
            .map(|l| {
                let mut m = Matrix::zeros(ambient, dim);
                for j in 0..dim {
                    for i in 0..ambient {
                        m.set(i, j, q.get(i, l * dim + j));
                    }
                }
                Subspace::new(m).unwrap()
            })
            .collect();
        SubspaceBank::new(subspaces).unwrap()
    }

    #[test]
    fn member_of_orthogonal_bank_is_detected() {
        let bank = orthogonal_bank(24, 3, 4, 1);
        let mut rng = RngState::new(2);
        for expected in 0..4 {
            let coeffs: Vec<f64> = rng.gaussian_vec(3);
            let x = bank.subspaces()[expected].basis().matvec(&coeffs);
            assert_eq!(detect(&bank, &x).unwrap(), expected);
        }
    }

    #[test]
    fn two_axis_example() {
        let bank = SubspaceBank::new(vec![
            Subspace::<f64>::coordinate(2, &[0]).unwrap(),
            Subspace::<f64>::coordinate(2, &[1]).unwrap(),
        ])
        .unwrap();
        assert_eq!(detect(&bank, &[1.0, 0.5]).unwrap(), 0);
        assert_eq!(detect(&bank, &[0.2, 0.9]).unwrap(), 1);
    }

    #[test]
    fn empty_bank_and_zero_vector_are_rejected() {
        assert!(matches!(
            SubspaceBank::<f64>::new(vec![]),
            Err(Error::EmptyBank)
        ));
        let bank = orthogonal_bank(8, 2, 2, 3);
        assert!(matches!(detect(&bank, &[0.0; 8]), Err(Error::ZeroVector)));
    }

    #[test]
    fn detection_is_scale_and_basis_invariant() {
        let bank = orthogonal_bank(16, 2, 3, 4);
        let mut rng = RngState::new(5);
        let x: Vec<f64> = rng.gaussian_vec(16);
        let base = detect(&bank, &x).unwrap();
        for c in [0.1, 3.0, 1e6] {
            let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
            assert_eq!(detect(&bank, &scaled).unwrap(), base);
        }
        // Replace each basis U_i by U_i R with R orthogonal.
        let remixed: Vec<Subspace<f64>> = bank
            .subspaces()
            .iter()
            .map(|s| {
                let r = orthonormalize(&Matrix::from_raw(2, 2, rng.gaussian_vec(4))).unwrap();
                Subspace::new(s.basis().matmul(&r)).unwrap()
            })
            .collect();
        let remixed_bank = SubspaceBank::new(remixed).unwrap();
        assert_eq!(detect(&remixed_bank, &x).unwrap(), base);
    }

    #[test]
    fn restriction_projector_preserves_decisions() {
        let bank = orthogonal_bank(12, 2, 3, 6);
        // Inflate into R^20 with zeros beyond coordinate 12.
        let inflated: Vec<Subspace<f64>> = bank
            .subspaces()
            .iter()
            .map(|s| {
                let mut m = Matrix::zeros(20, 2);
                for i in 0..12 {
                    for j in 0..2 {
                        m.set(i, j, s.basis().get(i, j));
                    }
                }
                Subspace::new(m).unwrap()
            })
            .collect();
        let big_bank = SubspaceBank::new(inflated).unwrap();
        let p = JlProjector::<f64>::new(JlFamily::Restriction, 20, 12, 0).unwrap();
        let mut rng = RngState::new(7);
        for _ in 0..20 {
            let mut x = vec![0.0; 20];
            for e in x.iter_mut().take(12) {
                *e = rng.gaussian();
            }
            let plain = detect(&big_bank, &x).unwrap();
            let compressed = detect_compressed(&big_bank, &x, &p).unwrap();
            assert_eq!(plain, compressed);
        }
    }

    #[test]
    fn bound_matches_hand_arithmetic() {
        // d = 8: base hits exactly zero, the exponent vanishes, and the bound
        // carries no information.
        let b = detection_bound(0.0, 0.0, 8, 1).unwrap();
        assert_eq!(b.exponent, 0.0);
        assert!(b.vacuous);
        assert_eq!(b.probability_lower_bound, 0.0);

        // d = 40: base = 0.8, C = 0.64 / (8 * 4.8) = 1/60.
        let b = detection_bound(0.0, 0.0, 40, 1).unwrap();
        assert!(
            (b.exponent - 1.0 / 60.0).abs() < 1e-15,
            "exponent {}",
            b.exponent
        );

        // aff^2 = d: identical subspaces, undetectable.
        let b = detection_bound(2.0, 0.0, 4, 1).unwrap();
        assert!(b.vacuous);
    }

    #[test]
    fn bound_is_monotone_where_informative() {
        // C decreases as affinity grows and as the noise bound grows, on a
        // grid where the base stays positive.
        let mut prev = f64::INFINITY;
        for aff in [0.0, 0.5, 1.0, 1.5] {
            let b = detection_bound(aff, 0.0, 400, 1).unwrap();
            assert!(b.exponent < prev);
            prev = b.exponent;
        }
        let mut prev = f64::INFINITY;
        for delta in [0.0, 0.01, 0.05, 0.1] {
            let b = detection_bound(0.0, delta, 400, 1).unwrap();
            assert!(b.exponent < prev);
            prev = b.exponent;
        }
    }

    #[test]
    fn bad_affinity_is_rejected() {
        assert!(matches!(
            detection_bound(-0.1, 0.0, 8, 1),
            Err(Error::BadAffinity { .. })
        ));
        assert!(matches!(
            detection_bound(3.0, 0.0, 8, 1),
            Err(Error::BadAffinity { .. })
        ));
    }
}
