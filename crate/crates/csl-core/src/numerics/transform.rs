//! Fast orthonormal transforms on power-of-two lengths.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{cst, Real};

fn check_pow2(len: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::LengthNotPowerOfTwo { len });
    }
    Ok(())
}

/// Normalized fast Walsh-Hadamard transform.
///
/// Uses the natural (Hadamard) ordering H[j][k] = (-1)^popcount(j & k), scaled
/// by 1/sqrt(len) so the transform is orthonormal and involutive. Runs in
/// O(len log len) with in-place butterflies.
pub fn fwht<T: Real>(x: &[T]) -> Result<Vec<T>> {
    check_pow2(x.len())?;
    let mut y = x.to_vec();
    fwht_in_place(&mut y);
    Ok(y)
}

pub(crate) fn fwht_in_place<T: Real>(y: &mut [T]) {
    let n = y.len();
    let mut h = 1;
    while h < n {
        let mut i = 0;
        while i < n {
            for j in i..i + h {
                let a = y[j];
                let b = y[j + h];
                y[j] = a + b;
                y[j + h] = a - b;
            }
            i += h * 2;
        }
        h *= 2;
    }
    let scale = T::one() / cst::<T>(n as f64).sqrt();
    for e in y.iter_mut() {
        *e *= scale;
    }
}

/// Normalized discrete Fourier transform of a real vector.
///
/// Coefficient k is n^{-1/2} * sum_j x_j e^{-2 pi i j k / n}; the scaling makes
/// the transform unitary. Radix-2 Cooley-Tukey, O(n log n).
pub fn dft<T: Real>(x: &[T]) -> Result<Vec<Complex<T>>> {
    check_pow2(x.len())?;
    let n = x.len();
    let mut y: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();

    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            y.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let angle = -cst::<T>(2.0) * T::PI() / cst::<T>(len as f64);
        let w_len = Complex::new(angle.cos(), angle.sin());
        let mut start = 0;
        while start < n {
            let mut w = Complex::new(T::one(), T::zero());
            for k in 0..len / 2 {
                let a = y[start + k];
                let b = y[start + k + len / 2] * w;
                y[start + k] = a + b;
                y[start + k + len / 2] = a - b;
                w *= w_len;
            }
            start += len;
        }
        len *= 2;
    }

    let scale = T::one() / cst::<T>(n as f64).sqrt();
    for e in y.iter_mut() {
        *e = Complex::new(e.re * scale, e.im * scale);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngState;

    fn dense_hadamard_apply(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let scale = 1.0 / (n as f64).sqrt();
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let sign = if (j & k).count_ones() % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        sign * x[k]
                    })
                    .sum::<f64>()
                    * scale
            })
            .collect()
    }

    fn naive_dft(x: &[f64]) -> Vec<Complex<f64>> {
        let n = x.len();
        let scale = 1.0 / (n as f64).sqrt();
        (0..n)
            .map(|k| {
                let mut acc = Complex::new(0.0, 0.0);
                for (j, &v) in x.iter().enumerate() {
                    let phase = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                    acc += Complex::new(phase.cos(), phase.sin()) * v;
                }
                acc * scale
            })
            .collect()
    }

    #[test]
    fn fwht_impulse_and_constant() {
        let y = fwht(&[1.0f64, 0.0, 0.0, 0.0]).unwrap();
        for &v in &y {
            assert!((v - 0.5).abs() < 1e-15);
        }
        let y = fwht(&[1.0f64, 1.0, 1.0, 1.0]).unwrap();
        assert!((y[0] - 2.0).abs() < 1e-15);
        for &v in &y[1..] {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn dft_impulse_and_constant() {
        let y = dft(&[1.0f64, 0.0, 0.0, 0.0]).unwrap();
        for c in &y {
            assert!((c.re - 0.5).abs() < 1e-15 && c.im.abs() < 1e-15);
        }
        let y = dft(&[1.0f64, 1.0, 1.0, 1.0]).unwrap();
        assert!((y[0].re - 2.0).abs() < 1e-14);
        for c in &y[1..] {
            assert!(c.norm() < 1e-14);
        }
    }

    #[test]
    fn fwht_matches_dense_oracle_all_small_lengths() {
        let mut rng = RngState::new(11);
        for k in 1..=8 {
            let n = 1usize << k;
            for _ in 0..100 {
                let x: Vec<f64> = rng.gaussian_vec(n);
                let fast = fwht(&x).unwrap();
                let dense = dense_hadamard_apply(&x);
                for (a, b) in fast.iter().zip(&dense) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn dft_matches_naive_oracle_all_small_lengths() {
        let mut rng = RngState::new(12);
        for k in 1..=8 {
            let n = 1usize << k;
            for _ in 0..100 {
                let x: Vec<f64> = rng.gaussian_vec(n);
                let fast = dft(&x).unwrap();
                let slow = naive_dft(&x);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn transforms_preserve_norm() {
        let mut rng = RngState::new(13);
        let x: Vec<f64> = rng.gaussian_vec(256);
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = fwht(&x).unwrap();
        let nh = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((nx - nh).abs() < 1e-12);
        let f = dft(&x).unwrap();
        let nf = f.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!((nx - nf).abs() < 1e-12);
    }

    #[test]
    fn fwht_is_involutive() {
        let mut rng = RngState::new(14);
        let x: Vec<f64> = rng.gaussian_vec(64);
        let twice = fwht(&fwht(&x).unwrap()).unwrap();
        for (a, b) in twice.iter().zip(&x) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn non_power_of_two_is_rejected() {
        assert!(matches!(
            fwht(&[1.0f64, 2.0, 3.0]),
            Err(Error::LengthNotPowerOfTwo { len: 3 })
        ));
        assert!(matches!(
            dft(&[1.0f64; 6]),
            Err(Error::LengthNotPowerOfTwo { len: 6 })
        ));
        assert!(matches!(
            fwht::<f64>(&[]),
            Err(Error::LengthNotPowerOfTwo { len: 0 })
        ));
    }
}
