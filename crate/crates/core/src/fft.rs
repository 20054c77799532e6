//! Multidimensional complex FFT over row-major grids.

use num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use crate::scalar::Scalar;

/// In-place unnormalized transform along every axis of a row-major grid.
pub(crate) fn fft_nd<T: Scalar>(data: &mut [Complex<T>], shape: &[usize], direction: FftDirection) {
    debug_assert_eq!(data.len(), shape.iter().product::<usize>());
    let mut planner = FftPlanner::<T>::new();
    let total = data.len();
    let mut stride = 1usize;
    for axis in (0..shape.len()).rev() {
        let n = shape[axis];
        if n > 1 {
            let fft = planner.plan_fft(n, direction);
            let mut line = vec![Complex::new(T::zero(), T::zero()); n];
            let block = n * stride;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + i * stride];
                    }
                    fft.process(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
        stride *= n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_then_inverse_is_scaled_identity() {
        let shape = [3usize, 4];
        let orig: Vec<Complex<f64>> = (0..12).map(|i| Complex::new(i as f64, -(i as f64) * 0.5)).collect();
        let mut data = orig.clone();
        fft_nd(&mut data, &shape, FftDirection::Forward);
        fft_nd(&mut data, &shape, FftDirection::Inverse);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / 12.0 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_2d_dft() {
        let shape = [2usize, 3];
        let orig: Vec<Complex<f64>> = (0..6).map(|i| Complex::new((i * i) as f64, 1.0)).collect();
        let mut data = orig.clone();
        fft_nd(&mut data, &shape, FftDirection::Forward);
        for u in 0..2 {
            for v in 0..3 {
                let mut acc = Complex::new(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..3 {
                        let phase = -2.0 * std::f64::consts::PI * ((u * a) as f64 / 2.0 + (v * b) as f64 / 3.0);
                        acc += orig[a * 3 + b] * Complex::from_polar(1.0, phase);
                    }
                }
                assert!((acc - data[u * 3 + v]).norm() < 1e-12);
            }
        }
    }
}
