use num_complex::Complex;
use rustfft::FftDirection;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft::fft_nd;
use crate::lattice::{convolve_direct, kronecker, Filter, IndexBox};
use crate::scalar::{cst, to_f64, Scalar};
use crate::spectrum::{grid_symbol, min_modulus_certified, ModulusCertificate, DEFAULT_TARGET_GAP};

pub const STABLE_START_GRID: usize = 128;
pub const STABLE_MAX_GRID: usize = 1 << 16;
pub const STABLE_MAX_POINTS: usize = 1 << 24;

/// Result of [`invert_stable_detailed`].
#[derive(Clone, Debug, Serialize)]
pub struct StableInverse<T> {
    #[serde(skip)]
    pub inverse: Filter<T>,
    /// `sup |(h ∗ g − δ)[k]|` over the verification box.
    pub residual: T,
    pub grid_size: usize,
    pub certificate: ModulusCertificate<T>,
}

/// Indices `k` whose stencil `k − supp(h)` lies inside the window.
pub fn verification_box<T: Scalar>(h: &Filter<T>, window: &IndexBox) -> Option<IndexBox> {
    let lo: Vec<i64> = window.origin().iter().zip(h.support().upper()).map(|(w, s)| w + s).collect();
    let hi: Vec<i64> = window.upper().iter().zip(h.support().origin()).map(|(w, s)| w + s).collect();
    IndexBox::from_bounds(&lo, &hi)
}

/// `sup_{k ∈ bx} |(h ∗ g − δ)[k]|`, by the direct sum.
pub fn inverse_residual<T: Scalar>(h: &Filter<T>, g: &Filter<T>, bx: &IndexBox) -> T {
    let hg = convolve_direct(h, g).expect("same dimension");
    let delta = kronecker::<T>(h.dim()).expect("d ≥ 1");
    bx.iter().fold(T::zero(), |m, k| m.max((hg.get(k.coords()) - delta.get(k.coords())).abs()))
}

pub fn invert_stable<T: Scalar>(h: &Filter<T>, tail_tol: T, window_radius: usize) -> Result<Filter<T>> {
    invert_stable_detailed(h, tail_tol, window_radius).map(|s| s.inverse)
}

/// Inverse by sampling `1/ĥ` on an `Nᵈ` grid and transforming back; `N`
/// doubles from 128 until both the residual on the verification box and the
/// periodized inverse's tail (samples with some folded `|k_j| ≥ N/4`) are at
/// most `tail_tol`.
pub fn invert_stable_detailed<T: Scalar>(h: &Filter<T>, tail_tol: T, window_radius: usize) -> Result<StableInverse<T>> {
    let certificate = min_modulus_certified(h, cst(DEFAULT_TARGET_GAP))?;
    if !certificate.is_invertible() {
        return Err(Error::NotInvertible { min_modulus: to_f64(certificate.grid_min) });
    }
    let d = h.dim();
    let window = IndexBox::symmetric(d, window_radius);
    let check = verification_box(h, &window).ok_or_else(|| {
        Error::InvalidArgument(format!("window radius {window_radius} too small for the filter support"))
    })?;
    let mut n = STABLE_START_GRID.max((2 * window_radius + 1).next_power_of_two());
    let mut best = T::infinity();
    loop {
        let mut grid = grid_symbol(h, n);
        for z in grid.iter_mut() {
            *z = Complex::new(T::one(), T::zero()) / *z;
        }
        fft_nd(&mut grid, &vec![n; d], FftDirection::Inverse);
        let scale = T::from(n).unwrap().powi(d as i32);
        let g = Filter::from_fn(&window, |k| {
            let mut idx = 0usize;
            for &kj in k.coords() {
                idx = idx * n + kj.rem_euclid(n as i64) as usize;
            }
            grid[idx].re / scale
        });
        let residual = inverse_residual(h, &g, &check);
        let tail = periodic_tail(&grid, n, d) / scale;
        best = best.min(residual.max(tail));
        if residual <= tail_tol && tail <= tail_tol {
            return Ok(StableInverse { inverse: g, residual, grid_size: n, certificate });
        }
        let next = n * 2;
        if next > STABLE_MAX_GRID || next.checked_pow(d as u32).is_none_or(|p| p > STABLE_MAX_POINTS) {
            return Err(Error::ToleranceUnreachable { tolerance: to_f64(tail_tol), best_residual: to_f64(best) });
        }
        n = next;
    }
}

fn periodic_tail<T: Scalar>(grid: &[Complex<T>], n: usize, d: usize) -> T {
    let mut tail = T::zero();
    for (idx, z) in grid.iter().enumerate() {
        let mut rest = idx;
        let mut far = false;
        for _ in 0..d {
            let i = rest % n;
            rest /= n;
            far |= i.min(n - i) >= n / 4;
        }
        if far {
            tail = tail.max(z.re.abs());
        }
    }
    tail
}
