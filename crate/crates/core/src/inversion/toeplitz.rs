use crate::error::{Error, Result};
use crate::lattice::{Filter, IndexBox};
use crate::scalar::{cst, to_f64, Scalar};
use crate::spectrum::{min_modulus_certified, DEFAULT_TARGET_GAP};

/// Condition threshold `σ_min/σ_max` below which the windowed system is
/// declared singular.
pub const TOEPLITZ_SINGULAR_RATIO: f64 = 1e-12;

/// Brute-force inverse on `[−radius, radius]ᵈ`: least-squares solution of the
/// windowed system `Σ_l h[k − l] g[l] = δ[k]`, with one row per `k` in the
/// window dilated by the support of `h`.
pub fn toeplitz_oracle<T: Scalar>(h: &Filter<T>, radius: usize) -> Result<Filter<T>> {
    let cert = min_modulus_certified(h, cst(DEFAULT_TARGET_GAP))?;
    if !cert.is_invertible() {
        return Err(Error::NotInvertible { min_modulus: to_f64(cert.grid_min) });
    }
    let window = IndexBox::symmetric(h.dim(), radius);
    let rows = window.minkowski_sum(h.support());
    let (nr, nc) = (rows.len(), window.len());
    let mut matrix = vec![T::zero(); nr * nc];
    for (ci, l) in window.iter().enumerate() {
        for (k, c) in h.iter() {
            let row = rows.offset(k.add(&l).coords()).expect("row box covers window + support");
            matrix[row * nc + ci] = c;
        }
    }
    let mut rhs = vec![T::zero(); nr];
    rhs[rows.offset(&vec![0; h.dim()]).expect("origin in row box")] = T::one();
    let ls = T::least_squares(nr, nc, &matrix, &rhs);
    if ls.smallest_singular_value <= cst::<T>(TOEPLITZ_SINGULAR_RATIO) * ls.largest_singular_value {
        return Err(Error::SingularSystem { smallest_singular_value: to_f64(ls.smallest_singular_value) });
    }
    Ok(Filter::from_raw(window, ls.solution))
}
