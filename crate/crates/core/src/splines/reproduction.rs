use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{IndexBox, MultiIndex};
use crate::scalar::{to_f64, Scalar};
use crate::weights::Weight;

use super::kernel::LagrangeKernel;

/// Terms beyond this many e-foldings of the kernel envelope are ignored by
/// the tail estimate.
const TAIL_EFOLDINGS: f64 = 80.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproductionReport<T> {
    /// `max_x |Σ_{|k|∞ ≤ K_sum} p[k] φ_int(x − k) − target(x)|`.
    pub max_residual: T,
    pub argmax: Vec<T>,
    /// Bound on the omitted terms: those with `|k|∞ > K_sum` and those where
    /// `x − k` leaves the sampled kernel window, from the envelope
    /// `|φ_int(y)| ≤ C e^{−r(|⌊y⌉|₁)}`.
    pub tail_estimate: T,
}

/// Checks `target(x) = Σ_k p[k] φ_int(x − k)` at points `xs` of the kernel grid.
pub fn reproduction_check<T: Scalar>(
    p: &dyn Fn(&[i64]) -> T,
    kernel: &LagrangeKernel<T>,
    target: &dyn Fn(&[T]) -> T,
    xs: &[Vec<T>],
    k_sum: usize,
    tolerance: T,
) -> Result<ReproductionReport<T>> {
    let d = kernel.dim();
    let decay = kernel.decay.as_ref();
    let (c, rate) = match decay {
        Some(r) if r.rate > T::zero() => (r.envelope_exponential, r.rate),
        _ => (T::zero(), T::infinity()),
    };
    let compact = decay.is_none();
    let m = kernel.oversampling as i64;
    let kr = kernel.radius as i64;
    let terms = IndexBox::symmetric(d, k_sum);
    let reach = if compact { 0 } else { (TAIL_EFOLDINGS / to_f64(rate)).ceil() as usize };
    let outer = IndexBox::symmetric(d, k_sum + kernel.radius + reach);

    let mut max_residual = T::zero();
    let mut argmax = vec![T::zero(); d];
    let mut tail = T::zero();
    for x in xs {
        if x.len() != d {
            return Err(Error::DimensionMismatch { left: x.len(), right: d });
        }
        let j = kernel.fine_index(x).ok_or_else(|| {
            Error::InvalidArgument(format!("point {x:?} is off the 1/{} kernel grid", kernel.oversampling))
        })?;
        let mut sum = T::zero();
        for k in terms.iter() {
            let pk = p(k.coords());
            if pk == T::zero() {
                continue;
            }
            let y: Vec<i64> = j.coords().iter().zip(k.coords()).map(|(&a, &b)| a - m * b).collect();
            sum = sum + pk * kernel.at_fine(&y);
        }
        let r = (sum - target(x)).abs();
        if r > max_residual || r.is_nan() {
            max_residual = r;
            argmax = x.clone();
        }
        if !compact {
            let mut t = T::zero();
            for k in outer.iter() {
                let y: Vec<i64> = j.coords().iter().zip(k.coords()).map(|(&a, &b)| a - m * b).collect();
                let inside_terms = terms.contains(k.coords());
                let inside_kernel = y.iter().all(|&c| c.abs() <= kr * m);
                if inside_terms && inside_kernel {
                    continue;
                }
                let cell = MultiIndex::new(y.iter().map(|&c| (c + m / 2).div_euclid(m)).collect());
                t = t + p(k.coords()).abs() * c * (-rate * T::from(cell.l1()).unwrap()).exp();
            }
            tail = tail.max(t);
        }
    }
    if tail > tolerance {
        return Err(Error::KSumTooSmall { k_sum, tail: to_f64(tail), tolerance: to_f64(tolerance) });
    }
    Ok(ReproductionReport { max_residual, argmax, tail_estimate: tail })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmalgamNorm<T> {
    /// `max_{x0} Σ_{|k|₁ ≤ K} |f(x0 + k)| w[k]`, a lower bound of the norm.
    pub value: T,
    pub argmax: Vec<T>,
    pub grid_points: usize,
}

/// Offsets `i/m`, `0 ≤ i < m`, on each axis of `[0, 1)ᵈ`.
pub fn unit_cell_grid<T: Scalar>(dim: usize, m: usize) -> Vec<Vec<T>> {
    IndexBox::new(vec![0; dim], vec![m; dim])
        .map(|bx| {
            bx.iter()
                .map(|i| i.coords().iter().map(|&c| T::from(c).unwrap() / T::from(m).unwrap()).collect())
                .collect()
        })
        .unwrap_or_default()
}

/// Weighted amalgam norm `sup_{x0} Σ_k |f(x0 + k)| w[k]`, sampled on `x0_grid`.
pub fn amalgam_norm<T: Scalar>(
    f: &dyn Fn(&[T]) -> T,
    w: &Weight<T>,
    x0_grid: &[Vec<T>],
    k_max: usize,
) -> Result<AmalgamNorm<T>> {
    let d = w.dim();
    let ks: Vec<(MultiIndex, T)> = IndexBox::symmetric(d, k_max)
        .iter()
        .filter(|k| k.l1() <= k_max as i64)
        .map(|k| {
            let wk = w.eval(&k);
            (k, wk)
        })
        .collect();
    let mut best = AmalgamNorm { value: T::zero(), argmax: vec![T::zero(); d], grid_points: x0_grid.len() };
    for x0 in x0_grid {
        if x0.len() != d {
            return Err(Error::DimensionMismatch { left: x0.len(), right: d });
        }
        let s = ks.iter().fold(T::zero(), |acc, (k, wk)| {
            let x: Vec<T> = x0.iter().zip(k.coords()).map(|(&a, &b)| a + T::from(b).unwrap()).collect();
            acc + f(&x).abs() * *wk
        });
        if s > best.value {
            best.value = s;
            best.argmax = x0.clone();
        }
    }
    Ok(best)
}
