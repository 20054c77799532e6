use crate::error::{Error, Result};
use crate::inversion::invert_stable;
use crate::lattice::{convolve, Filter, IndexBox};
use crate::scalar::{cst, Scalar};

use super::generator::Generator;

const START_RADIUS: usize = 16;
const MAX_RADIUS: usize = 4096;
/// The prefilter is widened until its boundary values fall below this
/// fraction of its sup.
const PREFILTER_EDGE: f64 = 1e-17;
const PREFILTER_TOL: f64 = 1e-13;

/// Spline coefficients `c = h ∗ f` of samples `f`, `h` the inverse of `φ[·]`.
#[derive(Clone, Debug)]
pub struct Interpolant<T> {
    pub generator: Generator<T>,
    pub prefilter: Filter<T>,
    pub coefficients: Filter<T>,
    /// Data support shrunk by the prefilter radius: where `c` sees the data
    /// as if it extended indefinitely.
    pub interior: Option<IndexBox>,
}

impl<T: Scalar> Interpolant<T> {
    /// `Σ_k c[k] φ(x − k)`.
    pub fn eval(&self, x: &[T]) -> Result<T> {
        let mut acc = T::zero();
        for (k, c) in self.coefficients.iter() {
            if c == T::zero() {
                continue;
            }
            let y: Vec<T> = x.iter().zip(k.coords()).map(|(&xi, &ki)| xi - T::from(ki).unwrap()).collect();
            acc = acc + c * self.generator.space_eval(&y)?;
        }
        Ok(acc)
    }

    /// The interpolant at the integers, `c ∗ φ[·]`.
    pub fn at_integers(&self) -> Result<Filter<T>> {
        convolve(&self.coefficients, &self.generator.integer_samples()?)
    }
}

fn prefilter<T: Scalar>(phi: &Filter<T>) -> Result<Filter<T>> {
    let mut radius = START_RADIUS;
    loop {
        let h = invert_stable(phi, cst(PREFILTER_TOL), radius)?;
        let r = radius as i64;
        let edge = h.iter().filter(|(k, _)| k.coords().iter().any(|c| c.abs() == r)).fold(T::zero(), |m, (_, v)| m.max(v.abs()));
        if edge <= h.sup_norm() * cst(PREFILTER_EDGE) || radius >= MAX_RADIUS {
            return Ok(h);
        }
        radius *= 2;
    }
}

/// Coefficients of the cardinal spline through `data`, on the full support
/// of `h ∗ data`.
pub fn interpolate<T: Scalar>(data: &Filter<T>, generator: &Generator<T>) -> Result<Interpolant<T>> {
    if data.dim() != generator.dim() {
        return Err(Error::DimensionMismatch { left: data.dim(), right: generator.dim() });
    }
    let h = prefilter(&generator.integer_samples()?)?;
    let coefficients = convolve(&h, data)?;
    let hr: Vec<i64> = h.support().upper();
    let lo: Vec<i64> = data.support().origin().iter().zip(&hr).map(|(o, r)| o + r).collect();
    let hi: Vec<i64> = data.support().upper().iter().zip(&hr).map(|(u, r)| u - r).collect();
    let interior = IndexBox::from_bounds(&lo, &hi);
    Ok(Interpolant { generator: generator.clone(), prefilter: h, coefficients, interior })
}
