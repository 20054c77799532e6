//! Zeros of one-dimensional filter symbols.
//!
//! A trimmed filter supported on `[k_min, k_max]` factors as
//! `h = gain·δ[· − k_min] ∗ Π_j (δ − z_j δ[· − 1])^{m_j}`, where the `z_j`
//! are the zeros of `P(z) = Σ_k h[k] z^{k_max − k}`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lattice::Filter;
use crate::scalar::{cst, Scalar};

/// A root is on the unit circle when `||z| − 1|` is below this.
pub const UNIT_CIRCLE_TOL: f64 = 1e-8;
/// Eigenvalues closer than this (relative to `max(1, |z|)`) are merged into
/// one multiple root.
pub const ROOT_CLUSTER_TOL: f64 = 1e-5;
/// Relative tolerance of the product reconstruction of a factorization.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root<T> {
    pub z: Complex<T>,
    pub multiplicity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootClass {
    Inner,
    Unit,
    Outer,
}

impl<T: Scalar> Root<T> {
    pub fn class(&self) -> RootClass {
        let r = self.z.norm();
        if (r - T::one()).abs() < cst(UNIT_CIRCLE_TOL) {
            RootClass::Unit
        } else if r < T::one() {
            RootClass::Inner
        } else {
            RootClass::Outer
        }
    }
}

#[derive(Clone, Debug)]
pub struct Factorization<T> {
    pub gain: T,
    pub k_min: i64,
    pub roots: Vec<Root<T>>,
}

impl<T: Scalar> Factorization<T> {
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Coefficients of `gain·Π (1 − z w)^m` in powers of `w`.
    pub fn expand(&self) -> Vec<Complex<T>> {
        let mut poly = vec![Complex::new(self.gain, T::zero())];
        for r in &self.roots {
            for _ in 0..r.multiplicity {
                let mut next = vec![Complex::new(T::zero(), T::zero()); poly.len() + 1];
                for (i, &c) in poly.iter().enumerate() {
                    next[i] = next[i] + c;
                    next[i + 1] = next[i + 1] - c * r.z;
                }
                poly = next;
            }
        }
        poly
    }

    /// The product of the factors as a filter (real part).
    pub fn reconstruct(&self) -> Filter<T> {
        let coeffs: Vec<T> = self.expand().iter().map(|c| c.re).collect();
        Filter::from_slice(self.k_min, &coeffs)
    }

    fn reconstruction_error(&self, h: &Filter<T>) -> T {
        let poly = self.expand();
        let mut err = T::zero();
        for (i, c) in poly.iter().enumerate() {
            let target = h.get(&[self.k_min + i as i64]);
            err = err.max((c - Complex::new(target, T::zero())).norm());
        }
        err / h.sup_norm()
    }
}

fn horner<T: Scalar>(poly: &[T], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::new(T::zero(), T::zero());
    let mut dp = Complex::new(T::zero(), T::zero());
    for &c in poly {
        dp = dp * z + p;
        p = p * z + Complex::new(c, T::zero());
    }
    (p, dp)
}

/// Companion-matrix roots of the symbol, one Newton step per simple root,
/// near-coincident eigenvalues merged into multiple roots.
pub fn factor_symbol<T: Scalar>(h: &Filter<T>) -> Result<Factorization<T>> {
    if h.dim() != 1 {
        return Err(Error::InvalidArgument("symbol factorization requires d = 1".into()));
    }
    if h.is_zero() {
        return Err(Error::InvalidArgument("zero filter".into()));
    }
    let poly: Vec<T> = h.coeffs().to_vec();
    let k_min = h.support().origin()[0];
    let gain = poly[0];
    let eig = T::companion_eigenvalues(&poly);

    let polish = |z: Complex<T>| {
        let (p, dp) = horner(&poly, z);
        if dp.norm() > T::zero() {
            let step = p / dp;
            let candidate = z - step;
            if candidate.re.is_finite() && candidate.im.is_finite() && horner(&poly, candidate).0.norm() <= p.norm() {
                return candidate;
            }
        }
        z
    };

    let simple = Factorization { gain, k_min, roots: eig.iter().map(|&z| Root { z: polish(z), multiplicity: 1 }).collect() };

    let mut assigned = vec![false; eig.len()];
    let mut clustered = Vec::new();
    for i in 0..eig.len() {
        if assigned[i] {
            continue;
        }
        let scale = T::one().max(eig[i].norm()) * cst(ROOT_CLUSTER_TOL);
        let members: Vec<usize> =
            (i..eig.len()).filter(|&j| !assigned[j] && (eig[j] - eig[i]).norm() < scale).collect();
        for &j in &members {
            assigned[j] = true;
        }
        let m = members.len();
        let mean = members.iter().fold(Complex::new(T::zero(), T::zero()), |a, &j| a + eig[j]) / T::from(m).unwrap();
        let z = if m == 1 { polish(mean) } else { mean };
        clustered.push(Root { z, multiplicity: m });
    }
    let clustered = Factorization { gain, k_min, roots: clustered };

    if clustered.roots.len() == simple.roots.len() {
        return Ok(simple);
    }
    if clustered.reconstruction_error(h) <= cst(RECONSTRUCTION_TOL) {
        Ok(clustered)
    } else {
        Ok(simple)
    }
}
