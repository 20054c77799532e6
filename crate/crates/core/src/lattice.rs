//! Multi-indices, support boxes and finitely supported sequences on the
//! integer lattice, with discrete convolution and weighted norms.

use std::fmt;

use num_complex::Complex;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::fft_nd;
use crate::scalar::{to_f64, Scalar};
use crate::weights::Weight;

/// Output sizes up to this many points are convolved by the direct double sum.
pub const DIRECT_CONVOLUTION_LIMIT: usize = 4096;

/// A point of the lattice ℤᵈ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(coords: Vec<i64>) -> Self {
        MultiIndex(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Lattice ℓ₁ norm |k|₁.
    pub fn l1(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    /// Euclidean norm ∥k∥₂.
    pub fn l2(&self) -> f64 {
        self.0.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, m: i64) -> Self {
        MultiIndex(self.0.iter().map(|c| c * m).collect())
    }

    pub fn neg(&self) -> Self {
        self.scaled(-1)
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex(v)
    }
}

impl From<&[i64]> for MultiIndex {
    fn from(v: &[i64]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Axis-aligned box `origin ≤ k < origin + shape` in ℤᵈ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexBox {
    origin: Vec<i64>,
    shape: Vec<usize>,
}

impl IndexBox {
    pub fn new(origin: Vec<i64>, shape: Vec<usize>) -> Result<Self> {
        if origin.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if origin.len() != shape.len() {
            return Err(Error::DimensionMismatch { left: origin.len(), right: shape.len() });
        }
        if shape.contains(&0) {
            return Err(Error::InvalidArgument(format!("box shape must be positive, got {shape:?}")));
        }
        Ok(IndexBox { origin, shape })
    }

    /// The symmetric box `[-radius, radius]ᵈ`.
    pub fn symmetric(dim: usize, radius: usize) -> Self {
        IndexBox { origin: vec![-(radius as i64); dim], shape: vec![2 * radius + 1; dim] }
    }

    /// Box with inclusive bounds `lo ≤ k ≤ hi` per axis; `None` when empty.
    pub fn from_bounds(lo: &[i64], hi: &[i64]) -> Option<Self> {
        if lo.iter().zip(hi).any(|(l, h)| h < l) || lo.is_empty() {
            return None;
        }
        Some(IndexBox { origin: lo.to_vec(), shape: lo.iter().zip(hi).map(|(l, h)| (h - l + 1) as usize).collect() })
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Inclusive upper corner.
    pub fn upper(&self) -> Vec<i64> {
        self.origin.iter().zip(&self.shape).map(|(o, s)| o + *s as i64 - 1).collect()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        k.len() == self.dim()
            && k.iter().zip(&self.origin).zip(&self.shape).all(|((&c, &o), &s)| c >= o && c < o + s as i64)
    }

    /// Row-major linear offset of `k`, if inside.
    pub fn offset(&self, k: &[i64]) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        let mut idx = 0usize;
        for ((&c, &o), &s) in k.iter().zip(&self.origin).zip(&self.shape) {
            idx = idx * s + (c - o) as usize;
        }
        Some(idx)
    }

    /// Multi-index at a row-major linear offset.
    pub fn index_at(&self, mut offset: usize) -> MultiIndex {
        let mut coords = vec![0i64; self.dim()];
        for axis in (0..self.dim()).rev() {
            let s = self.shape[axis];
            coords[axis] = self.origin[axis] + (offset % s) as i64;
            offset /= s;
        }
        MultiIndex(coords)
    }

    pub fn iter(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.len()).map(move |i| self.index_at(i))
    }

    pub fn minkowski_sum(&self, other: &IndexBox) -> IndexBox {
        IndexBox {
            origin: self.origin.iter().zip(&other.origin).map(|(a, b)| a + b).collect(),
            shape: self.shape.iter().zip(&other.shape).map(|(a, b)| a + b - 1).collect(),
        }
    }

    pub fn intersection(&self, other: &IndexBox) -> Option<IndexBox> {
        let lo: Vec<i64> = self.origin.iter().zip(&other.origin).map(|(a, b)| *a.max(b)).collect();
        let hi: Vec<i64> = self.upper().iter().zip(other.upper()).map(|(a, b)| *a.min(&b)).collect();
        IndexBox::from_bounds(&lo, &hi)
    }

    pub fn hull(&self, other: &IndexBox) -> IndexBox {
        let lo: Vec<i64> = self.origin.iter().zip(&other.origin).map(|(a, b)| *a.min(b)).collect();
        let hi: Vec<i64> = self.upper().iter().zip(other.upper()).map(|(a, b)| *a.max(&b)).collect();
        IndexBox::from_bounds(&lo, &hi).expect("hull of nonempty boxes")
    }

    /// Largest |k|₁ over the box.
    pub fn max_l1(&self) -> i64 {
        self.origin.iter().zip(self.upper()).map(|(lo, hi)| lo.abs().max(hi.abs())).sum()
    }
}

/// Finitely supported sequence on ℤᵈ stored row-major over its support box.
///
/// Filters are kept in trimmed form: no boundary slab of the support is
/// identically zero. The zero sequence is a single zero at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Filter<T> {
    support: IndexBox,
    coeffs: Vec<T>,
}

impl<T: Scalar> Filter<T> {
    pub fn new(origin: Vec<i64>, shape: Vec<usize>, coeffs: Vec<T>) -> Result<Self> {
        let support = IndexBox::new(origin, shape)?;
        if coeffs.len() != support.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for shape {:?}, got {}",
                support.len(),
                support.shape(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Filter { support, coeffs }.trimmed())
    }

    /// One-dimensional filter with `coeffs[i]` at index `origin + i`.
    pub fn from_slice(origin: i64, coeffs: &[T]) -> Self {
        if coeffs.is_empty() {
            return Filter::zero(1);
        }
        Filter { support: IndexBox { origin: vec![origin], shape: vec![coeffs.len()] }, coeffs: coeffs.to_vec() }
            .trimmed()
    }

    pub fn zero(dim: usize) -> Self {
        Filter { support: IndexBox { origin: vec![0; dim], shape: vec![1; dim] }, coeffs: vec![T::zero()] }
    }

    pub fn from_fn(support: &IndexBox, mut f: impl FnMut(&MultiIndex) -> T) -> Self {
        let coeffs = support.iter().map(|k| f(&k)).collect();
        Filter { support: support.clone(), coeffs }.trimmed()
    }

    /// Builds from values already laid out row-major over `support`.
    pub(crate) fn from_raw(support: IndexBox, coeffs: Vec<T>) -> Self {
        debug_assert_eq!(support.len(), coeffs.len());
        Filter { support, coeffs }.trimmed()
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn support(&self) -> &IndexBox {
        &self.support
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == T::zero())
    }

    /// Coefficient at `k`, zero outside the support.
    pub fn get(&self, k: &[i64]) -> T {
        self.support.offset(k).map_or(T::zero(), |i| self.coeffs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, T)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, &c)| (self.support.index_at(i), c))
    }

    pub fn sum(&self) -> T {
        self.coeffs.iter().copied().sum()
    }

    pub fn sup_norm(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Filter { support: self.support.clone(), coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }.trimmed()
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|c| c * s)
    }

    /// The sequence `k ↦ self[k - shift]`.
    pub fn shifted(&self, shift: &[i64]) -> Self {
        let origin = self.support.origin.iter().zip(shift).map(|(o, s)| o + s).collect();
        Filter { support: IndexBox { origin, shape: self.support.shape.clone() }, coeffs: self.coeffs.clone() }
    }

    /// Restriction to a window (zero outside it).
    pub fn restricted(&self, window: &IndexBox) -> Self {
        match self.support.intersection(window) {
            None => Filter::zero(self.dim()),
            Some(b) => Filter::from_fn(&b, |k| self.get(k.coords())),
        }
    }

    fn combine(&self, other: &Filter<T>, f: impl Fn(T, T) -> T) -> Self {
        let hull = self.support.hull(&other.support);
        Filter::from_fn(&hull, |k| f(self.get(k.coords()), other.get(k.coords())))
    }

    pub fn add(&self, other: &Filter<T>) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Filter<T>) -> Self {
        self.combine(other, |a, b| a - b)
    }

    /// sup_k |self[k] − other[k]|.
    pub fn max_abs_diff(&self, other: &Filter<T>) -> T {
        let hull = self.support.hull(&other.support);
        hull.iter().fold(T::zero(), |m, k| m.max((self.get(k.coords()) - other.get(k.coords())).abs()))
    }

    /// Tensor product `(a ⊗ b)[k, l] = a[k]·b[l]` on ℤ^(d_a + d_b).
    pub fn tensor(&self, other: &Filter<T>) -> Self {
        let origin = self.support.origin.iter().chain(&other.support.origin).copied().collect();
        let shape = self.support.shape.iter().chain(&other.support.shape).copied().collect();
        let mut coeffs = Vec::with_capacity(self.len() * other.len());
        for &a in &self.coeffs {
            for &b in &other.coeffs {
                coeffs.push(a * b);
            }
        }
        Filter { support: IndexBox { origin, shape }, coeffs }.trimmed()
    }

    pub fn cast<U: Scalar>(&self) -> Filter<U> {
        Filter {
            support: self.support.clone(),
            coeffs: self.coeffs.iter().map(|&c| U::from(c).unwrap_or_else(U::nan)).collect(),
        }
    }

    /// Drops zero boundary slabs.
    pub fn trimmed(self) -> Self {
        let d = self.dim();
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        let mut any = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != T::zero() {
                any = true;
                let k = self.support.index_at(i);
                for a in 0..d {
                    lo[a] = lo[a].min(k.0[a]);
                    hi[a] = hi[a].max(k.0[a]);
                }
            }
        }
        if !any {
            return Filter::zero(d);
        }
        let bx = IndexBox::from_bounds(&lo, &hi).expect("nonempty");
        if bx == self.support {
            return self;
        }
        let coeffs = bx.iter().map(|k| self.get(k.coords())).collect();
        Filter { support: bx, coeffs }
    }
}

/// The Kronecker delta on ℤᵈ, neutral element of [`convolve`].
pub fn kronecker<T: Scalar>(dim: usize) -> Result<Filter<T>> {
    if dim < 1 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(Filter { support: IndexBox::symmetric(dim, 0), coeffs: vec![T::one()] })
}

/// The shifted delta `δ[· − k]`.
pub fn shifted_delta<T: Scalar>(k: &[i64]) -> Filter<T> {
    Filter { support: IndexBox { origin: k.to_vec(), shape: vec![1; k.len()] }, coeffs: vec![T::one()] }
}

fn check_dims<T: Scalar>(a: &Filter<T>, b: &Filter<T>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    Ok(())
}

/// Discrete convolution `(a ∗ b)[k] = Σ_l a[l] b[k − l]`.
///
/// Single-point operands are applied exactly; small outputs use the direct
/// double sum, larger ones a zero-padded FFT.
pub fn convolve<T: Scalar>(a: &Filter<T>, b: &Filter<T>) -> Result<Filter<T>> {
    check_dims(a, b)?;
    if a.len() == 1 || b.len() == 1 {
        let (point, other) = if a.len() == 1 { (a, b) } else { (b, a) };
        let s = point.coeffs[0];
        let mut out = other.shifted(point.support.origin());
        if s != T::one() {
            out = out.scaled(s);
        }
        return Ok(out.trimmed());
    }
    let out_box = a.support.minkowski_sum(&b.support);
    if out_box.len() <= DIRECT_CONVOLUTION_LIMIT {
        convolve_direct(a, b)
    } else {
        convolve_fft(a, b)
    }
}

/// Direct double-sum convolution; the reference path.
pub fn convolve_direct<T: Scalar>(a: &Filter<T>, b: &Filter<T>) -> Result<Filter<T>> {
    check_dims(a, b)?;
    let out_box = a.support.minkowski_sum(&b.support);
    let d = out_box.dim();
    let mut strides = vec![1usize; d];
    for axis in (0..d.saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * out_box.shape[axis + 1];
    }
    let local_offsets = |f: &Filter<T>| -> Vec<(usize, T)> {
        f.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != T::zero())
            .map(|(i, &c)| {
                let k = f.support.index_at(i);
                let off = (0..d).map(|ax| (k.0[ax] - f.support.origin[ax]) as usize * strides[ax]).sum();
                (off, c)
            })
            .collect()
    };
    let la = local_offsets(a);
    let lb = local_offsets(b);
    let mut out = vec![T::zero(); out_box.len()];
    for &(oa, ca) in &la {
        for &(ob, cb) in &lb {
            out[oa + ob] = out[oa + ob] + ca * cb;
        }
    }
    Ok(Filter::from_raw(out_box, out))
}

/// Convolution through a zero-padded multidimensional FFT.
pub fn convolve_fft<T: Scalar>(a: &Filter<T>, b: &Filter<T>) -> Result<Filter<T>> {
    check_dims(a, b)?;
    let out_box = a.support.minkowski_sum(&b.support);
    let shape = out_box.shape().to_vec();
    let pad = |f: &Filter<T>| -> Vec<Complex<T>> {
        let mut grid = vec![Complex::new(T::zero(), T::zero()); out_box.len()];
        for (i, &c) in f.coeffs.iter().enumerate() {
            let k = f.support.index_at(i);
            let mut idx = 0usize;
            for ((&n, &kj), &o) in shape.iter().zip(&k.0).zip(&f.support.origin) {
                idx = idx * n + (kj - o) as usize;
            }
            grid[idx] = Complex::new(c, T::zero());
        }
        grid
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    fft_nd(&mut fa, &shape, FftDirection::Forward);
    fft_nd(&mut fb, &shape, FftDirection::Forward);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * *y;
    }
    fft_nd(&mut fa, &shape, FftDirection::Inverse);
    let scale = T::from(out_box.len()).unwrap();
    let out = fa.iter().map(|z| z.re / scale).collect();
    Ok(Filter::from_raw(out_box, out))
}

/// Exponent of a weighted sequence norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormExponent {
    One,
    Two,
    Infinity,
}

/// `∥w·a∥_{ℓ_p}` over the support of `a`.
pub fn weighted_norm<T: Scalar>(a: &Filter<T>, p: NormExponent, w: &Weight<T>) -> Result<T> {
    if a.dim() != w.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: w.dim() });
    }
    let mut acc = T::zero();
    for (k, c) in a.iter() {
        if c == T::zero() {
            continue;
        }
        let wk = w.eval(&k);
        if !(wk > T::zero()) || !wk.is_finite() {
            return Err(Error::InvalidWeight { index: k.coords().to_vec(), value: to_f64(wk) });
        }
        let v = (wk * c).abs();
        acc = match p {
            NormExponent::One => acc + v,
            NormExponent::Two => acc + v * v,
            NormExponent::Infinity => acc.max(v),
        };
    }
    Ok(if p == NormExponent::Two { acc.sqrt() } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> Filter<f64> {
        Filter::from_slice(-1, &[1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0])
    }

    #[test]
    fn kronecker_shapes() {
        let d1 = kronecker::<f64>(1).unwrap();
        assert_eq!(d1.support().origin(), &[0]);
        assert_eq!(d1.coeffs(), &[1.0]);
        let d2 = kronecker::<f64>(2).unwrap();
        assert_eq!(d2.support().origin(), &[0, 0]);
        assert_eq!(d2.coeffs(), &[1.0]);
        assert_eq!(kronecker::<f64>(0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn delta_is_neutral_bitwise() {
        let a = Filter::from_slice(-3, &[0.1, -0.7, 1.0 / 3.0, 2.5]);
        let d = kronecker(1).unwrap();
        assert_eq!(convolve(&d, &a).unwrap(), a);
        assert_eq!(convolve(&a, &d).unwrap(), a);
    }

    #[test]
    fn cubic_autoconvolution() {
        // [1,4,1]/6 * [1,4,1]/6 by direct double sum: [1,8,18,8,1]/36
        let c = convolve(&cubic(), &cubic()).unwrap();
        assert_eq!(c.support().origin(), &[-2]);
        let expected = [1.0, 8.0, 18.0, 8.0, 1.0].map(|v| v / 36.0);
        for (a, b) in c.coeffs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn geometric_inverse_truncation() {
        // (δ − e^{-1}δ_{·−1}) ∗ b_N with b_N[m] = e^{-m}: δ up to a tail at N+1
        let a = Filter::from_slice(0, &[1.0, -(-1.0f64).exp()]);
        let n = 20;
        let b: Vec<f64> = (0..=n).map(|m| (-(m as f64)).exp()).collect();
        let c = convolve(&a, &Filter::from_slice(0, &b)).unwrap();
        assert!((c.get(&[0]) - 1.0).abs() < 1e-15);
        for k in 1..=n as i64 {
            assert!(c.get(&[k]).abs() < 1e-15);
        }
        assert!((c.get(&[n as i64 + 1]) + (-(n as f64 + 1.0)).exp()).abs() < 1e-20);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = kronecker::<f64>(1).unwrap();
        let b = kronecker::<f64>(2).unwrap();
        assert!(matches!(convolve(&a, &b), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn fft_path_matches_direct() {
        let a = Filter::from_fn(&IndexBox::symmetric(2, 6), |k| ((k.coords()[0] * 3 + k.coords()[1]) as f64).sin());
        let b = Filter::from_fn(&IndexBox::symmetric(2, 5), |k| 1.0 / (1.0 + k.l1() as f64));
        let direct = convolve_direct(&a, &b).unwrap();
        let fft = convolve_fft(&a, &b).unwrap();
        assert!(direct.max_abs_diff(&fft) <= 1e-10 * direct.sup_norm());
    }

    #[test]
    fn trimming_is_canonical() {
        let f = Filter::new(vec![-2, 0], vec![3, 2], vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.support().origin(), &[-1, 0]);
        assert_eq!(f.support().shape(), &[1, 1]);
        assert!(Filter::<f64>::from_slice(4, &[0.0, 0.0]).is_zero());
    }

    #[test]
    fn weighted_norms() {
        let w = Weight::<f64>::polynomial(1, 2.0).unwrap();
        let d = kronecker(1).unwrap();
        assert_eq!(weighted_norm(&d, NormExponent::One, &w).unwrap(), 1.0);
        let one = Weight::<f64>::polynomial(1, 0.0).unwrap();
        assert!((weighted_norm(&cubic(), NormExponent::One, &one).unwrap() - 1.0).abs() < 1e-15);
        let e5 = shifted_delta::<f64>(&[5]);
        let we = Weight::<f64>::exponential(1, 0.5).unwrap();
        assert!((weighted_norm(&e5, NormExponent::One, &we).unwrap() - 2.5f64.exp()).abs() < 1e-12);
        let l2 = weighted_norm(&cubic(), NormExponent::Two, &one).unwrap();
        assert!((l2 - (18.0f64).sqrt() / 6.0).abs() < 1e-15);
        assert_eq!(weighted_norm(&cubic(), NormExponent::Infinity, &one).unwrap(), 4.0 / 6.0);
    }

    #[test]
    fn non_positive_weight_rejected() {
        let w = Weight::<f64>::custom(1, |k| k[0] as f64);
        assert!(matches!(weighted_norm(&cubic(), NormExponent::One, &w), Err(Error::InvalidWeight { .. })));
    }
}
