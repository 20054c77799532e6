//! Centered B-splines `β^n`, the `(n+1)`-fold convolution of the unit box.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

use crate::error::{Error, Result};
use crate::lattice::{Filter, IndexBox};
use crate::scalar::{cst, Scalar};

pub const MAX_BSPLINE_DEGREE: usize = 11;

pub(crate) fn check_degree(n: usize) -> Result<()> {
    if n > MAX_BSPLINE_DEGREE {
        return Err(Error::InvalidArgument(format!("B-spline degree {n} outside 0..={MAX_BSPLINE_DEGREE}")));
    }
    Ok(())
}

/// `β^n(x)` by the recurrence
/// `n β^n(x) = ((n+1)/2 + x) β^{n−1}(x + 1/2) + ((n+1)/2 − x) β^{n−1}(x − 1/2)`,
/// whose terms are all nonnegative. `β^0` is the indicator of `[−1/2, 1/2)`.
fn recurrence<N: Clone + Num + PartialOrd>(n: usize, x: &N, half: &N, nat: &impl Fn(usize) -> N) -> N {
    let reach = nat(n + 1) * half.clone();
    if *x < N::zero() - reach.clone() || *x >= reach.clone() {
        return N::zero();
    }
    if n == 0 {
        return N::one();
    }
    let left = (reach.clone() + x.clone()) * recurrence(n - 1, &(x.clone() + half.clone()), half, nat);
    let right = (reach - x.clone()) * recurrence(n - 1, &(x.clone() - half.clone()), half, nat);
    (left + right) / nat(n)
}

/// Exact `β^n(x)`.
pub fn bspline_exact(n: usize, x: &BigRational) -> BigRational {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    recurrence(n, x, &half, &|k| BigRational::from_integer(BigInt::from(k)))
}

/// `β^n(x)` in floating point.
pub fn bspline_value<T: Scalar>(n: usize, x: T) -> T {
    recurrence(n, &x, &cst(0.5), &|k| T::from(k).unwrap())
}

/// `β^n(t/m)`, computed exactly and rounded once.
pub fn bspline_at_ratio<T: Scalar>(n: usize, t: i64, m: usize) -> T {
    let x = BigRational::new(BigInt::from(t), BigInt::from(m));
    T::from(bspline_exact(n, &x).to_f64().unwrap_or(f64::NAN)).unwrap()
}

/// Largest integer `t` with `β^n(t/m) ≠ 0` possible, i.e. `|t| < m(n+1)/2`.
pub(crate) fn fine_radius(n: usize, m: usize) -> i64 {
    ((m * (n + 1)) as i64 - 1) / 2
}

/// Samples `β^n(t/m)` on the fine lattice, tensorized over `dim` axes.
pub fn bspline_fine_samples<T: Scalar>(n: usize, dim: usize, m: usize) -> Result<Filter<T>> {
    check_degree(n)?;
    if dim < 1 {
        return Err(Error::InvalidDimension(dim));
    }
    if m < 1 {
        return Err(Error::InvalidArgument("oversampling factor must be ≥ 1".into()));
    }
    let r = fine_radius(n, m);
    let axis = Filter::from_fn(&IndexBox::from_bounds(&[-r], &[r]).expect("r ≥ 0"), |t| {
        bspline_at_ratio(n, t.coords()[0], m)
    });
    Ok((1..dim).fold(axis.clone(), |acc, _| acc.tensor(&axis)))
}

/// Integer samples `β^n(k)` of the tensor-product B-spline on ℤᵈ.
pub fn bspline_samples<T: Scalar>(n: usize, dim: usize) -> Result<Filter<T>> {
    bspline_fine_samples(n, dim, 1)
}

/// `β̂^n(ω) = Π_j sinc(ω_j/2)^{n+1}` with `sinc t = sin t / t`.
pub fn bspline_symbol<T: Scalar>(n: usize, omega: &[T]) -> T {
    omega.iter().fold(T::one(), |acc, &w| {
        let t = w * cst(0.5);
        let s = if t == T::zero() { T::one() } else { t.sin() / t };
        acc * s.powi(n as i32 + 1)
    })
}
