use std::fmt::{Debug, Display};
use std::iter::Sum;

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Real floating-point scalar the numerical core is generic over.
///
/// Dense linear algebra is delegated to `nalgebra`; the hooks below keep its
/// `RealField` bound out of generic code, where it would clash with `Float`.
pub trait Scalar: Float + FloatConst + FftNum + Sum + Display + Debug + Default + Send + Sync + 'static {
    /// Eigenvalues of the (balanced) companion matrix of `poly`, given highest
    /// degree first. `poly[0]` must be nonzero.
    fn companion_eigenvalues(poly: &[Self]) -> Vec<Complex<Self>>;

    /// Least-squares solution of the `rows x cols` row-major system, together
    /// with the extreme singular values `(smallest, largest)` of the matrix.
    fn least_squares(rows: usize, cols: usize, matrix: &[Self], rhs: &[Self]) -> LeastSquares<Self>;
}

#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    pub solution: Vec<T>,
    pub smallest_singular_value: T,
    pub largest_singular_value: T,
}

/// Converts an `f64` literal into the scalar type.
#[inline]
pub(crate) fn cst<T: Scalar>(v: f64) -> T {
    T::from(v).expect("f64 literal representable")
}

#[inline]
pub(crate) fn to_f64<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn balanced_companion<R: RealField + Copy>(poly: &[R]) -> DMatrix<R> {
    let n = poly.len() - 1;
    let lead = poly[0];
    let mut m = DMatrix::<R>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -poly[j + 1] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = R::one();
    }
    // Parlett-Reinsch balancing with radix 2.
    let radix = R::one() + R::one();
    let radix2 = radix * radix;
    let gamma = R::from_subset(&0.95);
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = R::zero();
            let mut r = R::zero();
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == R::zero() || r == R::zero() {
                continue;
            }
            let s = c + r;
            let mut f = R::one();
            let mut cc = c;
            let g = r / radix;
            while cc < g {
                f *= radix;
                cc *= radix2;
            }
            let g = r * radix;
            while cc > g {
                f /= radix;
                cc /= radix2;
            }
            if (cc + r / f) < gamma * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
    m
}

fn companion_eigenvalues_impl<R: RealField + Copy>(poly: &[R]) -> Vec<Complex<R>> {
    if poly.len() < 2 {
        return Vec::new();
    }
    balanced_companion(poly).complex_eigenvalues().iter().copied().collect()
}

fn least_squares_impl<R: RealField + Copy>(rows: usize, cols: usize, matrix: &[R], rhs: &[R]) -> LeastSquares<R> {
    let a = DMatrix::from_row_slice(rows, cols, matrix);
    let sv = a.clone().singular_values();
    let smallest = sv.iter().copied().fold(R::max_value().unwrap(), |a, b| a.min(b));
    let largest = sv.iter().copied().fold(R::zero(), |a, b| a.max(b));
    // Householder QR is backward stable for full column rank; the SVD solve of
    // this nalgebra version loses accuracy on some banded sizes
    let solution = if rows >= cols && smallest > R::zero() {
        let qr = a.qr();
        let mut b = DVector::from_column_slice(rhs);
        qr.q_tr_mul(&mut b);
        let top = b.rows(0, cols).into_owned();
        qr.r().solve_upper_triangular(&top).map(|x| x.iter().copied().collect())
    } else {
        a.svd(true, true).solve(&DVector::from_column_slice(rhs), R::zero()).ok().map(|x| x.iter().copied().collect())
    };
    LeastSquares {
        solution: solution.unwrap_or_else(|| vec![R::zero(); cols]),
        smallest_singular_value: smallest,
        largest_singular_value: largest,
    }
}

macro_rules! impl_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn companion_eigenvalues(poly: &[Self]) -> Vec<Complex<Self>> {
                companion_eigenvalues_impl(poly)
            }

            fn least_squares(rows: usize, cols: usize, matrix: &[Self], rhs: &[Self]) -> LeastSquares<Self> {
                least_squares_impl(rows, cols, matrix, rhs)
            }
        }
    )*};
}

impl_scalar!(f32, f64);
