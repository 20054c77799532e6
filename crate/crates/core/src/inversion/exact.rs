use num_complex::Complex;

use super::roots::{factor_symbol, Factorization, Root, RootClass};
use crate::error::{Error, Result};
use crate::lattice::{Filter, IndexBox};
use crate::scalar::Scalar;

/// One term `A/(1 − z w)^p` of the partial-fraction expansion of `1/ĥ`.
#[derive(Clone, Copy, Debug)]
struct PoleTerm<T> {
    root: Complex<T>,
    power: usize,
    coeff: Complex<T>,
    causal: bool,
}

/// Closed-form two-sided inverse of a 1-D filter whose symbol has no zero on
/// the unit circle.
#[derive(Clone, Debug)]
pub struct ExactInverse1D<T> {
    pub inner_roots: Vec<Root<T>>,
    pub outer_roots: Vec<Root<T>>,
    /// Always empty for a successfully constructed inverse.
    pub unit_roots: Vec<Root<T>>,
    /// Partial-fraction coefficients, ordered root by root and by power.
    pub residues: Vec<Complex<T>>,
    pub gain: T,
    /// `−log max(|z_inner|, 1/|z_outer|)`.
    pub decay_rate: T,
    factorization: Factorization<T>,
    terms: Vec<PoleTerm<T>>,
}

fn binomial<T: Scalar>(n: i64, k: usize) -> T {
    if n < k as i64 {
        return if k == 0 { T::one() } else { T::zero() };
    }
    (1..=k).fold(T::one(), |acc, i| acc * T::from(n - k as i64 + i as i64).unwrap() / T::from(i).unwrap())
}

impl<T: Scalar> ExactInverse1D<T> {
    pub(crate) fn from_factorization(factorization: Factorization<T>) -> Result<Self> {
        let mut inner = Vec::new();
        let mut outer = Vec::new();
        let mut unit = Vec::new();
        for r in &factorization.roots {
            match r.class() {
                RootClass::Inner => inner.push(*r),
                RootClass::Outer => outer.push(*r),
                RootClass::Unit => unit.push(*r),
            }
        }
        if !unit.is_empty() {
            return Err(Error::SingularSymbol { count: unit.iter().map(|r| r.multiplicity).sum() });
        }
        let terms = partial_fractions(&factorization.roots);
        let worst_inner = inner.iter().map(|r| r.z.norm()).fold(T::zero(), T::max);
        let worst_outer = outer.iter().map(|r| T::one() / r.z.norm()).fold(T::zero(), T::max);
        let decay_rate = -(worst_inner.max(worst_outer)).ln();
        Ok(ExactInverse1D {
            inner_roots: inner,
            outer_roots: outer,
            unit_roots: unit,
            residues: terms.iter().map(|t| t.coeff).collect(),
            gain: factorization.gain,
            decay_rate,
            factorization,
            terms,
        })
    }

    /// `g[k]`, complex-valued in general.
    pub fn eval_complex(&self, k: i64) -> Complex<T> {
        let n = k + self.factorization.k_min;
        if self.terms.is_empty() {
            let v = if n == 0 { T::one() / self.gain } else { T::zero() };
            return Complex::new(v, T::zero());
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for t in &self.terms {
            let p = t.power;
            let v = if t.causal {
                if n < 0 {
                    continue;
                }
                t.root.powi(n as i32) * binomial::<T>(n + p as i64 - 1, p - 1)
            } else {
                if n > -(p as i64) {
                    continue;
                }
                let sign = if p % 2 == 0 { T::one() } else { -T::one() };
                t.root.powi(n as i32) * (binomial::<T>(-n - 1, p - 1) * sign)
            };
            acc = acc + t.coeff * v;
        }
        acc / self.gain
    }

    /// `g[k]` for a real filter.
    pub fn eval(&self, k: i64) -> T {
        self.eval_complex(k).re
    }

    pub fn window(&self, bx: &IndexBox) -> Filter<T> {
        Filter::from_fn(bx, |k| self.eval(k.coords()[0]))
    }

    /// `g` on `[−radius, radius]`.
    pub fn to_filter(&self, radius: usize) -> Filter<T> {
        self.window(&IndexBox::symmetric(1, radius))
    }

    /// The filter rebuilt from gain and roots.
    pub fn reconstruct(&self) -> Filter<T> {
        self.factorization.reconstruct()
    }

    pub fn factorization(&self) -> &Factorization<T> {
        &self.factorization
    }
}

/// Expansion `Π_j (1 − z_j w)^{−m_j} = Σ_j Σ_p A_{j,p} (1 − z_j w)^{−p}`.
///
/// `A_{j, m_j − s}` is the `s`-th Taylor coefficient in `u = 1 − z_j w` of the
/// remaining factors, each `(1 − z_i w)^{−m_i} = c_i (1 + a_i u)^{−m_i}` with
/// `c_i = ((z_j − z_i)/z_j)^{−m_i}` and `a_i = z_i/(z_j − z_i)`.
fn partial_fractions<T: Scalar>(roots: &[Root<T>]) -> Vec<PoleTerm<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut terms = Vec::new();
    for (j, rj) in roots.iter().enumerate() {
        let m = rj.multiplicity;
        let mut series = vec![zero; m];
        series[0] = one;
        for (i, ri) in roots.iter().enumerate() {
            if i == j {
                continue;
            }
            let diff = rj.z - ri.z;
            let c = (diff / rj.z).powi(-(ri.multiplicity as i32));
            let a = ri.z / diff;
            // (1 + a u)^{−mi} = Σ_s (−1)^s C(mi + s − 1, s) a^s u^s
            let factor: Vec<Complex<T>> = (0..m)
                .map(|s| {
                    let sign = if s % 2 == 0 { T::one() } else { -T::one() };
                    a.powi(s as i32) * (sign * binomial::<T>((ri.multiplicity + s) as i64 - 1, s))
                })
                .collect();
            let mut next = vec![zero; m];
            for (p, &x) in series.iter().enumerate() {
                for (q, &y) in factor.iter().enumerate().take(m - p) {
                    next[p + q] = next[p + q] + x * y;
                }
            }
            series = next.into_iter().map(|v| v * c).collect();
        }
        let causal = rj.z.norm() < T::one();
        for (s, &coeff) in series.iter().enumerate() {
            terms.push(PoleTerm { root: rj.z, power: m - s, coeff, causal });
        }
    }
    terms
}

/// Exact inverse through the zeros of the symbol polynomial.
pub fn invert_exact_1d<T: Scalar>(h: &Filter<T>) -> Result<ExactInverse1D<T>> {
    if h.dim() != 1 {
        return Err(Error::InvalidArgument("exact inversion requires d = 1".into()));
    }
    ExactInverse1D::from_factorization(factor_symbol(h)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{convolve, convolve_direct, kronecker};

    fn cubic() -> Filter<f64> {
        Filter::from_slice(-1, &[1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0])
    }

    #[test]
    fn cubic_closed_form() {
        let inv = invert_exact_1d(&cubic()).unwrap();
        let s3 = 3f64.sqrt();
        assert!((inv.decay_rate - (2.0 + s3).ln()).abs() < 1e-12);
        for k in -30i64..=30 {
            let expected = s3 * (s3 - 2.0).powi(k.abs() as i32);
            assert!((inv.eval(k) - expected).abs() < 1e-14, "k = {k}");
        }
        assert_eq!(inv.inner_roots.len(), 1);
        assert_eq!(inv.outer_roots.len(), 1);
        assert!(inv.unit_roots.is_empty());
    }

    #[test]
    fn causal_geometric_inverse() {
        let h = Filter::from_slice(0, &[1.0, -0.5]);
        let inv = invert_exact_1d(&h).unwrap();
        assert!((inv.decay_rate - 2f64.ln()).abs() < 1e-14);
        for k in -10i64..=30 {
            let expected = if k >= 0 { 0.5f64.powi(k as i32) } else { 0.0 };
            assert!((inv.eval(k) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_root_rejected() {
        let h = Filter::from_slice(0, &[1.0, -1.0]);
        assert!(matches!(invert_exact_1d(&h), Err(Error::SingularSymbol { count: 1 })));
    }

    #[test]
    fn repeated_roots_use_higher_order_poles() {
        // (δ − 0.5δ₁)² ∗ (δ − 3δ₁): a double inner root and an outer root
        let a = Filter::<f64>::from_slice(0, &[1.0, -0.5]);
        let b = Filter::from_slice(0, &[1.0, -3.0]);
        let h = convolve(&convolve(&a, &a).unwrap(), &b).unwrap();
        let inv = invert_exact_1d(&h).unwrap();
        assert_eq!(inv.inner_roots[0].multiplicity, 2);
        let g = inv.to_filter(60);
        let r = convolve_direct(&h, &g).unwrap().sub(&kronecker(1).unwrap());
        for k in -50i64..=50 {
            assert!(r.get(&[k]).abs() < 1e-12, "k = {k}: {}", r.get(&[k]));
        }
    }

    #[test]
    fn shifted_filter_inverse_is_shifted_back() {
        let h = cubic().shifted(&[4]);
        let inv = invert_exact_1d(&h).unwrap();
        let base = invert_exact_1d(&cubic()).unwrap();
        for k in -20i64..=20 {
            assert!((inv.eval(k) - base.eval(k + 4)).abs() < 1e-14);
        }
    }

    #[test]
    fn reconstruction_matches() {
        let h = Filter::from_slice(-2, &[0.2, -0.1, 1.5, 0.3, 0.1]);
        let inv = invert_exact_1d(&h).unwrap();
        assert!(inv.reconstruct().max_abs_diff(&h) <= 1e-8 * h.sup_norm());
    }
}
