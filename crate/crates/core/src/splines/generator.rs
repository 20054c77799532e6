use crate::error::{Error, Result};
use crate::lattice::{Filter, IndexBox};
use crate::scalar::Scalar;

use super::bspline::{bspline_fine_samples, bspline_symbol, bspline_value, check_degree};

/// Fourier transform `φ̂` of a generator, with the data the periodization
/// `Σ_n φ̂(ω + 2πn)` needs.
pub trait FourierSymbol<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    /// `φ̂(ω)`; may be infinite at `ω = 0`.
    fn symbol(&self, omega: &[T]) -> T;

    /// `1/φ̂(ω)`, finite everywhere on `[−π, π)ᵈ`.
    fn reciprocal(&self, omega: &[T]) -> T;

    /// `p` such that `|φ̂(ω)| ≲ ∥ω∥^{−p}` at infinity.
    fn decay_exponent(&self) -> T;
}

/// `φ̂(ω) = ∥ω∥₂^{−2m}`: the Green's function of `(−Δ)^m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenPower {
    pub m: usize,
    pub dim: usize,
}

impl<T: Scalar> FourierSymbol<T> for GreenPower {
    fn dim(&self) -> usize {
        self.dim
    }

    fn symbol(&self, omega: &[T]) -> T {
        T::one() / FourierSymbol::<T>::reciprocal(self, omega)
    }

    fn reciprocal(&self, omega: &[T]) -> T {
        omega.iter().map(|&w| w * w).sum::<T>().powi(self.m as i32)
    }

    fn decay_exponent(&self) -> T {
        T::from(2 * self.m).unwrap()
    }
}

/// `φ̂(ω) = Π_j sinc(ω_j/2)^{n+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BSplineSymbol {
    pub degree: usize,
    pub dim: usize,
}

impl<T: Scalar> FourierSymbol<T> for BSplineSymbol {
    fn dim(&self) -> usize {
        self.dim
    }

    fn symbol(&self, omega: &[T]) -> T {
        bspline_symbol(self.degree, omega)
    }

    fn reciprocal(&self, omega: &[T]) -> T {
        T::one() / bspline_symbol(self.degree, omega)
    }

    fn decay_exponent(&self) -> T {
        T::from(self.degree + 1).unwrap()
    }
}

/// Basis function `φ` whose integer shifts span the spline space.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator<T> {
    BSpline { degree: usize, dim: usize },
    /// Known through its symbol only.
    GreenPower { m: usize, dim: usize },
    /// `φ(t/oversampling) = samples[t]` on the fine lattice, zero elsewhere.
    Custom { oversampling: usize, samples: Filter<T> },
}

impl<T: Scalar> Generator<T> {
    pub fn bspline(degree: usize, dim: usize) -> Result<Self> {
        check_degree(degree)?;
        if dim < 1 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Generator::BSpline { degree, dim })
    }

    pub fn green_power(m: usize, dim: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidDimension(dim));
        }
        if 2 * m <= dim {
            return Err(Error::InvalidArgument(format!("∥ω∥^(−{}) is not integrable at infinity in d = {dim}", 2 * m)));
        }
        Ok(Generator::GreenPower { m, dim })
    }

    pub fn custom(oversampling: usize, samples: Filter<T>) -> Result<Self> {
        if oversampling < 1 {
            return Err(Error::InvalidArgument("oversampling factor must be ≥ 1".into()));
        }
        Ok(Generator::Custom { oversampling, samples })
    }

    pub fn dim(&self) -> usize {
        match self {
            Generator::BSpline { dim, .. } | Generator::GreenPower { dim, .. } => *dim,
            Generator::Custom { samples, .. } => samples.dim(),
        }
    }

    /// `φ[k] = φ(k)` on ℤᵈ.
    pub fn integer_samples(&self) -> Result<Filter<T>> {
        self.fine_samples(1)
    }

    /// `φ(t/m)` for `t` on the fine lattice.
    pub fn fine_samples(&self, m: usize) -> Result<Filter<T>> {
        match self {
            Generator::BSpline { degree, dim } => bspline_fine_samples(*degree, *dim, m),
            Generator::GreenPower { .. } => Err(Error::InvalidArgument(
                "green_power generators have no compact space form; use the Fourier route".into(),
            )),
            Generator::Custom { oversampling, samples } => {
                if !oversampling.is_multiple_of(m) && !m.is_multiple_of(*oversampling) {
                    return Err(Error::InvalidArgument(format!(
                        "custom samples at 1/{oversampling} cannot be resampled to 1/{m}"
                    )));
                }
                if m > *oversampling {
                    return Err(Error::InvalidArgument(format!(
                        "custom samples at 1/{oversampling} are coarser than 1/{m}"
                    )));
                }
                let step = (*oversampling / m) as i64;
                let lo: Vec<i64> = samples.support().origin().iter().map(|&o| o.div_euclid(step)).collect();
                let hi: Vec<i64> = samples.support().upper().iter().map(|&u| u.div_euclid(step)).collect();
                let bx = IndexBox::from_bounds(&lo, &hi).expect("nonempty support");
                Ok(Filter::from_fn(&bx, |t| {
                    let fine: Vec<i64> = t.coords().iter().map(|&c| c * step).collect();
                    samples.get(&fine)
                }))
            }
        }
    }

    /// `φ(x)`; custom generators only at points of their sampling lattice.
    pub fn space_eval(&self, x: &[T]) -> Result<T> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { left: x.len(), right: self.dim() });
        }
        match self {
            Generator::BSpline { degree, .. } => Ok(x.iter().fold(T::one(), |a, &xi| a * bspline_value(*degree, xi))),
            Generator::GreenPower { .. } => Err(Error::InvalidArgument("green_power has no space form".into())),
            Generator::Custom { oversampling, samples } => {
                let m = T::from(*oversampling).unwrap();
                let mut t = Vec::with_capacity(x.len());
                for &xi in x {
                    let s = (xi * m).round();
                    if (xi * m - s).abs() > T::from(1e-9).unwrap() {
                        return Err(Error::InvalidArgument(format!("{xi} is off the 1/{oversampling} sampling lattice")));
                    }
                    t.push(s.to_i64().unwrap());
                }
                Ok(samples.get(&t))
            }
        }
    }

    /// The Fourier-domain description, where one is available.
    pub fn fourier_symbol(&self) -> Option<Box<dyn FourierSymbol<T>>> {
        match *self {
            Generator::BSpline { degree, dim } => Some(Box::new(BSplineSymbol { degree, dim })),
            Generator::GreenPower { m, dim } => Some(Box::new(GreenPower { m, dim })),
            Generator::Custom { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splines::bspline::bspline_samples;

    #[test]
    fn green_symbol_and_reciprocal() {
        let g = GreenPower { m: 2, dim: 1 };
        assert_eq!(FourierSymbol::<f64>::reciprocal(&g, &[2.0]), 16.0);
        assert_eq!(FourierSymbol::<f64>::symbol(&g, &[2.0]), 1.0 / 16.0);
        assert_eq!(FourierSymbol::<f64>::decay_exponent(&g), 4.0);
        assert!(Generator::<f64>::green_power(1, 2).is_err());
    }

    #[test]
    fn custom_generator_resamples() {
        let fine = bspline_fine_samples::<f64>(3, 1, 4).unwrap();
        let g = Generator::custom(4, fine).unwrap();
        let ints = g.integer_samples().unwrap();
        assert!(ints.max_abs_diff(&bspline_samples(3, 1).unwrap()) < 1e-16);
        assert!((g.space_eval(&[0.25]).unwrap() - bspline_value(3, 0.25)).abs() < 1e-15);
        assert!(g.space_eval(&[0.1]).is_err());
        assert!(g.fine_samples(8).is_err());
    }

    #[test]
    fn tensor_space_eval() {
        let g = Generator::<f64>::bspline(3, 2).unwrap();
        assert!((g.space_eval(&[0.0, 1.0]).unwrap() - 4.0 / 36.0).abs() < 1e-15);
    }
}
