use num_complex::Complex;
use serde::Serialize;

use super::decay::{decay_fit, DecayReport};
use super::exact::ExactInverse1D;
use super::roots::{factor_symbol, Factorization, Root, RootClass};
use super::stable::{inverse_residual, verification_box};
use crate::error::{Error, Result};
use crate::lattice::{Filter, IndexBox};
use crate::scalar::{cst, to_f64, Scalar};

/// Residual tolerance of the singular path, relative to `max(1, sup|g|·∥h∥₁)`.
pub const SINGULAR_RESIDUAL_TOL: f64 = 1e-9;
const ANTICAUSAL_CAP: usize = 100_000;
const UNIT_SNAP: f64 = 1e-12;

/// A slowly increasing causal inverse of a filter whose symbol vanishes on the
/// unit circle, sampled on `window`.
#[derive(Clone, Debug, Serialize)]
pub struct SlowGrowthSeq<T> {
    pub window: IndexBox,
    pub values: Vec<T>,
    /// `Σ m_j − 1` over the unit-circle zeros.
    pub growth_order: usize,
    /// `|g[k]| ≤ bound_constant·(1 + |k|)^growth_order` for all `k`.
    pub bound_constant: T,
    /// `sup |(h ∗ g − δ)[k]|` over `verified_on`.
    pub residual: T,
    pub verified_on: IndexBox,
}

impl<T: Scalar> SlowGrowthSeq<T> {
    pub fn get(&self, k: i64) -> T {
        self.window.offset(&[k]).map_or(T::zero(), |i| self.values[i])
    }

    pub fn to_filter(&self) -> Filter<T> {
        Filter::from_raw(self.window.clone(), self.values.clone())
    }

    pub fn decay_fit(&self) -> Result<DecayReport<T>> {
        decay_fit(&self.to_filter())
    }

    /// Largest `|g[k]| / (C(1 + |k|)ⁿ)` over the window; at most 1.
    pub fn bound_ratio(&self) -> T {
        self.window.iter().zip(&self.values).fold(T::zero(), |m, (k, &v)| {
            let env = self.bound_constant * (T::one() + T::from(k.l1()).unwrap()).powi(self.growth_order as i32);
            m.max(v.abs() / env)
        })
    }
}

/// Causal inverse of a 1-D filter with unit-circle zeros `e^{iω_j}` of
/// multiplicities `m_j`: the stable factor is inverted in closed form and each
/// `(δ − e^{iω_j}δ[· − 1])` by the running sum `y[n] = x[n] + e^{iω_j} y[n − 1]`.
pub fn invert_singular_1d<T: Scalar>(h: &Filter<T>, window_radius: usize) -> Result<SlowGrowthSeq<T>> {
    if h.dim() != 1 {
        return Err(Error::InvalidArgument("singular inversion requires d = 1".into()));
    }
    let f = factor_symbol(h)?;
    let (mut unit, rest): (Vec<Root<T>>, Vec<Root<T>>) =
        f.roots.iter().copied().partition(|r| r.class() == RootClass::Unit);
    // Put unit roots exactly on the circle, and real ones exactly at ±1.
    for r in &mut unit {
        r.z = r.z / r.z.norm();
        if r.z.im.abs() <= cst(UNIT_SNAP) {
            r.z = Complex::new(r.z.re.signum(), T::zero());
        }
    }
    if unit.is_empty() {
        return Err(Error::WrongBranch);
    }
    let total_mult: usize = unit.iter().map(|r| r.multiplicity).sum();
    let growth_order = total_mult - 1;
    let stable = ExactInverse1D::from_factorization(Factorization { gain: f.gain, k_min: f.k_min, roots: rest })?;

    // Stable inverse is negligible left of −k_min − anticausal.
    let anticausal = if stable.outer_roots.is_empty() {
        0
    } else {
        let n = (40.0 + 2.0 * stable.outer_roots.len() as f64 * 10.0) / to_f64(stable.decay_rate);
        (n.ceil() as usize).min(ANTICAUSAL_CAP)
    };
    let k0 = (-f.k_min - anticausal as i64).min(0);
    let hi = window_radius as i64;
    if hi < k0 {
        return Err(Error::InvalidArgument(format!("window radius {window_radius} too small")));
    }
    let window = IndexBox::from_bounds(&[k0], &[hi]).expect("k0 ≤ hi");

    let mut acc: Vec<Complex<T>> = window.iter().map(|k| stable.eval_complex(k.coords()[0])).collect();
    for r in &unit {
        for _ in 0..r.multiplicity {
            for i in 1..acc.len() {
                acc[i] = acc[i] + r.z * acc[i - 1];
            }
        }
    }
    let values: Vec<T> = acc.iter().map(|c| c.re).collect();
    let g = Filter::from_raw(window.clone(), values.clone());

    let verified_on = verification_box(h, &window)
        .ok_or_else(|| Error::InvalidArgument(format!("window radius {window_radius} too small")))?;
    let residual = inverse_residual(h, &g, &verified_on);
    let h_l1: T = h.coeffs().iter().map(|c| c.abs()).sum();
    let scale = T::one().max(g.sup_norm() * h_l1);
    if residual > cst::<T>(SINGULAR_RESIDUAL_TOL) * scale {
        return Err(Error::ToleranceUnreachable { tolerance: SINGULAR_RESIDUAL_TOL, best_residual: to_f64(residual) });
    }

    let bound_constant = stable_moment(&stable, -f.k_min, growth_order) * cst(1.0 + 1e-12);
    Ok(SlowGrowthSeq { window, values, growth_order, bound_constant, residual, verified_on })
}

/// `Σ_l |s[l]| (1 + |l|)ⁿ` for the stable inverse `s`, summed outward from its
/// centre until the terms are negligible.
fn stable_moment<T: Scalar>(s: &ExactInverse1D<T>, centre: i64, n: usize) -> T {
    let weight = |l: i64| (T::one() + T::from(l.abs()).unwrap()).powi(n as i32);
    let mut total = s.eval_complex(centre).norm() * weight(centre);
    let mut quiet = 0;
    for step in 1i64.. {
        let left = s.eval_complex(centre - step).norm() * weight(centre - step);
        let right = s.eval_complex(centre + step).norm() * weight(centre + step);
        total = total + left + right;
        let edge = left.max(right);
        quiet = if edge <= total * T::epsilon() * cst(1e-4) { quiet + 1 } else { 0 };
        if quiet >= 8 || step as usize > ANTICAUSAL_CAP {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inversion::DecayModel;
    use crate::lattice::convolve;

    fn diff() -> Filter<f64> {
        Filter::from_slice(0, &[1.0, -1.0])
    }

    #[test]
    fn difference_gives_unit_step() {
        let g = invert_singular_1d(&diff(), 50).unwrap();
        assert_eq!(g.growth_order, 0);
        for k in 0..=50 {
            assert!((g.get(k) - 1.0).abs() < 1e-12);
        }
        assert_eq!(g.get(-1), 0.0);
        assert!(g.residual < 1e-12);
    }

    #[test]
    fn double_difference_gives_ramp() {
        let h = convolve(&diff(), &diff()).unwrap();
        let g = invert_singular_1d(&h, 60).unwrap();
        assert_eq!(g.growth_order, 1);
        for k in 0..=60 {
            assert!((g.get(k) - (k + 1) as f64).abs() < 1e-6 * (k + 1) as f64, "k = {k}: {}", g.get(k));
        }
        assert!(g.bound_ratio() <= 1.0);
    }

    #[test]
    fn composition_with_cubic_tends_to_one() {
        let cubic = Filter::from_slice(-1, &[1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0]);
        let h = convolve(&diff(), &cubic).unwrap();
        let g = invert_singular_1d(&h, 80).unwrap();
        assert_eq!(g.growth_order, 0);
        assert!((g.get(80) - 1.0).abs() < 1e-12);
        assert!(g.residual < 1e-9);
        assert!(g.bound_ratio() <= 1.0);
    }

    #[test]
    fn alternating_root_is_modulated() {
        let h = Filter::<f64>::from_slice(0, &[1.0, 1.0]);
        let g = invert_singular_1d(&h, 20).unwrap();
        for k in 0..=20 {
            let expected = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((g.get(k) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn stable_filter_is_wrong_branch() {
        let h = Filter::from_slice(0, &[1.0, -0.5]);
        assert_eq!(invert_singular_1d(&h, 10).unwrap_err(), Error::WrongBranch);
    }

    #[test]
    fn ramp_fits_algebraic_order_one() {
        let h = convolve(&diff(), &diff()).unwrap();
        let r = invert_singular_1d(&h, 200).unwrap().decay_fit().unwrap();
        match r.model {
            DecayModel::Algebraic { order } => assert!((order - 1.0).abs() < 0.02),
            other => panic!("{other:?}"),
        }
    }
}
