use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::Serialize;

use super::generator::{FourierSymbol, Generator};
use crate::error::{Error, Result};
use crate::fft::fft_nd;
use crate::inversion::{decay_fit, invert_stable, DecayReport};
use crate::lattice::{convolve, Filter, IndexBox, MultiIndex};
use crate::scalar::{cst, to_f64, Scalar};

/// Largest admissible estimated periodization tail, relative to the
/// pole-free denominator `1 + F(ω)/φ̂(ω)`.
pub const PERIODIZATION_TOL: f64 = 1e-6;
pub const DEFAULT_OVERSAMPLING: usize = 16;
pub const DEFAULT_KERNEL_RADIUS: usize = 20;
pub const DEFAULT_N_TRUNC: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum KernelRoute {
    Space { tail_tol: f64 },
    Fourier { n_trunc: usize, periodization_ratio: f64 },
}

/// Cardinal interpolant `φ_int` sampled at `j/M` for `|j|∞ ≤ K·M`.
#[derive(Clone, Debug)]
pub struct LagrangeKernel<T> {
    pub oversampling: usize,
    pub radius: usize,
    /// `φ_int(j/M)` indexed by the fine lattice point `j`.
    pub samples: Filter<T>,
    /// `φ_int(k)` for `|k|∞ ≤ K`.
    pub integer_samples: Filter<T>,
    /// Inverse of `φ[·]`; space route only.
    pub inverse_filter: Option<Filter<T>>,
    /// Fit of the cell envelope; `None` when too few cells are nonzero
    /// (compactly supported kernels).
    pub decay: Option<DecayReport<T>>,
    pub route: KernelRoute,
}

impl<T: Scalar> LagrangeKernel<T> {
    fn assemble(
        samples: Filter<T>,
        oversampling: usize,
        radius: usize,
        inverse_filter: Option<Filter<T>>,
        route: KernelRoute,
    ) -> Result<Self> {
        let d = samples.dim();
        let m = oversampling as i64;
        let integer_samples =
            Filter::from_fn(&IndexBox::symmetric(d, radius), |k| samples.get(k.scaled(m).coords()));
        let mut kernel =
            LagrangeKernel { oversampling, radius, samples, integer_samples, inverse_filter, decay: None, route };
        kernel.decay = match decay_fit(&kernel.envelope()) {
            Ok(r) => Some(r),
            Err(Error::DegenerateInput(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(kernel)
    }

    pub fn dim(&self) -> usize {
        self.samples.dim()
    }

    pub fn grid_step(&self) -> T {
        T::one() / T::from(self.oversampling).unwrap()
    }

    /// `φ_int(j/M)`, zero outside the sampled window.
    pub fn at_fine(&self, j: &[i64]) -> T {
        self.samples.get(j)
    }

    /// Fine-lattice index of `x`, if `x` is on the lattice.
    pub fn fine_index(&self, x: &[T]) -> Option<MultiIndex> {
        let m = T::from(self.oversampling).unwrap();
        let mut j = Vec::with_capacity(x.len());
        for &xi in x {
            let s = (xi * m).round();
            if (xi * m - s).abs() > cst(1e-9) {
                return None;
            }
            j.push(s.to_i64()?);
        }
        Some(MultiIndex::new(j))
    }

    /// `φ_int(x)` for `x` on the fine lattice (zero outside the window).
    pub fn eval(&self, x: &[T]) -> Result<T> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { left: x.len(), right: self.dim() });
        }
        let j = self.fine_index(x).ok_or_else(|| {
            Error::InvalidArgument(format!("point {x:?} is off the 1/{} kernel grid", self.oversampling))
        })?;
        Ok(self.samples.get(j.coords()))
    }

    /// `max |φ_int|` over each centered cell `k + [−1/2, 1/2)ᵈ` fully inside
    /// the window, i.e. `|k|∞ ≤ K − 1`.
    pub fn envelope(&self) -> Filter<T> {
        let d = self.dim();
        let m = self.oversampling as i64;
        let inner = self.radius.saturating_sub(1);
        let cells = IndexBox::symmetric(d, inner);
        let mut env = vec![T::zero(); cells.len()];
        for (j, v) in self.samples.iter() {
            let k: Vec<i64> = j.coords().iter().map(|&c| (c + m / 2).div_euclid(m)).collect();
            if let Some(i) = cells.offset(&k) {
                env[i] = env[i].max(v.abs());
            }
        }
        Filter::from_fn(&cells, |k| env[cells.offset(k.coords()).expect("cell in box")])
    }

    /// `max |φ_int(k) − δ[k]|` over `|k|₁ ≤ K − 1`.
    pub fn interpolation_error(&self) -> T {
        let limit = self.radius as i64 - 1;
        IndexBox::symmetric(self.dim(), self.radius).iter().filter(|k| k.l1() <= limit).fold(T::zero(), |e, k| {
            let target = if k.is_zero() { T::one() } else { T::zero() };
            e.max((self.integer_samples.get(k.coords()) - target).abs())
        })
    }

    /// Sup-norm distance between the sample sets of two kernels on the same grid.
    pub fn max_abs_diff(&self, other: &LagrangeKernel<T>) -> Result<T> {
        if self.oversampling != other.oversampling {
            return Err(Error::InvalidArgument("kernels sampled on different grids".into()));
        }
        Ok(self.samples.max_abs_diff(&other.samples))
    }
}

/// `h` on the fine lattice: `h[k]` at `M·k`, zero elsewhere.
fn upsample<T: Scalar>(h: &Filter<T>, m: usize) -> Filter<T> {
    let m = m as i64;
    let lo: Vec<i64> = h.support().origin().iter().map(|&o| o * m).collect();
    let hi: Vec<i64> = h.support().upper().iter().map(|&u| u * m).collect();
    let bx = IndexBox::from_bounds(&lo, &hi).expect("nonempty");
    Filter::from_fn(&bx, |j| {
        if j.coords().iter().all(|&c| c % m == 0) {
            let k: Vec<i64> = j.coords().iter().map(|&c| c / m).collect();
            h.get(&k)
        } else {
            T::zero()
        }
    })
}

/// `φ_int(x) = Σ_k h[k] φ(x − k)` with `h` the convolution inverse of the
/// integer samples `φ[·]`; coefficients with `|h[k]| ≤ tail_tol` are dropped.
pub fn lagrange_kernel_space<T: Scalar>(
    generator: &Generator<T>,
    oversampling: usize,
    radius: usize,
    tail_tol: T,
) -> Result<LagrangeKernel<T>> {
    if oversampling < 1 {
        return Err(Error::InvalidArgument("oversampling factor must be ≥ 1".into()));
    }
    let d = generator.dim();
    let phi = generator.integer_samples()?;
    let table = generator.fine_samples(oversampling)?;
    let reach = table.support().origin().iter().chain(&table.support().upper()).map(|c| c.unsigned_abs()).max().unwrap_or(0);
    let h_radius = radius + (reach as usize).div_ceil(oversampling) + 1;
    let h = invert_stable(&phi, tail_tol, h_radius)?;
    let kept = h.map(|c| if c.abs() > tail_tol { c } else { T::zero() });
    let full = convolve(&upsample(&kept, oversampling), &table)?;
    let samples = full.restricted(&IndexBox::symmetric(d, radius * oversampling));
    LagrangeKernel::assemble(samples, oversampling, radius, Some(h), KernelRoute::Space { tail_tol: to_f64(tail_tol) })
}

/// Sum `Σ_{t ≥ 1} u_t` of the terms following `last`, where the terms behave
/// like `A·(dist + step·t)^{−p}`, possibly with alternating signs.
fn tail_estimate<T: Scalar>(last: T, prev: T, dist: T, step: T, p: T) -> T {
    if last == T::zero() || !last.is_finite() {
        return T::zero();
    }
    let half = cst::<T>(0.5);
    if last * prev < T::zero() {
        -last * half * ((dist + step * half) / dist).powf(-p)
    } else {
        last * dist.powf(p) * (dist + step * half).powf(T::one() - p) / (step * (p - T::one()))
    }
}

struct ResidueData<T> {
    reciprocal: T,
    denominator: T,
    ratio: T,
}

fn residue_data<T: Scalar, S: FourierSymbol<T> + ?Sized>(
    symbol: &S,
    omega_r: &[T],
    n_trunc: i64,
    p: T,
) -> ResidueData<T> {
    let d = omega_r.len();
    let two_pi = T::PI() + T::PI();
    let at = |n: &[i64]| {
        let w: Vec<T> = omega_r.iter().zip(n).map(|(&o, &k)| o + two_pi * T::from(k).unwrap()).collect();
        symbol.symbol(&w)
    };
    let reciprocal = symbol.reciprocal(omega_r);
    let mut f = T::zero();
    let mut shell = T::zero();
    for n in IndexBox::symmetric(d, n_trunc as usize).iter() {
        if n.is_zero() {
            continue;
        }
        let v = at(n.coords());
        f = f + v;
        if n.coords().iter().any(|c| c.abs() == n_trunc) {
            shell = shell + v.abs();
        }
    }
    let tail = if d == 1 {
        let nt = T::from(n_trunc).unwrap();
        let o = omega_r[0];
        let plus = tail_estimate(at(&[n_trunc]), at(&[n_trunc - 1]), two_pi * nt + o, two_pi, p);
        let minus = tail_estimate(at(&[-n_trunc]), at(&[1 - n_trunc]), two_pi * nt - o, two_pi, p);
        f = f + plus + minus;
        plus.abs() + minus.abs()
    } else {
        shell * T::from(n_trunc).unwrap() / (p - T::from(d).unwrap())
    };
    let denominator = T::one() + reciprocal * f;
    ResidueData { reciprocal, denominator, ratio: tail * reciprocal / denominator }
}

fn decode(mut idx: usize, n: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; d];
    for a in (0..d).rev() {
        out[a] = idx % n;
        idx /= n;
    }
    out
}

/// `φ_int` from `φ̂_int(ω) = φ̂(ω) / Σ_n φ̂(ω + 2πn)`, evaluated in the
/// pole-free form `φ̂(ω)/φ̂(ω_r) / (1 + F(ω_r)/φ̂(ω_r))` with `ω_r` the
/// representative of `ω` in `[−π, π)ᵈ` and `F` the periodization without its
/// central term, truncated at `|n|∞ ≤ n_trunc` (plus an integral tail
/// correction in d = 1). Spatial period `P`, frequency step `2π/P`.
pub fn lagrange_kernel_fourier<T: Scalar, S: FourierSymbol<T> + ?Sized>(
    symbol: &S,
    n_trunc: usize,
    oversampling: usize,
    radius: usize,
) -> Result<LagrangeKernel<T>> {
    let d = symbol.dim();
    let p = symbol.decay_exponent();
    if p <= T::from(d).unwrap() {
        return Err(Error::InvalidArgument(format!("symbol decay |ω|^(−{p}) not summable in d = {d}")));
    }
    if n_trunc < 2 || oversampling < 1 {
        return Err(Error::InvalidArgument("need n_trunc ≥ 2 and oversampling ≥ 1".into()));
    }
    let m = oversampling;
    let period = (2 * radius + 16).next_power_of_two();
    let q_len = m * period;
    let half_p = (period / 2) as i64;
    let two_pi = T::PI() + T::PI();
    let freq = |r: i64| two_pi * T::from(r).unwrap() / T::from(period).unwrap();

    let residues: Vec<ResidueData<T>> = (0..period.pow(d as u32))
        .into_par_iter()
        .map(|i| {
            let w: Vec<T> = decode(i, period, d).iter().map(|&r| freq(r as i64 - half_p)).collect();
            residue_data(symbol, &w, n_trunc as i64, p)
        })
        .collect();
    let worst = residues.iter().fold(T::zero(), |a, r| a.max(r.ratio));
    if !(worst < cst(PERIODIZATION_TOL)) {
        return Err(Error::IncreaseTruncation { n_trunc, ratio: to_f64(worst) });
    }

    let s_max = n_trunc.div_ceil(m) as i64;
    let ml = m as i64;
    let folds = IndexBox::symmetric(d, s_max as usize);
    let mut grid: Vec<Complex<T>> = (0..q_len.pow(d as u32))
        .into_par_iter()
        .map(|i| {
            // grid index i ↔ frequency q ∈ [−Q/2, Q/2)ᵈ folded mod Q
            let q: Vec<i64> = decode(i, q_len, d)
                .iter()
                .map(|&c| if c >= q_len / 2 { c as i64 - q_len as i64 } else { c as i64 })
                .collect();
            let r: Vec<i64> = q.iter().map(|&c| (c + half_p).rem_euclid(period as i64) - half_p).collect();
            let n0: Vec<i64> = q.iter().zip(&r).map(|(&c, &rr)| (c - rr) / period as i64).collect();
            let ridx = r.iter().fold(0usize, |acc, &rr| acc * period + (rr + half_p) as usize);
            let data = &residues[ridx];
            let omega_r: Vec<T> = r.iter().map(|&rr| freq(rr)).collect();
            let term = |n: &[i64]| {
                if n.iter().all(|&c| c == 0) {
                    T::one()
                } else if data.reciprocal == T::zero() {
                    T::zero()
                } else {
                    let w: Vec<T> =
                        omega_r.iter().zip(n).map(|(&o, &k)| o + two_pi * T::from(k).unwrap()).collect();
                    data.reciprocal * symbol.symbol(&w)
                }
            };
            let shifted = |s: &[i64]| -> Vec<i64> { n0.iter().zip(s).map(|(&a, &b)| a + ml * b).collect() };
            let mut total = T::zero();
            for s in folds.iter() {
                total = total + term(&shifted(s.coords()));
            }
            if d == 1 {
                let step = two_pi * T::from(m).unwrap();
                for sign in [1i64, -1] {
                    let last_n = n0[0] + sign * ml * s_max;
                    let prev_n = last_n - sign * ml;
                    let dist = (omega_r[0] + two_pi * T::from(last_n).unwrap()).abs();
                    total = total + tail_estimate(term(&[last_n]), term(&[prev_n]), dist, step, p);
                }
            }
            Complex::new(total / data.denominator, T::zero())
        })
        .collect();
    fft_nd(&mut grid, &vec![q_len; d], FftDirection::Inverse);

    let scale = T::from(period).unwrap().powi(d as i32);
    let window = IndexBox::symmetric(d, radius * m);
    let samples = Filter::from_fn(&window, |j| {
        let idx = j.coords().iter().fold(0usize, |acc, &c| acc * q_len + c.rem_euclid(q_len as i64) as usize);
        grid[idx].re / scale
    });
    LagrangeKernel::assemble(
        samples,
        m,
        radius,
        None,
        KernelRoute::Fourier { n_trunc, periodization_ratio: to_f64(worst) },
    )
}
