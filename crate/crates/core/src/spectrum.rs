//! Frequency responses, certified lower bounds on their modulus, and
//! derivative-growth diagnostics for analyticity.

use num_complex::Complex;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::fft_nd;
use crate::lattice::Filter;
use crate::scalar::{cst, Scalar};

/// Starting grid size of the modulus certificate.
pub const CERTIFICATE_START_GRID: usize = 64;
/// Per-axis cap on the certificate grid.
pub const CERTIFICATE_MAX_GRID: usize = 1 << 16;
/// Cap on the total number of grid points of a certificate sweep.
pub const CERTIFICATE_MAX_POINTS: usize = 1 << 24;
/// Grid minima below this are reported as likely frequency nulls.
pub const DEFAULT_TARGET_GAP: f64 = 1e-9;

/// `ĥ(ω) = Σ_k h[k] e^{−i⟨ω,k⟩}`.
pub fn symbol_eval<T: Scalar>(h: &Filter<T>, omega: &[T]) -> Complex<T> {
    debug_assert_eq!(omega.len(), h.dim());
    let mut acc = Complex::new(T::zero(), T::zero());
    for (k, c) in h.iter() {
        if c == T::zero() {
            continue;
        }
        let phase = k.coords().iter().zip(omega).fold(T::zero(), |p, (&kj, &wj)| p + T::from(kj).unwrap() * wj);
        acc = acc + Complex::from_polar(c, -phase);
    }
    acc
}

/// Frequency response of a filter with its Lipschitz constant
/// `L = Σ_k |k|₁ |h[k]|`.
#[derive(Clone, Debug)]
pub struct Symbol<T> {
    source: Filter<T>,
    lipschitz: T,
}

impl<T: Scalar> Symbol<T> {
    pub fn new(h: &Filter<T>) -> Self {
        let lipschitz = h.iter().map(|(k, c)| T::from(k.l1()).unwrap() * c.abs()).sum();
        Symbol { source: h.clone(), lipschitz }
    }

    pub fn source(&self) -> &Filter<T> {
        &self.source
    }

    pub fn lipschitz(&self) -> T {
        self.lipschitz
    }

    pub fn eval(&self, omega: &[T]) -> Complex<T> {
        symbol_eval(&self.source, omega)
    }
}

/// `ĥ(2π i/n)` on the full `nᵈ` grid, row-major.
pub(crate) fn grid_symbol<T: Scalar>(h: &Filter<T>, n: usize) -> Vec<Complex<T>> {
    let d = h.dim();
    let shape = vec![n; d];
    let mut grid = vec![Complex::new(T::zero(), T::zero()); n.pow(d as u32)];
    for (k, c) in h.iter() {
        let mut idx = 0usize;
        for &kj in k.coords() {
            idx = idx * n + kj.rem_euclid(n as i64) as usize;
        }
        grid[idx].re = grid[idx].re + c;
    }
    fft_nd(&mut grid, &shape, FftDirection::Forward);
    grid
}

/// Angular frequency of grid index `i` folded into `(−π, π]`.
pub(crate) fn grid_frequency<T: Scalar>(i: usize, n: usize) -> T {
    let w = T::TAU() * T::from(i).unwrap() / T::from(n).unwrap();
    if w > T::PI() {
        w - T::TAU()
    } else {
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    /// The certified lower bound is positive: the symbol has no zero.
    Invertible,
    /// A grid minimum fell below the target gap.
    LikelySingular,
    /// The grid cap was reached without resolution.
    Inconclusive,
}

/// Grid minimum of `|ĥ|` with a rigorous lower bound over the whole torus.
#[derive(Clone, Debug, Serialize)]
pub struct ModulusCertificate<T> {
    pub grid_size: usize,
    pub grid_min: T,
    /// `min_j |ĥ(ω_j)| − |∇ĥ(ω_j)|₁·δ − L₂δ²/2 − ρ` with `δ = π/N` and `ρ` an
    /// allowance for rounding in the transforms.
    pub certified_lower_bound: T,
    pub argmin: Vec<T>,
    /// `Σ_k |k|₁ |h[k]|`
    pub lipschitz: T,
    /// `L₂ = Σ_k |k|₁² |h[k]|`
    pub curvature: T,
    pub status: CertificateStatus,
}

impl<T: Scalar> ModulusCertificate<T> {
    pub fn is_invertible(&self) -> bool {
        self.status == CertificateStatus::Invertible
    }
}

/// `min_j` of the second-order Taylor bound around each grid point. Every
/// `ω` lies within `δ` of a grid point along each axis.
fn taylor_lower_bound<T: Scalar>(h: &Filter<T>, n: usize, moduli: &[T], curvature: T) -> T {
    let delta = T::PI() / T::from(n).unwrap();
    let mut slope = vec![T::zero(); moduli.len()];
    for axis in 0..h.dim() {
        let weighted = Filter::from_fn(h.support(), |k| T::from(k.coords()[axis]).unwrap() * h.get(k.coords()));
        for (s, z) in slope.iter_mut().zip(grid_symbol(&weighted, n)) {
            *s = *s + z.norm();
        }
    }
    let l1: T = h.coeffs().iter().map(|c| c.abs()).sum();
    let rounding = l1 * T::epsilon() * cst(16.0) * T::from(n.max(2)).unwrap().log2() * T::from(h.dim()).unwrap();
    let quad = curvature * delta * delta / cst(2.0);
    moduli.iter().zip(&slope).map(|(&m, &s)| m - s * delta).fold(T::infinity(), T::min) - quad - rounding
}

/// Refines the grid by doubling from 64 points per axis until the bound is
/// positive or the grid minimum drops below `target_gap`.
pub fn min_modulus_certified<T: Scalar>(h: &Filter<T>, target_gap: T) -> Result<ModulusCertificate<T>> {
    if h.is_zero() {
        return Err(Error::InvalidArgument("zero filter has no modulus certificate".into()));
    }
    let d = h.dim();
    let lipschitz = Symbol::new(h).lipschitz();
    let curvature: T = h.iter().map(|(k, c)| T::from(k.l1() * k.l1()).unwrap() * c.abs()).sum();
    let mut n = CERTIFICATE_START_GRID;
    loop {
        let moduli: Vec<T> = grid_symbol(h, n).iter().map(|z| z.norm()).collect();
        let (imin, gmin) =
            moduli.iter().copied().enumerate().fold((0, T::infinity()), |a, b| if b.1 < a.1 { b } else { a });
        let mut argmin = vec![T::zero(); d];
        let mut rest = imin;
        for axis in (0..d).rev() {
            argmin[axis] = grid_frequency(rest % n, n);
            rest /= n;
        }
        let bound = if gmin < target_gap { gmin } else { taylor_lower_bound(h, n, &moduli, curvature) };
        let mut cert = ModulusCertificate {
            grid_size: n,
            grid_min: gmin,
            certified_lower_bound: bound,
            argmin,
            lipschitz,
            curvature,
            status: CertificateStatus::Inconclusive,
        };
        if bound > T::zero() {
            cert.status = CertificateStatus::Invertible;
            return Ok(cert);
        }
        if gmin < target_gap {
            cert.status = CertificateStatus::LikelySingular;
            return Ok(cert);
        }
        let next = n * 2;
        if next > CERTIFICATE_MAX_GRID || next.checked_pow(d as u32).is_none_or(|p| p > CERTIFICATE_MAX_POINTS) {
            return Ok(cert);
        }
        n = next;
    }
}

fn log_sum_exp<T: Scalar>(terms: impl Iterator<Item = T>) -> T {
    let v: Vec<T> = terms.collect();
    let m = v.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() {
        return m;
    }
    m + v.iter().map(|&t| (t - m).exp()).sum::<T>().ln()
}

pub(crate) fn log_factorial<T: Scalar>(n: usize) -> T {
    (2..=n).map(|i| T::from(i).unwrap().ln()).sum()
}

/// Least-squares line `y ≈ a + b x`; returns `(a, b, rms residual)`.
pub(crate) fn fit_line<T: Scalar>(xs: &[T], ys: &[T]) -> Option<(T, T, T)> {
    let n = T::from(xs.len()).unwrap();
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    if sxx == T::zero() {
        return None;
    }
    let sxy: T = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: T = xs.iter().zip(ys).map(|(&x, &y)| (y - a - b * x).powi(2)).sum();
    Some((a, b, (rss / n).sqrt()))
}

/// Moments `D_n = Σ_k |k|ⁿ |h[k]|` and the fitted constants of
/// `D_n ≈ C·n!/Rⁿ`.
#[derive(Clone, Debug, Serialize)]
pub struct DerivativeGrowth<T> {
    /// `log D_n` for `n = 0..=n_max` (−∞ where `D_n = 0`).
    pub log_moments: Vec<T>,
    pub c: T,
    /// Infinite when no moment beyond `n = 0` is nonzero.
    pub r: T,
    pub residual_rms: T,
}

impl<T: Scalar> DerivativeGrowth<T> {
    pub fn moment(&self, n: usize) -> T {
        self.log_moments[n].exp()
    }
}

pub const MAX_DERIVATIVE_ORDER: usize = 60;

pub fn derivative_growth<T: Scalar>(h: &Filter<T>, n_max: usize) -> Result<DerivativeGrowth<T>> {
    if h.dim() != 1 {
        return Err(Error::InvalidArgument("derivative growth is implemented for d = 1".into()));
    }
    if n_max > MAX_DERIVATIVE_ORDER {
        return Err(Error::InvalidArgument(format!("n_max must be ≤ {MAX_DERIVATIVE_ORDER}")));
    }
    if h.is_zero() {
        return Err(Error::InvalidArgument("zero filter".into()));
    }
    let entries: Vec<(T, T)> = h
        .iter()
        .filter(|(_, c)| *c != T::zero())
        .map(|(k, c)| (T::from(k.coords()[0].abs()).unwrap(), c.abs().ln()))
        .collect();
    let log_moments: Vec<T> = (0..=n_max)
        .map(|n| {
            log_sum_exp(entries.iter().filter(|(k, _)| n == 0 || *k > T::zero()).map(|&(k, lc)| {
                if n == 0 {
                    lc
                } else {
                    T::from(n).unwrap() * k.ln() + lc
                }
            }))
        })
        .collect();
    let (xs, ys): (Vec<T>, Vec<T>) = log_moments
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_finite())
        .map(|(n, &l)| (T::from(n).unwrap(), l - log_factorial::<T>(n)))
        .unzip();
    let (c, r, residual_rms) = match fit_line(&xs, &ys) {
        Some((a, b, rms)) => (a.exp(), (-b).exp(), rms),
        None => (log_moments[0].exp(), T::infinity(), T::zero()),
    };
    Ok(DerivativeGrowth { log_moments, c, r, residual_rms })
}

/// Numerical check of `Σ_{k≥0} kⁿ e^{−ck} ≤ M·n!/Rⁿ`.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaBound<T> {
    pub c: T,
    /// `S_n` for `n = 0..=n_max`.
    pub sums: Vec<T>,
    pub r: T,
    /// Supremum of admissible `R`: `min(1, (e^c − 1)/e)`.
    pub r_limit: T,
    /// `M = max_n S_n Rⁿ / n!`
    pub m: T,
    /// Index attaining `M`; `0` means the induction constant `M = S_0` works.
    pub argmax_n: usize,
    /// `max_n S_n Rⁿ / (M n!)`
    pub max_ratio: T,
    /// `max_n S_n Rⁿ / (S_0 n!)`, the ratio against the induction constant.
    pub induction_ratio: T,
}

/// Upper limit for `R` from the induction step: `R < 1` and
/// `e·e^{−c}/(1 − e^{−c}) < 1/R`.
pub fn lemma_radius_limit<T: Scalar>(c: T) -> T {
    T::one().min(c.exp_m1() / T::E())
}

pub fn lemma_bound_check<T: Scalar>(c: T, n_max: usize) -> Result<LemmaBound<T>> {
    if !(c > T::zero()) {
        return Err(Error::InvalidArgument("c must be positive".into()));
    }
    let r = cst::<T>(0.99) * lemma_radius_limit(c);
    lemma_bound_check_with_radius(c, n_max, r)
}

pub fn lemma_bound_check_with_radius<T: Scalar>(c: T, n_max: usize, r: T) -> Result<LemmaBound<T>> {
    if !(c > T::zero()) {
        return Err(Error::InvalidArgument("c must be positive".into()));
    }
    if n_max > MAX_DERIVATIVE_ORDER {
        return Err(Error::InvalidArgument(format!("n_max must be ≤ {MAX_DERIVATIVE_ORDER}")));
    }
    let r_limit = lemma_radius_limit(c);
    if !(r > T::zero() && r < r_limit) {
        return Err(Error::InvalidArgument(format!("R = {r} violates 0 < R < {r_limit}")));
    }
    let log_sums: Vec<T> = (0..=n_max).map(|n| log_moment_sum(c, n)).collect();
    let log_scaled: Vec<T> = log_sums
        .iter()
        .enumerate()
        .map(|(n, &ls)| ls + T::from(n).unwrap() * r.ln() - log_factorial::<T>(n))
        .collect();
    let (argmax_n, log_m) =
        log_scaled.iter().copied().enumerate().fold((0, T::neg_infinity()), |a, b| if b.1 > a.1 { b } else { a });
    let max_ratio = log_scaled.iter().map(|&l| (l - log_m).exp()).fold(T::zero(), T::max);
    let induction_ratio = log_scaled.iter().map(|&l| (l - log_sums[0]).exp()).fold(T::zero(), T::max);
    Ok(LemmaBound {
        c,
        sums: log_sums.iter().map(|l| l.exp()).collect(),
        r,
        r_limit,
        m: log_m.exp(),
        argmax_n,
        max_ratio,
        induction_ratio,
    })
}

/// `log Σ_{k≥0} kⁿ e^{−ck}` with the tail below `1e−13` of the sum.
fn log_moment_sum<T: Scalar>(c: T, n: usize) -> T {
    let nf = T::from(n).unwrap();
    let mut acc = if n == 0 { T::zero() } else { T::neg_infinity() };
    let tail_rel = cst::<T>(1e-13).ln();
    let settle = (cst::<T>(2.0) * nf / c).ceil() + T::one();
    let q = (-c / cst(2.0)).exp();
    let log_geo = (q / (T::one() - q)).ln();
    let mut k = 1usize;
    loop {
        let kf = T::from(k).unwrap();
        let term = nf * kf.ln() - c * kf;
        let hi = acc.max(term);
        acc = hi + ((acc - hi).exp() + (term - hi).exp()).ln();
        // beyond k ≥ 2n/c successive terms shrink by at least e^{−c/2}
        if kf >= settle && term + log_geo < acc + tail_rel {
            return acc;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::kronecker;

    fn cubic() -> Filter<f64> {
        Filter::from_slice(-1, &[1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0])
    }

    #[test]
    fn symbol_examples() {
        let d = kronecker::<f64>(1).unwrap();
        assert!((symbol_eval(&d, &[1.3]) - Complex::new(1.0, 0.0)).norm() < 1e-15);
        for w in [0.0, 0.7, 2.0, std::f64::consts::PI] {
            let v = symbol_eval(&cubic(), &[w]);
            assert!((v.re - (4.0 + 2.0 * w.cos()) / 6.0).abs() < 1e-15);
            assert!(v.im.abs() < 1e-15);
        }
        let diff = Filter::from_slice(0, &[1.0, -1.0]);
        assert!(symbol_eval(&diff, &[0.0]).norm() < 1e-15);
    }

    #[test]
    fn symbol_invariants() {
        let h = Filter::<f64>::from_slice(-2, &[0.3, -1.2, 0.5, 2.0, -0.1]);
        let s = Symbol::new(&h);
        assert!((s.eval(&[0.0]).re - h.sum()).abs() < 1e-12);
        assert!((s.lipschitz() - (2.0 * 0.3 + 1.2 + 0.0 + 2.0 + 2.0 * 0.1)).abs() < 1e-12);
        let n = 200;
        for i in 0..n {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            let b = std::f64::consts::TAU * (i + 1) as f64 / n as f64;
            assert!((s.eval(&[a]) - s.eval(&[b])).norm() <= s.lipschitz() * (b - a) + 1e-12);
        }
    }

    #[test]
    fn grid_symbol_matches_direct() {
        let h = Filter::from_fn(&crate::lattice::IndexBox::symmetric(2, 3), |k| 1.0 / (1.0 + k.l1() as f64));
        let n = 8;
        let g = grid_symbol(&h, n);
        for i in 0..n {
            for j in 0..n {
                let w = [std::f64::consts::TAU * i as f64 / n as f64, std::f64::consts::TAU * j as f64 / n as f64];
                assert!((g[i * n + j] - symbol_eval(&h, &w)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn certificate_examples() {
        let c = min_modulus_certified(&kronecker::<f64>(1).unwrap(), 1e-9).unwrap();
        assert_eq!(c.grid_size, 64);
        assert!(c.certified_lower_bound >= 1.0 - 1e-12);
        assert!(c.is_invertible());

        let c = min_modulus_certified(&cubic(), 1e-9).unwrap();
        assert!(c.is_invertible());
        assert!(c.certified_lower_bound >= 1.0 / 3.0 - std::f64::consts::PI / (3.0 * c.grid_size as f64) - 1e-12);
        assert!((c.grid_min - 1.0 / 3.0).abs() < 1e-12);

        let c = min_modulus_certified(&Filter::from_slice(0, &[1.0, -1.0]), 1e-9).unwrap();
        assert_eq!(c.status, CertificateStatus::LikelySingular);
        assert_eq!(c.grid_min, 0.0);
        assert_eq!(c.argmin, vec![0.0]);
        assert!(min_modulus_certified(&Filter::<f64>::zero(1), 1e-9).is_err());
    }

    #[test]
    fn near_null_certified_by_local_slope() {
        // (δ + 0.79δ₁)⁶ has min |ĥ| = 0.21⁶ ≈ 8.6e-5 at ω = π
        let f = Filter::<f64>::from_slice(0, &[1.0, 0.79]);
        let h = (0..5).fold(f.clone(), |acc, _| crate::lattice::convolve(&acc, &f).unwrap());
        let c = min_modulus_certified(&h, 1e-9).unwrap();
        assert!(c.is_invertible());
        assert!(c.certified_lower_bound <= 0.21f64.powi(6) + 1e-15);
        assert!(c.certified_lower_bound > 0.0);
    }

    #[test]
    fn derivative_growth_of_delta() {
        let g = derivative_growth(&kronecker::<f64>(1).unwrap(), 10).unwrap();
        assert_eq!(g.moment(0), 1.0);
        assert!(g.log_moments[1..].iter().all(|l| *l == f64::NEG_INFINITY));
        assert!(g.r.is_infinite());
        assert!(derivative_growth(&kronecker::<f64>(2).unwrap(), 10).is_err());
        assert!(derivative_growth(&Filter::<f64>::zero(1), 10).is_err());
    }

    #[test]
    fn exponential_moments_within_lemma_bound() {
        let h = Filter::from_fn(&crate::lattice::IndexBox::symmetric(1, 200), |k| (-(k.l1() as f64)).exp());
        let g = derivative_growth(&h, 40).unwrap();
        let lemma = lemma_bound_check(1.0f64, 40).unwrap();
        // two-sided sum: D_n ≤ 2 S_n ≤ 2 M n!/Rⁿ
        for n in 0..=40 {
            let bound = 2.0 * lemma.m * (log_factorial::<f64>(n) - n as f64 * lemma.r.ln()).exp();
            assert!(g.moment(n) <= bound * (1.0 + 1e-12), "n = {n}");
        }
    }

    #[test]
    fn lemma_examples() {
        let l = lemma_bound_check(1.0f64, 40).unwrap();
        let e = std::f64::consts::E;
        assert!((l.sums[0] - e / (e - 1.0)).abs() < 1e-12);
        assert!(l.max_ratio <= 1.0 + 1e-12);
        assert!(l.induction_ratio <= 1.0 + 1e-12);
        assert_eq!(l.argmax_n, 0);

        let l = lemma_bound_check(10.0f64, 40).unwrap();
        assert!(l.r > 0.98);
        assert!(l.max_ratio <= 1.0 + 1e-12);
        // S_1 = e^{-c}/(1 − e^{-c})²
        let q = (-10.0f64).exp();
        assert!((l.sums[1] - q / (1.0 - q).powi(2)).abs() < 1e-16);

        assert!(lemma_bound_check(0.0f64, 10).is_err());
        assert!(lemma_bound_check_with_radius(1.0f64, 10, 0.9).is_err());
    }

    #[test]
    fn moment_sums_match_direct_summation() {
        for &c in &[0.5f64, 2.0] {
            for n in [0usize, 3, 17] {
                let direct: f64 = (0..20000).map(|k| (k as f64).powi(n as i32) * (-c * k as f64).exp()).sum();
                let fast = log_moment_sum(c, n).exp();
                assert!((fast - direct).abs() <= 1e-12 * direct, "c={c} n={n}");
            }
        }
    }
}
