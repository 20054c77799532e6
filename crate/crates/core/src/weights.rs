//! Submultiplicative weighting sequences and GRS diagnostics.
//!
//! Weights are evaluated in the log domain so that `w[mk]` stays finite for
//! the large dilation factors `m` used by the GRS estimates.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{IndexBox, MultiIndex};
use crate::scalar::{cst, Scalar};

/// Default acceptance band for `lim w[mk]^{1/m} ≤ 1 + tol`.
pub const DEFAULT_GRS_TOL: f64 = 0.05;

/// Relative slack in the submultiplicativity test.
pub const SUBMULTIPLICATIVE_SLACK: f64 = 1e-12;

pub type WeightFn<T> = Arc<dyn Fn(&[i64]) -> T + Send + Sync>;

#[derive(Clone)]
pub enum WeightKind<T> {
    /// `(1 + ∥k∥₂)ⁿ`
    Polynomial { order: T },
    /// `e^{r|k|₁}`
    Exponential { rate: T },
    /// `e^{r|k|₁^b}` with `0 ≤ b < 1`
    Subexponential { rate: T, exponent: T },
    Custom(WeightFn<T>),
}

impl<T: fmt::Debug> fmt::Debug for WeightKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Polynomial { order } => write!(f, "Polynomial({order:?})"),
            WeightKind::Exponential { rate } => write!(f, "Exponential({rate:?})"),
            WeightKind::Subexponential { rate, exponent } => write!(f, "Subexponential({rate:?}, {exponent:?})"),
            WeightKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Positive weighting sequence on ℤᵈ.
#[derive(Clone, Debug)]
pub struct Weight<T> {
    dim: usize,
    kind: WeightKind<T>,
}

impl<T: Scalar> Weight<T> {
    pub fn polynomial(dim: usize, order: T) -> Result<Self> {
        check_dim(dim)?;
        if !(order >= T::zero()) {
            return Err(Error::InvalidArgument("polynomial order must be ≥ 0".into()));
        }
        Ok(Weight { dim, kind: WeightKind::Polynomial { order } })
    }

    pub fn exponential(dim: usize, rate: T) -> Result<Self> {
        check_dim(dim)?;
        if !(rate >= T::zero()) {
            return Err(Error::InvalidArgument("exponential rate must be ≥ 0".into()));
        }
        Ok(Weight { dim, kind: WeightKind::Exponential { rate } })
    }

    pub fn subexponential(dim: usize, rate: T, exponent: T) -> Result<Self> {
        check_dim(dim)?;
        if !(rate >= T::zero()) || !(exponent >= T::zero() && exponent < T::one()) {
            return Err(Error::InvalidArgument("subexponential weight needs r ≥ 0 and 0 ≤ b < 1".into()));
        }
        Ok(Weight { dim, kind: WeightKind::Subexponential { rate, exponent } })
    }

    /// Arbitrary user weight. Positivity and symmetry are not checked here.
    pub fn custom(dim: usize, f: impl Fn(&[i64]) -> T + Send + Sync + 'static) -> Self {
        Weight { dim, kind: WeightKind::Custom(Arc::new(f)) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &WeightKind<T> {
        &self.kind
    }

    pub fn log_eval(&self, k: &MultiIndex) -> T {
        match &self.kind {
            WeightKind::Polynomial { order } => *order * (T::one() + cst::<T>(k.l2())).ln(),
            WeightKind::Exponential { rate } => *rate * T::from(k.l1()).unwrap(),
            WeightKind::Subexponential { rate, exponent } => {
                let n = k.l1();
                if n == 0 {
                    T::zero()
                } else {
                    *rate * T::from(n).unwrap().powf(*exponent)
                }
            }
            WeightKind::Custom(f) => f(k.coords()).ln(),
        }
    }

    pub fn eval(&self, k: &MultiIndex) -> T {
        match &self.kind {
            WeightKind::Custom(f) => f(k.coords()),
            _ => self.log_eval(k).exp(),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidDimension(dim))
    } else {
        Ok(())
    }
}

/// All pairs `(k, l)` in `bx × bx` with `w[k+l] > w[k]·w[l]·(1 + 1e−12)`.
pub fn submultiplicative_check<T: Scalar>(w: &Weight<T>, bx: &IndexBox) -> Vec<(MultiIndex, MultiIndex)> {
    let points: Vec<(MultiIndex, T)> = bx.iter().map(|k| {
        let lw = w.log_eval(&k);
        (k, lw)
    }).collect();
    let slack = cst::<T>(SUBMULTIPLICATIVE_SLACK).ln_1p();
    let mut violations = Vec::new();
    for (k, lk) in &points {
        for (l, ll) in &points {
            let lkl = w.log_eval(&k.add(l));
            // NaN log-weights (non-positive values) count as violations.
            if !(lkl <= *lk + *ll + slack) {
                violations.push((k.clone(), l.clone()));
            }
        }
    }
    violations
}

/// `r = max_{|k|₁ ≤ 1} log w[k]`, the exponent of the envelope `w[k] ≤ e^{r|k|₁}`.
pub fn envelope_rate<T: Scalar>(w: &Weight<T>) -> T {
    IndexBox::symmetric(w.dim(), 1)
        .iter()
        .filter(|k| k.l1() <= 1)
        .map(|k| w.log_eval(&k))
        .fold(T::zero(), |a, b| a.max(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrsVerdict {
    Grs,
    NotGrs,
    Inconclusive,
}

/// Sampled estimate of `lim_m w[mk]^{1/m}`.
#[derive(Clone, Debug)]
pub struct GrsEstimate<T> {
    pub direction: MultiIndex,
    /// `(m, w[mk]^{1/m})` at `m = 1, 2, 4, …, m_max`.
    pub samples: Vec<(u64, T)>,
    pub extrapolated_limit: T,
    pub verdict: GrsVerdict,
}

pub fn grs_limit<T: Scalar>(w: &Weight<T>, k: &MultiIndex, m_max: u64) -> Result<GrsEstimate<T>> {
    grs_limit_with_tol(w, k, m_max, cst(DEFAULT_GRS_TOL))
}

/// Since `m ↦ log w[mk]` is subadditive, the limit is the infimum of the
/// samples; the minimum over geometrically spaced `m` is reported.
pub fn grs_limit_with_tol<T: Scalar>(w: &Weight<T>, k: &MultiIndex, m_max: u64, tol: T) -> Result<GrsEstimate<T>> {
    if k.dim() != w.dim() {
        return Err(Error::DimensionMismatch { left: k.dim(), right: w.dim() });
    }
    if k.is_zero() {
        return Err(Error::InvalidArgument("GRS direction must be nonzero".into()));
    }
    if m_max < 16 {
        return Err(Error::InvalidArgument(format!("m_max must be ≥ 16, got {m_max}")));
    }
    let mut log_rates = Vec::new();
    let mut m = 1u64;
    while m <= m_max {
        let lw = w.log_eval(&k.scaled(m as i64));
        log_rates.push((m, lw / T::from(m).unwrap()));
        m *= 2;
    }
    let samples: Vec<(u64, T)> = log_rates.iter().map(|&(m, l)| (m, l.exp())).collect();
    let extrapolated_limit = samples.iter().map(|s| s.1).fold(T::infinity(), |a, b| a.min(b));

    let threshold = tol.ln_1p();
    let n = log_rates.len();
    let tail = &log_rates[n - 3..];
    let verdict = if extrapolated_limit <= T::one() + tol {
        GrsVerdict::Grs
    } else if tail.iter().all(|&(_, l)| l > threshold) && tail[2].1 >= cst::<T>(0.9) * tail[0].1 {
        GrsVerdict::NotGrs
    } else {
        GrsVerdict::Inconclusive
    };
    Ok(GrsEstimate { direction: k.clone(), samples, extrapolated_limit, verdict })
}

#[derive(Clone, Debug)]
pub struct ExtendedGrs<T> {
    pub per_weight: Vec<GrsEstimate<T>>,
    pub inf_limit: T,
    pub verdict: GrsVerdict,
}

/// Radius of the box on which a family is checked to be decreasing.
const FAMILY_CHECK_RADIUS: usize = 8;

/// `inf_n lim_m w_n[mk]^{1/m}` for a decreasing family `w_{n+1} ≤ w_n`.
pub fn extended_grs<T: Scalar>(family: &[Weight<T>], k: &MultiIndex, m_max: u64) -> Result<ExtendedGrs<T>> {
    let first = family.first().ok_or_else(|| Error::InvalidFamily("empty family".into()))?;
    if family.iter().any(|w| w.dim() != first.dim()) {
        return Err(Error::InvalidFamily("weights of different dimensions".into()));
    }
    let bx = IndexBox::symmetric(first.dim(), FAMILY_CHECK_RADIUS);
    let slack = cst::<T>(SUBMULTIPLICATIVE_SLACK).ln_1p();
    for (n, pair) in family.windows(2).enumerate() {
        if let Some(p) = bx.iter().find(|p| !(pair[1].log_eval(p) <= pair[0].log_eval(p) + slack)) {
            return Err(Error::InvalidFamily(format!("w_{} > w_{} at {p}", n + 1, n)));
        }
    }
    let per_weight = family.iter().map(|w| grs_limit(w, k, m_max)).collect::<Result<Vec<_>>>()?;
    let (best, inf_limit) = per_weight
        .iter()
        .enumerate()
        .map(|(i, e)| (i, e.extrapolated_limit))
        .fold((0, T::infinity()), |a, b| if b.1 < a.1 { b } else { a });
    let verdict = if inf_limit <= T::one() + cst(DEFAULT_GRS_TOL) {
        GrsVerdict::Grs
    } else if per_weight[best].verdict == GrsVerdict::NotGrs {
        GrsVerdict::NotGrs
    } else {
        GrsVerdict::Inconclusive
    };
    Ok(ExtendedGrs { per_weight, inf_limit, verdict })
}
