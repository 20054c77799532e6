use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Filter, MultiIndex};
use crate::scalar::{cst, Scalar};
use crate::spectrum::fit_line;

/// Samples below this fraction of the sup are treated as rounding noise.
pub const DECAY_FLOOR: f64 = 1e-14;
/// A model wins only when its rms residual is this many times smaller.
pub const MODEL_PREFERENCE: f64 = 2.0;
pub const MIN_NONZERO_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DecayModel<T> {
    /// `|g[k]| ≈ C e^{−rate·|k|₁}`.
    Exponential { rate: T },
    /// `|g[k]| ≈ C (1 + |k|₁)^order`; `order < 0` means decay.
    Algebraic { order: T },
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport<T> {
    pub model: DecayModel<T>,
    pub rate: T,
    pub order: T,
    /// Fitted `log C` of the exponential and algebraic models.
    pub log_c_exponential: T,
    pub log_c_algebraic: T,
    pub rms_exponential: T,
    pub rms_algebraic: T,
    /// `max |g[k]| e^{rate·|k|₁}` over the samples above the floor, so that
    /// `|g[k]| ≤ envelope_exponential·e^{−rate·|k|₁}` on the window.
    pub envelope_exponential: T,
    /// `max |g[k]| (1 + |k|₁)^{−order}` over the samples above the floor.
    pub envelope_algebraic: T,
    /// `|k|₁` range of the samples entering the fit.
    pub window_used: (i64, i64),
    pub samples_used: usize,
}

impl<T: Scalar> DecayReport<T> {
    /// The winning model's parameter (the exponential rate when mixed).
    pub fn rate_or_order(&self) -> T {
        match self.model {
            DecayModel::Algebraic { order } => order,
            _ => self.rate,
        }
    }

    /// Envelope constant matching [`rate_or_order`](Self::rate_or_order).
    pub fn constant(&self) -> T {
        match self.model {
            DecayModel::Algebraic { .. } => self.envelope_algebraic,
            _ => self.envelope_exponential,
        }
    }

    /// Upper bound for `Σ_{|k|₁ > k_cut} |g[k]|` in d = 1 under the exponential
    /// envelope (infinite when the rate is not positive).
    pub fn exponential_tail(&self, k_cut: i64) -> T {
        if self.rate <= T::zero() {
            return T::infinity();
        }
        let q = (-self.rate).exp();
        cst::<T>(2.0) * self.envelope_exponential * q.powi((k_cut + 1) as i32) / (T::one() - q)
    }
}

/// Largest `|g|` per shell `|k|₁`, replaced by its running maximum taken
/// toward the far side of the trend: from the outside in for a decaying
/// sequence, from the inside out for a growing one. Returns `(|k|₁, log env)`.
fn shell_envelope<T: Scalar>(samples: &[(i64, T)]) -> Vec<(i64, T)> {
    let mut shells: Vec<(i64, T)> = Vec::new();
    let mut sorted = samples.to_vec();
    sorted.sort_by_key(|p| p.0);
    for (r, v) in sorted {
        match shells.last_mut() {
            Some(last) if last.0 == r => last.1 = last.1.max(v),
            _ => shells.push((r, v)),
        }
    }
    let xs: Vec<T> = shells.iter().map(|p| T::from(p.0).unwrap()).collect();
    let ys: Vec<T> = shells.iter().map(|p| p.1.ln()).collect();
    let decaying = fit_line(&xs, &ys).is_some_and(|(_, b, _)| b < T::zero());
    let mut run = T::zero();
    if decaying {
        for p in shells.iter_mut().rev() {
            run = run.max(p.1);
            p.1 = run;
        }
    } else {
        for p in shells.iter_mut() {
            run = run.max(p.1);
            p.1 = run;
        }
    }
    shells.into_iter().map(|(r, v)| (r, v.ln())).collect()
}

/// Least-squares fits of the log shell envelope against `|k|₁` and against
/// `log(1 + |k|₁)` over the outer half `|k|₁ ≥ max|k|₁/2` of the samples above
/// the noise floor. The verdict compares each fitted model's rms misfit on the
/// envelope of every sample above the floor: an algebraic order fitted to a
/// narrow outer band mimics an exponential there but not further in.
pub fn decay_fit<T: Scalar>(g: &Filter<T>) -> Result<DecayReport<T>> {
    let sup = g.sup_norm();
    let floor = sup * cst(DECAY_FLOOR);
    let nonzero: Vec<_> = g.iter().filter(|(_, v)| *v != T::zero()).collect();
    if nonzero.len() < MIN_NONZERO_SAMPLES {
        return Err(Error::DegenerateInput(format!(
            "{} nonzero samples, at least {MIN_NONZERO_SAMPLES} required",
            nonzero.len()
        )));
    }
    if nonzero.iter().all(|(k, _)| k.is_zero()) {
        return Err(Error::DegenerateInput("all samples vanish away from the origin".into()));
    }
    let usable: Vec<_> = nonzero.iter().filter(|(k, v)| v.abs() > floor && !k.is_zero()).collect();
    let max_l1 = usable.iter().map(|(k, _)| k.l1()).max().unwrap_or(0);
    let mut fit_set: Vec<_> = usable.iter().filter(|(k, _)| 2 * k.l1() >= max_l1).collect();
    if fit_set.len() < 3 {
        fit_set = usable.iter().collect();
    }
    let degenerate = || Error::DegenerateInput("too few distinct sample radii above the noise floor".into());
    let shells = |set: &[&&(MultiIndex, T)]| {
        shell_envelope(&set.iter().map(|(k, v)| (k.l1(), v.abs())).collect::<Vec<_>>())
    };
    let env = shells(&fit_set);
    let ys: Vec<T> = env.iter().map(|p| p.1).collect();
    let xe: Vec<T> = env.iter().map(|p| T::from(p.0).unwrap()).collect();
    let xa: Vec<T> = env.iter().map(|p| T::from(1 + p.0).unwrap().ln()).collect();
    let (ae, be, _) = fit_line(&xe, &ys).ok_or_else(degenerate)?;
    let (aa, ba, _) = fit_line(&xa, &ys).ok_or_else(degenerate)?;
    // parameters come from the outer half, the verdict from how each model
    // carries over to every sample above the floor
    let all: Vec<_> = usable.iter().collect();
    let full = shells(&all);
    let rms = |f: &dyn Fn(i64) -> T| {
        let ss: T = full.iter().map(|&(r, y)| (y - f(r)).powi(2)).sum();
        (ss / T::from(full.len()).unwrap()).sqrt()
    };
    let rms_e = rms(&|r| ae + be * T::from(r).unwrap());
    let rms_a = rms(&|r| aa + ba * T::from(1 + r).unwrap().ln());
    let rate = -be;
    let order = ba;

    let pref = cst::<T>(MODEL_PREFERENCE);
    let model = if rms_e * pref < rms_a {
        DecayModel::Exponential { rate }
    } else if rms_a * pref < rms_e {
        DecayModel::Algebraic { order }
    } else {
        DecayModel::Mixed
    };

    let mut env_e = T::zero();
    let mut env_a = T::zero();
    for (k, v) in usable.iter().copied().chain(nonzero.iter().filter(|(k, _)| k.is_zero())) {
        env_e = env_e.max(v.abs() * (rate * T::from(k.l1()).unwrap()).exp());
        env_a = env_a.max(v.abs() * T::from(1 + k.l1()).unwrap().powf(-order));
    }
    let lo = fit_set.iter().map(|(k, _)| k.l1()).min().unwrap_or(0);
    let hi = fit_set.iter().map(|(k, _)| k.l1()).max().unwrap_or(0);
    Ok(DecayReport {
        model,
        rate,
        order,
        log_c_exponential: ae,
        log_c_algebraic: aa,
        rms_exponential: rms_e,
        rms_algebraic: rms_a,
        envelope_exponential: env_e,
        envelope_algebraic: env_a,
        window_used: (lo, hi),
        samples_used: fit_set.len(),
    })
}
