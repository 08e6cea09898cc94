use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{MedError, Result};
use crate::linalg::{sample_covariance, shrink_to_condition};

/// Largest condition number allowed for a stage covariance.
pub const MAX_SIGMA_CONDITION: f64 = 1e6;

/// `gamma_k = (k - 1) / (K - 1)` for `k = 1..K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    gammas: Vec<f64>,
}

impl AnnealSchedule {
    pub fn new(stages: usize) -> Result<Self> {
        if stages < 2 {
            return Err(MedError::invalid(format!("stages: must be at least 2, got {stages}")));
        }
        let last = (stages - 1) as f64;
        let gammas = (0..stages).map(|k| k as f64 / last).collect();
        Ok(AnnealSchedule { gammas })
    }

    pub fn stages(&self) -> usize {
        self.gammas.len()
    }

    /// `gamma_k` for a 1-based stage index.
    pub fn gamma(&self, stage: usize) -> f64 {
        self.gammas[stage - 1]
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }
}

/// `2 (1 - exp(gamma (lo - hi)))` for log densities `lo <= hi`.
pub fn adaptive_s(fk_min_log: f64, fk_max_log: f64, gamma: f64) -> f64 {
    let gap = (fk_min_log - fk_max_log).min(0.0);
    let s = -2.0 * (gamma * gap).exp_m1();
    s.clamp(0.0, 2.0)
}

/// Linear-interpolated empirical quantile (`q` in `[0, 1]`).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < v.len() {
        v[i] + frac * (v[i + 1] - v[i])
    } else {
        v[i]
    }
}

/// Lower and upper summary of a design's log densities: min/max, or the
/// given quantiles.
pub fn logf_range(logf: &[f64], quantiles: Option<(f64, f64)>) -> (f64, f64) {
    match quantiles {
        Some((lo, hi)) => (quantile(logf, lo), quantile(logf, hi)),
        None => {
            let lo = logf.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = logf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        }
    }
}

/// Covariance used to whiten stage `k + 1`: `gamma_k / gamma_{k+1}` times the
/// sample covariance of `D_k`, conditioned to at most
/// [`MAX_SIGMA_CONDITION`].
pub fn update_sigma<P: AsRef<[f64]>>(
    dk: &[P],
    p: usize,
    gamma_k: f64,
    gamma_k1: f64,
    whitening: bool,
) -> DMatrix<f64> {
    if !whitening {
        return DMatrix::identity(p, p);
    }
    let uniform = DMatrix::identity(p, p) / 12.0;
    if gamma_k <= 0.0 || gamma_k1 <= 0.0 || dk.len() < 2 {
        return uniform;
    }
    let cov = sample_covariance(dk) * (gamma_k / gamma_k1);
    let max_diag = (0..p).map(|i| cov[(i, i)]).fold(0.0, f64::max);
    if !(max_diag > 0.0) || !max_diag.is_finite() {
        return uniform;
    }
    shrink_to_condition(&cov, MAX_SIGMA_CONDITION)
}
