//! Charges, generalized distances and the MED criteria.
//!
//! All criterion arithmetic is done in logs. For a pair of points the
//! criterion term is
//!
//! ```text
//! gamma * (logf_i + logf_j) + 2p * log d_s(W x_i, W x_j)
//! ```
//!
//! which is `2p` times the log of `f_i^{gamma/2p} f_j^{gamma/2p} d_s`. Here
//! `d_s(u, v) = (mean_l |u_l - v_l|^s)^{1/s}` is the power mean of coordinate
//! gaps (the geometric mean when `s = 0`) and `W` is an optional whitening
//! matrix.

use nalgebra::DMatrix;

use crate::error::{MedError, Result};
use crate::linalg::{cholesky_lower, invert_lower};

/// `s` below this is treated as exactly zero (product form).
pub const S_ZERO_THRESHOLD: f64 = 1e-8;

/// Log of the charge `q = f^{-1/(2p)}`.
pub fn charge_log(logf: f64, p: usize) -> f64 {
    -logf / (2.0 * p as f64)
}

/// Power `s` plus an optional whitening matrix.
#[derive(Debug, Clone)]
pub struct DistanceSpec {
    s: f64,
    whitener: Option<DMatrix<f64>>,
    sigma: Option<DMatrix<f64>>,
}

impl DistanceSpec {
    pub fn unwhitened(s: f64) -> Self {
        assert!(s >= 0.0 && s.is_finite(), "s must be finite and non-negative");
        DistanceSpec {
            s,
            whitener: None,
            sigma: None,
        }
    }

    /// Scaled Euclidean distance (`s = 2`, no whitening).
    pub fn euclidean() -> Self {
        Self::unwhitened(2.0)
    }

    /// Whitened by `W = chol(sigma)^{-1}`, so that `W sigma W' = I`.
    pub fn whitened(s: f64, sigma: DMatrix<f64>) -> Result<Self> {
        let l = cholesky_lower(&sigma).ok_or_else(|| {
            MedError::SingularCovariance("whitening covariance is not positive definite".into())
        })?;
        let w = invert_lower(&l)?;
        let mut spec = Self::unwhitened(s);
        spec.whitener = Some(w);
        spec.sigma = Some(sigma);
        Ok(spec)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn is_product(&self) -> bool {
        self.s < S_ZERO_THRESHOLD
    }

    pub fn whitener(&self) -> Option<&DMatrix<f64>> {
        self.whitener.as_ref()
    }

    pub fn sigma(&self) -> Option<&DMatrix<f64>> {
        self.sigma.as_ref()
    }

    /// Same whitening with a different power.
    pub fn with_s(&self, s: f64) -> Self {
        DistanceSpec {
            s,
            ..self.clone()
        }
    }

    /// Applies `W` (identity when unwhitened).
    pub fn whiten(&self, x: &[f64]) -> Vec<f64> {
        match &self.whitener {
            None => x.to_vec(),
            Some(w) => (0..x.len())
                .map(|i| (0..=i).map(|j| w[(i, j)] * x[j]).sum())
                .collect(),
        }
    }

    /// `log d_s` between two points that are already whitened.
    #[inline]
    pub fn log_dist_whitened(&self, a: &[f64], b: &[f64]) -> f64 {
        log_power_mean_dist(a, b, self.s)
    }
}

/// `log d_s(a, b)`; `-inf` when the distance is zero.
#[inline]
pub fn log_power_mean_dist(a: &[f64], b: &[f64], s: f64) -> f64 {
    let p = a.len() as f64;
    if s < S_ZERO_THRESHOLD {
        let mut acc = 0.0;
        for (x, y) in a.iter().zip(b) {
            let d = (x - y).abs();
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += d.ln();
        }
        acc / p
    } else if s == 2.0 {
        let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        0.5 * (ss / p).ln()
    } else if s < 1.0 {
        // mean(|d|^s) - 1 accumulated via expm1 so that tiny s keeps precision
        let mut acc = 0.0;
        let mut any_nonzero = false;
        for (x, y) in a.iter().zip(b) {
            let d = (x - y).abs();
            if d == 0.0 {
                acc -= 1.0;
            } else {
                any_nonzero = true;
                acc += (s * d.ln()).exp_m1();
            }
        }
        if !any_nonzero {
            return f64::NEG_INFINITY;
        }
        (acc / p).ln_1p() / s
    } else {
        let m: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(s)).sum::<f64>() / p;
        m.ln() / s
    }
}

/// Generalized distance `d_s(W u, W v)`.
pub fn dist_s(u: &[f64], v: &[f64], spec: &DistanceSpec) -> f64 {
    spec.log_dist_whitened(&spec.whiten(u), &spec.whiten(v)).exp()
}

/// Criterion term from a precomputed `log d`.
#[inline]
pub fn pair_term_from_log_dist(logf_i: f64, logf_j: f64, log_d: f64, gamma: f64, p: usize) -> f64 {
    if log_d == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    gamma * (logf_i + logf_j) + 2.0 * p as f64 * log_d
}

/// `gamma (logf_i + logf_j) + 2p log d_s(W x_i, W x_j)`; `-inf` for coincident points.
pub fn pair_term_log(
    logf_i: f64,
    logf_j: f64,
    xi: &[f64],
    xj: &[f64],
    gamma: f64,
    spec: &DistanceSpec,
) -> f64 {
    let log_d = spec.log_dist_whitened(&spec.whiten(xi), &spec.whiten(xj));
    pair_term_from_log_dist(logf_i, logf_j, log_d, gamma, xi.len())
}

/// Log-scale value of a MED criterion and the pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionValue {
    /// `min_{i<j}` of the pair term (`2p log psi`).
    pub log_value: f64,
    pub pair: (usize, usize),
    pub dim: usize,
}

impl CriterionValue {
    /// `psi` itself, i.e. `exp(log_value / 2p)`.
    pub fn psi(&self) -> f64 {
        (self.log_value / (2.0 * self.dim as f64)).exp()
    }
}

/// `min` over all pairs of [`pair_term_log`]. Ties go to the lexicographically
/// smallest pair.
pub fn psi_log<P: AsRef<[f64]>>(
    points: &[P],
    logf: &[f64],
    gamma: f64,
    spec: &DistanceSpec,
) -> Result<CriterionValue> {
    let n = points.len();
    if n < 2 {
        return Err(MedError::invalid("criterion needs at least two points"));
    }
    if logf.len() != n {
        return Err(MedError::invalid("one log density per point is required"));
    }
    let p = points[0].as_ref().len();
    let w: Vec<Vec<f64>> = points.iter().map(|x| spec.whiten(x.as_ref())).collect();
    let mut best = CriterionValue {
        log_value: f64::INFINITY,
        pair: (0, 1),
        dim: p,
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let t = pair_term_from_log_dist(logf[i], logf[j], spec.log_dist_whitened(&w[i], &w[j]), gamma, p);
            if t < best.log_value {
                best.log_value = t;
                best.pair = (i, j);
            }
        }
    }
    Ok(best)
}
