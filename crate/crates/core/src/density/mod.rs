//! Log-unnormalized densities on the unit hypercube, and the ledger that
//! records every evaluation.
//!
//! Models own an affine map from `[0,1]^p` to their original coordinates
//! ([`UnitBox`]); the engine only ever sees unit-scale points. Values are
//! log densities up to an additive constant; anything below
//! [`LOGF_FLOOR`] (including `-inf`) is clamped to it.

mod banana;
mod external;
mod ledger;
mod normal;
mod prior;
mod registry;
pub(crate) mod truth;
mod uniform;

pub use banana::{make_banana, Banana};
pub use external::{make_external, ExternalConfig, ExternalDensity, DIM_ENV_VAR};
pub use ledger::{EvaluationLedger, LedgerRecord};
pub use normal::{make_ar1_normal, Ar1Normal};
pub use prior::{make_piecewise_prior, PiecewisePrior, ProductPrior};
pub use registry::{DensityParams, DensityRegistry};
pub use truth::Truth;
pub use uniform::Uniform;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{MedError, Result};

/// Lowest log density the engine works with.
pub const LOGF_FLOOR: f64 = -1e10;

/// Clamps a log density to [`LOGF_FLOOR`]. NaN passes through.
pub fn floor_logf(v: f64) -> f64 {
    if v < LOGF_FLOOR {
        LOGF_FLOOR
    } else {
        v
    }
}

/// Per-coordinate affine map between the unit cube and original coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl UnitBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(MedError::invalid("box bounds must be non-empty and of equal length"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
            return Err(MedError::invalid("box requires finite lo < hi in every coordinate"));
        }
        Ok(UnitBox { lo, hi })
    }

    pub fn unit(p: usize) -> Self {
        UnitBox {
            lo: vec![0.0; p],
            hi: vec![1.0; p],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn to_original(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(u, (l, h))| l + u * (h - l))
            .collect()
    }

    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (l, h))| (x - l) / (h - l))
            .collect()
    }
}

/// A log-unnormalized density over `[0,1]^p`.
pub trait DensityModel: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn unit_box(&self) -> &UnitBox;

    /// Raw `log f(x)` at a unit-scale point, before flooring.
    fn log_density(&self, x: &[f64]) -> Result<f64>;

    /// Evaluates several points; results come back in request order.
    fn log_density_batch(&self, xs: &[&[f64]]) -> Vec<Result<f64>> {
        xs.iter().map(|x| self.log_density(x)).collect()
    }

    /// External models record wall-clock durations in the ledger; builtin
    /// ones record zero so ledgers stay byte-reproducible.
    fn is_external(&self) -> bool {
        false
    }

    /// Closed-form description of the target, when one is known.
    fn truth(&self) -> Option<Truth> {
        None
    }
}

fn check_dim(model: &dyn DensityModel, x: &[f64]) -> Result<()> {
    if x.len() != model.dim() {
        return Err(MedError::invalid(format!(
            "point has dimension {} but model '{}' has dimension {}",
            x.len(),
            model.name(),
            model.dim()
        )));
    }
    Ok(())
}

fn finish(x: &[f64], raw: f64) -> Result<f64> {
    if raw.is_nan() {
        return Err(MedError::Evaluation {
            point: x.to_vec(),
            reason: "density returned NaN".into(),
        });
    }
    Ok(floor_logf(raw))
}

/// Evaluates `log f(x)` and appends exactly one ledger record.
pub fn eval_logf(
    model: &dyn DensityModel,
    x: &[f64],
    ledger: &mut EvaluationLedger,
    stage: usize,
) -> Result<f64> {
    check_dim(model, x)?;
    let start = Instant::now();
    let logf = finish(x, model.log_density(x)?)?;
    let duration_ms = if model.is_external() {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    ledger.push(stage, x.to_vec(), logf, duration_ms);
    Ok(logf)
}

/// Evaluates a batch (possibly concurrently, for external models). Records
/// are appended in request order; on the first failure the records of the
/// points before it are kept and the error is returned.
pub fn eval_logf_batch<P: AsRef<[f64]>>(
    model: &dyn DensityModel,
    xs: &[P],
    ledger: &mut EvaluationLedger,
    stage: usize,
) -> Result<Vec<f64>> {
    for x in xs {
        check_dim(model, x.as_ref())?;
    }
    let refs: Vec<&[f64]> = xs.iter().map(|x| x.as_ref()).collect();
    let start = Instant::now();
    let results = model.log_density_batch(&refs);
    let per_point_ms = if model.is_external() && !xs.is_empty() {
        start.elapsed().as_secs_f64() * 1e3 / xs.len() as f64
    } else {
        0.0
    };
    let mut out = Vec::with_capacity(xs.len());
    for (x, r) in refs.iter().zip(results) {
        let logf = finish(x, r?)?;
        ledger.push(stage, x.to_vec(), logf, per_point_ms);
        out.push(logf);
    }
    Ok(out)
}
