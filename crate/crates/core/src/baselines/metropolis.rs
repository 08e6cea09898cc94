//! Random-walk Metropolis with the robust adaptive scaling of Vihola: the
//! lower-triangular proposal factor `S` is updated after every step so that
//! `S S'` becomes `S (I + eta_i (alpha_i - alpha*) u u' / |u|^2) S'`, with
//! `eta_i = i^{-2/3}`. Proposals leaving the unit cube are rejected without
//! evaluating the density.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::density::{eval_logf, DensityModel, EvaluationLedger};
use crate::error::{MedError, Result};
use crate::linalg::cholesky_lower;
use crate::rng::{stream, Domain};

pub const DEFAULT_TARGET_ACCEPTANCE: f64 = 0.234;

#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub start: Vec<f64>,
    /// Number of states recorded, the start included.
    pub length: usize,
    /// Lower-triangular proposal factor.
    pub scale: DMatrix<f64>,
    /// `None` disables adaptation.
    pub target_acceptance: Option<f64>,
    pub seed: u64,
    /// Stops the chain once this many densities have been evaluated.
    pub max_evals: Option<usize>,
}

impl ChainSpec {
    /// Isotropic start with `sd` per coordinate, adapting toward 0.234.
    pub fn new(start: Vec<f64>, length: usize, sd: f64, seed: u64) -> Self {
        let p = start.len();
        ChainSpec {
            start,
            length,
            scale: DMatrix::identity(p, p) * sd,
            target_acceptance: Some(DEFAULT_TARGET_ACCEPTANCE),
            seed,
            max_evals: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let p = self.start.len();
        if self.length == 0 {
            return Err(MedError::invalid("chain length must be at least 1"));
        }
        if self.scale.nrows() != p || self.scale.ncols() != p {
            return Err(MedError::invalid("proposal scale must be p x p"));
        }
        if (0..p).any(|i| self.scale[(i, i)] == 0.0) {
            return Err(MedError::invalid("proposal scale must be nonsingular"));
        }
        if !self.start.iter().all(|v| (0.0..=1.0).contains(v)) {
            return Err(MedError::invalid("chain must start inside the unit cube"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub points: Vec<Vec<f64>>,
    pub logf: Vec<f64>,
    /// Accepted proposals over proposals made.
    pub acceptance_rate: f64,
    pub evaluations: usize,
    /// Final proposal factor.
    pub scale: DMatrix<f64>,
}

fn adapt(scale: &DMatrix<f64>, u: &DVector<f64>, step: usize, alpha: f64, target: f64) -> DMatrix<f64> {
    let norm2 = u.norm_squared();
    if norm2 == 0.0 {
        return scale.clone();
    }
    let p = u.len();
    let eta = (step as f64).powf(-2.0 / 3.0).min(1.0);
    let m = DMatrix::identity(p, p) + u * u.transpose() * (eta * (alpha - target) / norm2);
    let cov = scale * m * scale.transpose();
    cholesky_lower(&cov).unwrap_or_else(|| scale.clone())
}

/// Metropolis chain on an arbitrary log target. `logf(x)` is only called for
/// proposals inside the unit cube.
pub fn metropolis_chain<F>(spec: &ChainSpec, start_logf: f64, mut logf: F, domain: Domain) -> Result<Chain>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    spec.validate()?;
    let p = spec.start.len();
    let mut rng = stream(spec.seed, domain, 0, 0);
    let mut scale = spec.scale.clone();
    let mut x = DVector::from_column_slice(&spec.start);
    let mut lx = start_logf;
    let mut points = vec![spec.start.clone()];
    let mut values = vec![start_logf];
    let mut evaluations = 0;
    let mut accepted = 0;
    let mut proposed = 0;

    while points.len() < spec.length {
        if spec.max_evals.is_some_and(|m| evaluations >= m) {
            break;
        }
        proposed += 1;
        let u = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = &x + &scale * &u;
        let alpha = if y.iter().all(|v| (0.0..=1.0).contains(v)) {
            let ly = logf(y.as_slice())?;
            evaluations += 1;
            let a = (ly - lx).min(0.0).exp();
            if rng.random::<f64>() < a {
                x = y;
                lx = ly;
                accepted += 1;
            }
            a
        } else {
            0.0
        };
        if let Some(target) = spec.target_acceptance {
            scale = adapt(&scale, &u, proposed, alpha, target);
        }
        points.push(x.as_slice().to_vec());
        values.push(lx);
    }
    Ok(Chain {
        points,
        logf: values,
        acceptance_rate: if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 },
        evaluations,
        scale,
    })
}

/// Robust adaptive Metropolis on `model`; every density call, the start
/// included, is recorded in `ledger` under stage 0.
pub fn adaptive_metropolis(model: &dyn DensityModel, spec: &ChainSpec, ledger: &mut EvaluationLedger) -> Result<Chain> {
    spec.validate()?;
    if spec.max_evals == Some(0) {
        return Err(MedError::invalid("max_evals must be at least 1"));
    }
    let l0 = eval_logf(model, &spec.start, ledger, 0)?;
    let mut inner = spec.clone();
    inner.max_evals = spec.max_evals.map(|m| m - 1);
    let mut chain = metropolis_chain(&inner, l0, |y| eval_logf(model, y, ledger, 0), Domain::Chain)?;
    chain.evaluations += 1;
    Ok(chain)
}
