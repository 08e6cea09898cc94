//! Follow-up chains on a global surrogate, started at design points.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::metropolis::{metropolis_chain, ChainSpec};
use crate::density::floor_logf;
use crate::engine::MAX_SIGMA_CONDITION;
use crate::error::{MedError, Result};
use crate::linalg::{cholesky_lower, sample_covariance, shrink_to_condition};
use crate::rng::Domain;
use crate::surrogate::LimitKriging;

/// `p_i = f_i / sum f`, computed from log densities with the maximum removed.
pub fn softmax_weights(logf: &[f64]) -> Vec<f64> {
    let m = logf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logf.iter().map(|l| (l - m).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// `ceil(N p_i)`, treating products within `1e-9` of an integer as that
/// integer, and never below one.
pub fn chain_lengths(weights: &[f64], total: usize) -> Vec<usize> {
    weights
        .iter()
        .map(|w| {
            let v = total as f64 * w;
            let r = v.round();
            let len = if (v - r).abs() <= 1e-9 * v.max(1.0) { r } else { v.ceil() };
            (len as usize).max(1)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FollowupConfig {
    /// Total number of samples `N`.
    pub total: usize,
    pub seed: u64,
    /// Proposal covariance is `scale^2 / p` times the design covariance.
    pub scale: f64,
}

impl FollowupConfig {
    pub fn new(total: usize, seed: u64) -> Self {
        FollowupConfig {
            total,
            seed,
            scale: 2.38,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FollowupSamples {
    pub points: Vec<Vec<f64>>,
    /// Surrogate log density of each sample.
    pub logf: Vec<f64>,
    /// Index of the chain (design point) each sample came from.
    pub chain: Vec<usize>,
    pub lengths: Vec<usize>,
    pub acceptance_rate: f64,
    pub burn_in: usize,
}

/// Runs one Metropolis chain per design point on `surrogate`, of length
/// `ceil(N p_i)`, and pools the states in chain order. No exact density is
/// evaluated.
pub fn followup_mcmc<P: AsRef<[f64]>>(
    design: &[P],
    logf: &[f64],
    surrogate: &LimitKriging,
    config: &FollowupConfig,
) -> Result<FollowupSamples> {
    let n = design.len();
    if n < 2 || logf.len() != n {
        return Err(MedError::invalid("follow-up needs a design of at least two points with log densities"));
    }
    if config.total == 0 {
        return Err(MedError::invalid("N: must be at least 1"));
    }
    let p = design[0].as_ref().len();
    let cov = sample_covariance(design);
    let cov = if (0..p).all(|i| cov[(i, i)] > 0.0) {
        shrink_to_condition(&cov, MAX_SIGMA_CONDITION)
    } else {
        DMatrix::identity(p, p) / 12.0
    };
    let scale = cholesky_lower(&(cov * (config.scale * config.scale / p as f64)))
        .ok_or_else(|| MedError::SingularCovariance("follow-up proposal covariance".into()))?;

    let lengths = chain_lengths(&softmax_weights(logf), config.total);
    let mut out = FollowupSamples {
        points: Vec::new(),
        logf: Vec::new(),
        chain: Vec::new(),
        lengths: lengths.clone(),
        acceptance_rate: 0.0,
        burn_in: 0,
    };
    let target = |x: &[f64]| Ok(floor_logf(surrogate.predict(x)));
    let mut accepted = 0.0;
    let mut proposed = 0usize;
    for (i, (x, &len)) in design.iter().zip(&lengths).enumerate() {
        let spec = ChainSpec {
            start: x.as_ref().to_vec(),
            length: len,
            scale: scale.clone(),
            target_acceptance: None,
            seed: config.seed.wrapping_add(i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            max_evals: None,
        };
        let start = floor_logf(surrogate.predict(x.as_ref()));
        let chain = metropolis_chain(&spec, start, target, Domain::Followup)?;
        accepted += chain.acceptance_rate * (len - 1) as f64;
        proposed += len - 1;
        out.points.extend(chain.points);
        out.logf.extend(chain.logf);
        out.chain.extend(std::iter::repeat_n(i, len));
    }
    out.acceptance_rate = if proposed == 0 { 0.0 } else { accepted / proposed as f64 };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn length_examples() {
        assert_eq!(chain_lengths(&[0.01], 10_000), vec![100]);
        let w = softmax_weights(&[0.0; 109]);
        let l = chain_lengths(&w, 10_000);
        assert!(l.iter().all(|&v| v == 92));
    }

    #[test]
    fn surrogate_chains_use_no_exact_evaluations() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![0.1 + 0.15 * i as f64, 0.5]).collect();
        let y: Vec<f64> = x.iter().map(|v| -20.0 * (v[0] - 0.5f64).powi(2)).collect();
        let s = LimitKriging::fit_default(&x, &y).unwrap();
        let out = followup_mcmc(&x, &y, &s, &FollowupConfig::new(500, 1)).unwrap();
        let total: usize = out.lengths.iter().sum();
        assert_eq!(out.points.len(), total);
        assert!((500..=506).contains(&total));
        assert!(out.points.iter().all(|p| p.iter().all(|v| (0.0..=1.0).contains(v))));
        assert_eq!(out.chain[0], 0);
        assert_eq!(*out.chain.last().unwrap(), 5);
        let again = followup_mcmc(&x, &y, &s, &FollowupConfig::new(500, 1)).unwrap();
        assert_eq!(out, again);
    }

    proptest! {
        #[test]
        fn softmax_is_a_distribution_and_shift_invariant(
            logf in proptest::collection::vec(-50.0f64..50.0, 1..40),
            shift in -100.0f64..100.0,
        ) {
            let w = softmax_weights(&logf);
            prop_assert!(w.iter().all(|v| *v > 0.0 && *v <= 1.0));
            assert_relative_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            let shifted: Vec<f64> = logf.iter().map(|l| l + shift).collect();
            for (a, b) in w.iter().zip(softmax_weights(&shifted)) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn chain_length_sum_is_bounded(
            logf in proptest::collection::vec(-20.0f64..0.0, 1..120),
            total in 1usize..20_000,
        ) {
            let l = chain_lengths(&softmax_weights(&logf), total);
            let s: usize = l.iter().sum();
            prop_assert!(s >= total && s <= total + logf.len(), "sum {} N {} n {}", s, total, logf.len());
        }
    }
}
