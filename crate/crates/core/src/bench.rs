//! Matched-budget comparisons of samplers on densities with a known truth.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::density::{make_ar1_normal, DensityModel};
use crate::diagnostics::{cdf_transform, cl2_discrepancy, marginals_and_correlations, CdfTransform};
use crate::engine::{default_k, default_n};
use crate::error::{MedError, Result};
use crate::sampler::{SampleRequest, Sampler};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchEntry {
    pub sampler: String,
    pub points: usize,
    pub evaluations: usize,
    /// CL2 of the points after the target's Rosenblatt transform.
    pub cl2: f64,
    /// `|sample mean - true mean|` per coordinate (unit scale).
    pub mean_error: Vec<f64>,
    /// `sample sd / true sd` per coordinate.
    pub sd_ratio: Vec<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub density: String,
    pub dim: usize,
    pub n: usize,
    pub stages: usize,
    pub budget: usize,
    pub seed: u64,
    pub cl2_transform: CdfTransform,
    pub entries: Vec<BenchEntry>,
}

/// Runs every sampler that supports the model's dimension.
pub fn compare(model: &dyn DensityModel, samplers: &[Box<dyn Sampler>], request: &SampleRequest) -> Result<Comparison> {
    if model.is_external() {
        return Err(MedError::invalid("bench needs a builtin density; external densities have no cheap truth"));
    }
    let truth = model
        .truth()
        .ok_or_else(|| MedError::invalid(format!("density '{}' has no known truth to compare against", model.name())))?;
    let moments = truth.marginal_moments();
    let mut entries = Vec::new();
    for s in samplers.iter().filter(|s| s.supports(model.dim())) {
        let set = s.sample(model, request)?;
        let unit = cdf_transform(&set.points, CdfTransform::Truth, Some(&truth))?;
        let m = marginals_and_correlations(&set.points, 1)?;
        entries.push(BenchEntry {
            sampler: s.name().to_string(),
            points: set.points.len(),
            evaluations: set.evaluations,
            cl2: cl2_discrepancy(&unit)?,
            mean_error: m.marginals.iter().zip(&moments).map(|(a, (mu, _))| (a.mean - mu).abs()).collect(),
            sd_ratio: m.marginals.iter().zip(&moments).map(|(a, (_, sd))| a.sd / sd).collect(),
            note: set.note,
        });
    }
    Ok(Comparison {
        density: model.name().to_string(),
        dim: model.dim(),
        n: request.n,
        stages: request.stages,
        budget: request.budget(),
        seed: request.seed,
        cl2_transform: CdfTransform::Truth,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: usize,
    pub rho: f64,
    pub n: usize,
    pub stages: usize,
    pub cl2: BTreeMap<String, f64>,
}

/// CL2 against dimension for AR(1) normals with `rho = 0.9^{ln p}` and the
/// default `n` and `K` of each dimension.
pub fn ar1_sweep(dims: &[usize], sigma: f64, seed: u64, samplers: &[Box<dyn Sampler>]) -> Result<Vec<SweepRow>> {
    dims.iter()
        .map(|&p| {
            let rho = 0.9f64.powf((p as f64).ln());
            let model = make_ar1_normal(p, rho, sigma)?;
            let req = SampleRequest {
                n: default_n(p),
                stages: default_k(p),
                seed,
            };
            let c = compare(&model, samplers, &req)?;
            Ok(SweepRow {
                p,
                rho,
                n: req.n,
                stages: req.stages,
                cl2: c.entries.into_iter().map(|e| (e.sampler, e.cl2)).collect(),
            })
        })
        .collect()
}
