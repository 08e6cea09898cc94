//! Samplers compared by the benchmark harness, selectable by name.

use std::collections::BTreeMap;

use crate::baselines::{adaptive_metropolis, ChainSpec};
use crate::density::{DensityModel, EvaluationLedger, Truth};
use crate::engine::{MedEngine, RunConfig};
use crate::error::{MedError, Result};
use crate::qmc::{hammersley, sobol};

/// Size of a benchmark run; the evaluation budget is `n * stages`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleRequest {
    pub n: usize,
    pub stages: usize,
    pub seed: u64,
}

impl SampleRequest {
    pub fn budget(&self) -> usize {
        self.n * self.stages
    }
}

/// Points in the density's unit coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<Vec<f64>>,
    pub evaluations: usize,
    pub note: String,
}

pub trait Sampler: Send + Sync {
    fn name(&self) -> &str;

    fn supports(&self, _dim: usize) -> bool {
        true
    }

    fn sample(&self, model: &dyn DensityModel, request: &SampleRequest) -> Result<SampleSet>;
}

/// Final design of an annealed MED run.
pub struct MedSampler;

impl Sampler for MedSampler {
    fn name(&self) -> &str {
        "med"
    }

    fn sample(&self, model: &dyn DensityModel, r: &SampleRequest) -> Result<SampleSet> {
        let config = RunConfig::for_dimension(model.dim()).with_size(r.n, r.stages).with_seed(r.seed);
        let mut ledger = EvaluationLedger::new();
        let out = MedEngine::new(config).run(model, &mut ledger)?;
        Ok(SampleSet {
            points: out.design.points.into_iter().map(|x| x.into_inner()).collect(),
            evaluations: ledger.count(),
            note: format!("final {}-point design", r.n),
        })
    }
}

/// Robust adaptive Metropolis chain run until the evaluation budget is
/// spent; every recorded state is kept.
pub struct MetropolisSampler {
    pub initial_sd: f64,
}

impl Sampler for MetropolisSampler {
    fn name(&self) -> &str {
        "metropolis"
    }

    fn sample(&self, model: &dyn DensityModel, r: &SampleRequest) -> Result<SampleSet> {
        let mut spec = ChainSpec::new(vec![0.5; model.dim()], usize::MAX, self.initial_sd, r.seed);
        spec.max_evals = Some(r.budget());
        let mut ledger = EvaluationLedger::new();
        let chain = adaptive_metropolis(model, &spec, &mut ledger)?;
        Ok(SampleSet {
            points: chain.points,
            evaluations: ledger.count(),
            note: format!(
                "robust adaptive Metropolis (rank-1 triangular update, target 0.234) started at the box center; acceptance {:.3}",
                chain.acceptance_rate
            ),
        })
    }
}

fn require_truth(model: &dyn DensityModel, sampler: &str) -> Result<Truth> {
    model
        .truth()
        .ok_or_else(|| MedError::invalid(format!("sampler '{sampler}' needs a density with a known distribution function")))
}

/// Hammersley points pushed through the inverse Rosenblatt transform of the
/// known target; uses no density evaluations.
pub struct HammersleySampler;

impl Sampler for HammersleySampler {
    fn name(&self) -> &str {
        "hammersley"
    }

    fn sample(&self, model: &dyn DensityModel, r: &SampleRequest) -> Result<SampleSet> {
        let truth = require_truth(model, self.name())?;
        let points = hammersley(r.budget(), model.dim())
            .iter()
            .map(|u| truth.from_uniform(u))
            .collect();
        Ok(SampleSet {
            points,
            evaluations: 0,
            note: "inverse-transformed Hammersley set".into(),
        })
    }
}

/// Two-dimensional Sobol points through the inverse Rosenblatt transform.
pub struct SobolSampler;

impl Sampler for SobolSampler {
    fn name(&self) -> &str {
        "sobol"
    }

    fn supports(&self, dim: usize) -> bool {
        dim <= 2
    }

    fn sample(&self, model: &dyn DensityModel, r: &SampleRequest) -> Result<SampleSet> {
        let truth = require_truth(model, self.name())?;
        let points = sobol(r.budget(), model.dim())?
            .iter()
            .map(|u| truth.from_uniform(u))
            .collect();
        Ok(SampleSet {
            points,
            evaluations: 0,
            note: "inverse-transformed Sobol set".into(),
        })
    }
}

type Constructor = Box<dyn Fn() -> Box<dyn Sampler> + Send + Sync>;

/// Samplers selectable by name.
#[derive(Default)]
pub struct SamplerRegistry {
    entries: BTreeMap<String, Constructor>,
}

impl SamplerRegistry {
    pub fn builtin() -> Self {
        let mut r = SamplerRegistry::default();
        r.register("med", || Box::new(MedSampler));
        r.register("metropolis", || Box::new(MetropolisSampler { initial_sd: 0.1 }));
        r.register("hammersley", || Box::new(HammersleySampler));
        r.register("sobol", || Box::new(SobolSampler));
        r
    }

    pub fn register<F>(&mut self, name: &str, build: F)
    where
        F: Fn() -> Box<dyn Sampler> + Send + Sync + 'static,
    {
        self.entries.insert(name.to_string(), Box::new(build));
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn Sampler>> {
        self.entries.get(name).map(|b| b()).ok_or_else(|| MedError::UnknownName {
            kind: "sampler",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{make_banana, Uniform};

    #[test]
    fn registry_round_trip() {
        let r = SamplerRegistry::builtin();
        assert_eq!(r.names(), vec!["hammersley", "med", "metropolis", "sobol"]);
        assert_eq!(r.create("med").unwrap().name(), "med");
        let err = r.create("gibbs").err().unwrap().to_string();
        assert!(err.contains("gibbs") && err.contains("metropolis"), "{err}");
    }

    #[test]
    fn budgets_are_matched() {
        let model = make_banana();
        let req = SampleRequest { n: 7, stages: 3, seed: 1 };
        let r = SamplerRegistry::builtin();
        for name in r.names() {
            let s = r.create(name).unwrap().sample(&model, &req).unwrap();
            match name {
                "med" => assert_eq!((s.points.len(), s.evaluations), (7, 21)),
                "metropolis" => assert_eq!(s.evaluations, 21),
                _ => assert_eq!((s.points.len(), s.evaluations), (21, 0)),
            }
        }
    }

    #[test]
    fn sobol_is_limited_to_two_dimensions() {
        assert!(!SobolSampler.supports(3));
        let req = SampleRequest { n: 4, stages: 2, seed: 0 };
        assert!(SobolSampler.sample(&Uniform::new(3), &req).is_err());
    }
}
