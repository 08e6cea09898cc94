use std::collections::BTreeMap;
use std::time::Duration;

use super::{
    make_ar1_normal, make_banana, make_external, DensityModel, ExternalConfig, PiecewisePrior,
    ProductPrior, Uniform, UnitBox,
};
use crate::error::{MedError, Result};

/// Construction parameters shared by all registered densities. Each
/// constructor reads the fields it needs and rejects missing ones.
#[derive(Debug, Clone, Default)]
pub struct DensityParams {
    pub dim: Option<usize>,
    pub rho: Option<f64>,
    pub sigma: Option<f64>,
    pub priors: Vec<PiecewisePrior>,
    pub bounds: Option<UnitBox>,
    pub command: Option<String>,
    pub timeout: Option<Duration>,
    pub max_concurrency: Option<usize>,
}

type Constructor = Box<dyn Fn(&DensityParams) -> Result<Box<dyn DensityModel>> + Send + Sync>;

struct Entry {
    description: &'static str,
    build: Constructor,
}

/// Densities selectable by name.
#[derive(Default)]
pub struct DensityRegistry {
    entries: BTreeMap<String, Entry>,
}

fn required<T: Copy>(v: Option<T>, what: &str, density: &str) -> Result<T> {
    v.ok_or_else(|| MedError::invalid(format!("density '{density}' requires {what}")))
}

impl DensityRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut r = Self::new();
        r.register("banana", "banana-shaped 2-d density on [-40,40]x[-25,10]", |_| {
            Ok(Box::new(make_banana()))
        });
        r.register("ar1", "N(0.5, sigma^2 R), R_ij = rho^|i-j|, on [0,1]^p", |p| {
            let dim = required(p.dim, "p", "ar1")?;
            let m = make_ar1_normal(dim, p.rho.unwrap_or(0.0), p.sigma.unwrap_or(0.125))?;
            Ok(Box::new(m))
        });
        r.register("uniform", "constant density on [0,1]^p", |p| {
            let dim = required(p.dim, "p", "uniform")?;
            if dim == 0 {
                return Err(MedError::invalid("p must be at least 1"));
            }
            Ok(Box::new(Uniform::new(dim)))
        });
        r.register("prior", "product of piecewise uniform/exponential priors", |p| {
            if p.priors.is_empty() {
                return Err(MedError::invalid("density 'prior' requires at least one factor"));
            }
            let bounds = p
                .bounds
                .clone()
                .ok_or_else(|| MedError::invalid("density 'prior' requires a box"))?;
            Ok(Box::new(ProductPrior::new(p.priors.clone(), bounds)?))
        });
        r.register("external", "child process speaking the JSON-lines protocol", |p| {
            let command = p
                .command
                .clone()
                .ok_or_else(|| MedError::invalid("density 'external' requires a command"))?;
            let dim = required(p.dim, "p", "external")?;
            let mut cfg = ExternalConfig::new(command, dim);
            if let Some(t) = p.timeout {
                cfg.timeout = t;
            }
            if let Some(c) = p.max_concurrency {
                cfg.max_concurrency = c;
            }
            cfg.bounds = p.bounds.clone();
            Ok(Box::new(make_external(cfg)?))
        });
        r
    }

    pub fn register<F>(&mut self, name: &str, description: &'static str, build: F)
    where
        F: Fn(&DensityParams) -> Result<Box<dyn DensityModel>> + Send + Sync + 'static,
    {
        self.entries.insert(
            name.to_string(),
            Entry {
                description,
                build: Box::new(build),
            },
        );
    }

    pub fn create(&self, name: &str, params: &DensityParams) -> Result<Box<dyn DensityModel>> {
        let entry = self.entries.get(name).ok_or_else(|| MedError::UnknownName {
            kind: "density",
            name: name.to_string(),
            available: self.names().join(", "),
        })?;
        (entry.build)(params)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn describe(&self) -> Vec<(&str, &'static str)> {
        self.entries
            .iter()
            .map(|(k, e)| (k.as_str(), e.description))
            .collect()
    }
}
