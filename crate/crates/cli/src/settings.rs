//! Flags shared by several subcommands, mirrored by the optional JSON config
//! file. A flag given on the command line wins over the file.

use std::path::Path;
use std::time::Duration;

use clap::Args;
use med_core::density::{make_piecewise_prior, DensityParams, DensityRegistry, UnitBox};
use med_core::engine::{RunConfig, SMode, SurrogateTarget, ThetaRule};
use med_core::DensityModel;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

macro_rules! merge_fields {
    ($flags:expr, $file:expr, $($f:ident),* $(,)?) => {
        $( if $flags.$f.is_none() { $flags.$f = $file.$f.clone(); } )*
    };
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityArgs {
    /// Density name (banana, ar1, uniform, prior, external).
    #[arg(long)]
    pub density: Option<String>,
    /// Dimension.
    #[arg(long)]
    pub p: Option<usize>,
    /// AR(1) correlation.
    #[arg(long)]
    pub rho: Option<f64>,
    /// AR(1) marginal standard deviation (unit scale).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Command of an external density.
    #[arg(long)]
    pub cmd: Option<String>,
    /// Per-evaluation timeout of an external density, in seconds.
    #[arg(long)]
    pub timeout_secs: Option<f64>,
    /// Worker processes of an external density.
    #[arg(long)]
    pub max_concurrency: Option<usize>,
    /// Lower box corner, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub lo: Option<Vec<f64>>,
    /// Upper box corner, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub hi: Option<Vec<f64>>,
    /// Prior factor `a,b,lambda_a,lambda_b`; repeat once per dimension.
    #[arg(long = "prior", value_name = "A,B,LA,LB")]
    pub priors: Option<Vec<String>>,
}

impl DensityArgs {
    pub fn merge(mut self, file: &DensityArgs) -> Self {
        merge_fields!(self, file, density, p, rho, sigma, cmd, timeout_secs, max_concurrency, lo, hi, priors);
        self
    }

    pub fn name(&self) -> CliResult<&str> {
        self.density
            .as_deref()
            .ok_or_else(|| CliError::usage("density: required (banana, ar1, uniform, prior, external)"))
    }

    pub fn params(&self, threads: Option<usize>) -> CliResult<DensityParams> {
        let bounds = match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => Some(UnitBox::new(lo.clone(), hi.clone())?),
            (None, None) => None,
            _ => return Err(CliError::usage("lo/hi: both box corners are required")),
        };
        let priors = self
            .priors
            .iter()
            .flatten()
            .map(|s| {
                let v: Vec<f64> = s
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::usage(format!("prior: '{s}' is not four numbers")))?;
                match v[..] {
                    [a, b, la, lb] => Ok(make_piecewise_prior(a, b, la, lb)?),
                    _ => Err(CliError::usage(format!("prior: '{s}' needs a,b,lambda_a,lambda_b"))),
                }
            })
            .collect::<CliResult<Vec<_>>>()?;
        let dim = self.p.or_else(|| (!priors.is_empty()).then_some(priors.len()));
        if let Some(t) = self.timeout_secs {
            if !(t > 0.0) || !t.is_finite() {
                return Err(CliError::usage(format!("timeout_secs: must be positive, got {t}")));
            }
        }
        let max_concurrency = match (self.max_concurrency, threads) {
            (Some(c), Some(t)) => Some(c.min(t)),
            (c, t) => c.or(t),
        };
        Ok(DensityParams {
            dim,
            rho: self.rho,
            sigma: self.sigma,
            priors,
            bounds,
            command: self.cmd.clone(),
            timeout: self.timeout_secs.map(Duration::from_secs_f64),
            max_concurrency,
        })
    }

    pub fn build(&self, threads: Option<usize>) -> CliResult<Box<dyn DensityModel>> {
        let params = self.params(threads)?;
        Ok(DensityRegistry::builtin().create(self.name()?, &params)?)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineArgs {
    /// Design size (default: largest prime below 100 + 5p).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of annealing stages (default: ceil(4 sqrt p)).
    #[arg(long, short = 'K')]
    pub stages: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Space-filling candidates per local region (default 50p).
    #[arg(long)]
    pub m: Option<usize>,
    /// Linear-combination candidates per local region.
    #[arg(long)]
    pub n_combos: Option<usize>,
    /// Minimum max-norm distance of a candidate to evaluated points.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Fixed kriging correlation parameter.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Correlation 1/2 at this multiple of the median spacing (default 3).
    #[arg(long)]
    pub theta_multiple: Option<f64>,
    /// Fixed distance power; adaptive when absent.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub no_whitening: Option<bool>,
    /// Quantiles `lo,hi` replacing min/max in the adaptive power.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub quantiles: Option<Vec<f64>>,
    #[arg(long)]
    pub lattice_shift: Option<bool>,
    /// Interpolate the log density (`log`) or the density (`density`).
    #[arg(long)]
    pub surrogate_target: Option<String>,
    /// Cap on local training points.
    #[arg(long)]
    pub max_training: Option<usize>,
}

impl EngineArgs {
    pub fn merge(mut self, file: &EngineArgs) -> Self {
        merge_fields!(
            self,
            file,
            n,
            stages,
            seed,
            m,
            n_combos,
            delta,
            theta,
            theta_multiple,
            s,
            no_whitening,
            quantiles,
            lattice_shift,
            surrogate_target,
            max_training
        );
        self
    }

    /// Flags that reproduce a resolved configuration.
    pub fn from_config(c: &RunConfig) -> EngineArgs {
        let (theta, theta_multiple) = match c.theta {
            ThetaRule::Fixed { value } => (Some(value), None),
            ThetaRule::MedianSpacing { multiple } => (None, Some(multiple)),
        };
        EngineArgs {
            n: Some(c.n),
            stages: Some(c.stages),
            seed: Some(c.seed),
            m: Some(c.m),
            n_combos: Some(c.n_combos),
            delta: Some(c.delta),
            theta,
            theta_multiple,
            s: match c.s_mode {
                SMode::Fixed(s) => Some(s),
                SMode::Adaptive => None,
            },
            no_whitening: Some(!c.whitening),
            quantiles: c.quantiles.map(|(lo, hi)| vec![lo, hi]),
            lattice_shift: Some(c.lattice_shift),
            surrogate_target: Some(
                match c.surrogate_target {
                    SurrogateTarget::LogDensity => "log",
                    SurrogateTarget::Density => "density",
                }
                .into(),
            ),
            max_training: Some(c.max_training),
        }
    }

    pub fn config(&self, p: usize) -> CliResult<RunConfig> {
        let mut c = RunConfig::for_dimension(p);
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = self.stages {
            c.stages = v;
        }
        c.seed = self.seed.unwrap_or(0);
        if let Some(v) = self.m {
            c.m = v;
        }
        if let Some(v) = self.n_combos {
            c.n_combos = v;
        }
        if let Some(v) = self.delta {
            c.delta = v;
        }
        match (self.theta, self.theta_multiple) {
            (Some(_), Some(_)) => return Err(CliError::usage("theta: give either theta or theta_multiple")),
            (Some(value), None) => c.theta = ThetaRule::Fixed { value },
            (None, Some(multiple)) => c.theta = ThetaRule::MedianSpacing { multiple },
            (None, None) => {}
        }
        if let Some(s) = self.s {
            c.s_mode = SMode::Fixed(s);
        }
        if self.no_whitening == Some(true) {
            c.whitening = false;
        }
        if let Some(q) = &self.quantiles {
            match q[..] {
                [lo, hi] => c.quantiles = Some((lo, hi)),
                _ => return Err(CliError::usage("quantiles: need exactly two values lo,hi")),
            }
        }
        if let Some(v) = self.lattice_shift {
            c.lattice_shift = v;
        }
        if let Some(t) = &self.surrogate_target {
            c.surrogate_target = match t.as_str() {
                "log" | "log-density" => SurrogateTarget::LogDensity,
                "density" => SurrogateTarget::Density,
                other => return Err(CliError::usage(format!("surrogate_target: unknown value '{other}' (log, density)"))),
            };
        }
        if let Some(v) = self.max_training {
            c.max_training = v;
        }
        c.validate()?;
        Ok(c)
    }
}

/// JSON object with optional `density` and `engine` sections. A run
/// manifest is accepted too; its `config` section is used.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub density: DensityArgs,
    pub engine: EngineArgs,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> CliResult<ConfigFile> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("config: cannot read {}: {e}", path.display())))?;
        let bad = |e: serde_json::Error| CliError::usage(format!("config: {}: {e}", path.display()));
        let mut value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
        if value.get("ledger_digest").is_some() {
            if let Some(inner) = value.get_mut("config") {
                value = inner.take();
            }
        }
        serde_json::from_value(value).map_err(bad)
    }
}
