//! `med bench`: matched-budget sampler comparison on builtin densities.

use std::path::PathBuf;

use clap::Args;
use med_core::bench::{ar1_sweep, compare, Comparison, SweepRow};
use med_core::engine::{default_k, default_n};
use med_core::sampler::{SampleRequest, Sampler, SamplerRegistry};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::write_json;
use crate::settings::DensityArgs;

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, short = 'K')]
    pub stages: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samplers to compare, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "med,metropolis,hammersley")]
    pub samplers: Vec<String>,
    /// Dimensions of an AR(1) sweep with rho = 0.9^ln(p); replaces the
    /// single-density comparison.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub sweep: Option<Vec<usize>>,
    #[arg(long, default_value = "comparison.json")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum BenchOutput {
    Single(Comparison),
    Sweep { sigma: f64, seed: u64, rows: Vec<SweepRow> },
}

pub fn run(args: BenchArgs) -> CliResult<()> {
    let registry = SamplerRegistry::builtin();
    let samplers: Vec<Box<dyn Sampler>> = args
        .samplers
        .iter()
        .map(|name| registry.create(name.trim()))
        .collect::<Result<_, _>>()?;
    let output = match &args.sweep {
        Some(dims) => {
            if dims.contains(&0) {
                return Err(CliError::usage("sweep: dimensions must be at least 1"));
            }
            let sigma = args.density.sigma.unwrap_or(0.125);
            BenchOutput::Sweep {
                sigma,
                seed: args.seed,
                rows: ar1_sweep(dims, sigma, args.seed, &samplers)?,
            }
        }
        None => {
            if args.density.name()? == "external" {
                return Err(CliError::usage("density: bench needs a builtin density with a known truth"));
            }
            let model = args.density.build(None)?;
            let p = model.dim();
            let request = SampleRequest {
                n: args.n.unwrap_or_else(|| default_n(p)),
                stages: args.stages.unwrap_or_else(|| default_k(p)),
                seed: args.seed,
            };
            BenchOutput::Single(compare(model.as_ref(), &samplers, &request)?)
        }
    };
    write_json(&args.out, &output)?;
    if let BenchOutput::Single(c) = &output {
        for e in &c.entries {
            eprintln!("{:<12} points {:>6}  evaluations {:>6}  cl2 {:.6}", e.sampler, e.points, e.evaluations, e.cl2);
        }
    }
    Ok(())
}
