//! `med followup`: Metropolis chains on a global surrogate of a finished run.
//! No density is evaluated.

use std::path::PathBuf;

use clap::Args;
use med_core::baselines::{followup_mcmc, FollowupConfig};
use med_core::density::LOGF_FLOOR;
use med_core::surrogate::{default_theta, LimitKriging};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::{coord_header, fmt_f64, write_csv, write_json, Table};

/// The global surrogate's correlation is one half at three median spacings,
/// matching the engine's local surrogates.
const THETA_SPACING: f64 = 3.0;

/// Floored training values are lifted to this far below the lowest regular
/// value so they do not dominate the interpolant.
const FLOOR_MARGIN: f64 = 20.0;

#[derive(Debug, Args)]
pub struct FollowupArgs {
    /// Directory written by `med generate`.
    #[arg(long)]
    pub run: PathBuf,
    /// Total number of pooled samples (chains are rounded up).
    #[arg(long = "N", visible_alias = "total", default_value_t = 10_000)]
    pub total: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (default: samples.csv in the run directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct FollowupSummary {
    samples: usize,
    requested: usize,
    seed: u64,
    theta: f64,
    training_points: usize,
    chain_lengths: Vec<usize>,
    acceptance_rate: f64,
    burn_in: usize,
}

/// Training set of the global surrogate: ledger points without exact
/// duplicates, floored values lifted.
pub fn training_set(ledger: &Table) -> Result<(Vec<Vec<f64>>, Vec<f64>), String> {
    let points = ledger.points()?;
    let logf = ledger.values("logf").ok_or("no 'logf' column")?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut keep = vec![true; points.len()];
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            keep[w[1]] = false;
        }
    }
    let low = logf
        .iter()
        .copied()
        .filter(|v| *v > LOGF_FLOOR)
        .fold(f64::INFINITY, f64::min);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for i in (0..points.len()).filter(|&i| keep[i]) {
        x.push(points[i].clone());
        y.push(if logf[i] <= LOGF_FLOOR && low.is_finite() { low - FLOOR_MARGIN } else { logf[i] });
    }
    Ok((x, y))
}

pub fn in_file(path: &std::path::Path) -> impl Fn(String) -> CliError + '_ {
    move |e| CliError::runtime(format!("{}: {e}", path.display()))
}

pub fn run(args: FollowupArgs) -> CliResult<()> {
    let design_path = args.run.join("design.csv");
    let ledger_path = args.run.join("ledger.csv");
    for p in [&design_path, &ledger_path] {
        if !p.exists() {
            return Err(CliError::runtime(format!("run: {} is missing", p.display())));
        }
    }
    let design = Table::read(&design_path)?;
    let ledger = Table::read(&ledger_path)?;
    let points = design.points().map_err(in_file(&design_path))?;
    let logf = design.values("logf").ok_or_else(|| in_file(&design_path)("no 'logf' column".into()))?;
    let (tx, ty) = training_set(&ledger).map_err(in_file(&ledger_path))?;
    if tx.first().map(Vec::len) != points.first().map(Vec::len) {
        return Err(CliError::runtime("run: design and ledger dimensions differ"));
    }
    let theta = default_theta(&tx) / (THETA_SPACING * THETA_SPACING);
    let surrogate = LimitKriging::fit(&tx, &ty, theta)?;
    let samples = followup_mcmc(&points, &logf, &surrogate, &FollowupConfig::new(args.total, args.seed))?;

    let p = points[0].len();
    let mut header = coord_header(p);
    header.extend(["logf", "stage", "chain"].map(String::from));
    let rows: Vec<Vec<String>> = samples
        .points
        .iter()
        .zip(&samples.logf)
        .zip(&samples.chain)
        .map(|((x, f), c)| {
            let mut row: Vec<String> = x.iter().map(|v| fmt_f64(*v)).collect();
            row.extend([fmt_f64(*f), "0".into(), c.to_string()]);
            row
        })
        .collect();
    let out = args.out.clone().unwrap_or_else(|| args.run.join("samples.csv"));
    write_csv(&out, &header, &rows)?;
    let summary = FollowupSummary {
        samples: samples.points.len(),
        requested: args.total,
        seed: args.seed,
        theta,
        training_points: tx.len(),
        chain_lengths: samples.lengths,
        acceptance_rate: samples.acceptance_rate,
        burn_in: samples.burn_in,
    };
    write_json(&out.with_extension("json"), &summary)?;
    eprintln!(
        "{} samples from {} chains (acceptance {:.2}) -> {}",
        summary.samples,
        summary.chain_lengths.len(),
        summary.acceptance_rate,
        out.display()
    );
    Ok(())
}
