//! `med diagnose`: criteria, discrepancy and marginal summaries of a point
//! file, plus long-format CSVs for plotting.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use med_core::diagnostics::{diagnose, CdfTransform, DiagnosticsOptions, DiagnosticsReport};

use crate::error::{CliError, CliResult};
use crate::io::{ensure_dir, fmt_f64, write_csv, write_json, Table};
use crate::settings::DensityArgs;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TransformArg {
    None,
    Truth,
    Estimated,
}

impl From<TransformArg> for CdfTransform {
    fn from(t: TransformArg) -> Self {
        match t {
            TransformArg::None => CdfTransform::None,
            TransformArg::Truth => CdfTransform::Truth,
            TransformArg::Estimated => CdfTransform::Estimated,
        }
    }
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// CSV with `x1..xp` columns and a `logf` column (design.csv, samples.csv).
    #[arg(long)]
    pub design: PathBuf,
    /// Histogram bins (default ceil(sqrt n)).
    #[arg(long)]
    pub bins: Option<usize>,
    /// Compare against the closed-form truth of the density given below.
    #[arg(long)]
    pub truth: bool,
    #[command(flatten)]
    pub density: DensityArgs,
    /// Map to the unit cube before CL2 (default: truth with --truth, else estimated).
    #[arg(long, value_enum)]
    pub transform: Option<TransformArg>,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    /// Output directory; the report goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: DiagnoseArgs) -> CliResult<()> {
    let table = Table::read(&args.design)?;
    let bad = |e: String| CliError::runtime(format!("{}: {e}", args.design.display()));
    let points = table.points().map_err(bad)?;
    let truth = if args.truth {
        let model = args.density.build(None)?;
        if model.dim() != points.first().map_or(0, Vec::len) {
            return Err(CliError::usage(format!(
                "p: density has dimension {} but the file has {} coordinates",
                model.dim(),
                points.first().map_or(0, Vec::len)
            )));
        }
        Some(model.truth().ok_or_else(|| CliError::usage(format!("truth: density '{}' has no closed form", model.name())))?)
    } else {
        None
    };
    let logf = table
        .values("logf")
        .ok_or_else(|| bad("no 'logf' column".into()))?;
    let transform = args
        .transform
        .map(CdfTransform::from)
        .unwrap_or(if truth.is_some() { CdfTransform::Truth } else { CdfTransform::Estimated });
    let opts = DiagnosticsOptions {
        bins: args.bins,
        gamma: args.gamma,
        s: args.s,
        transform,
        truth: truth.as_ref(),
    };
    let report = diagnose(&points, &logf, &opts)?;
    match &args.out {
        None => {
            let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::runtime(e.to_string()))?;
            println!("{text}");
        }
        Some(dir) => {
            let dir = ensure_dir(dir)?;
            write_json(&dir.join("report.json"), &report)?;
            write_long_tables(&dir, &report, &points, &logf)?;
        }
    }
    Ok(())
}

fn strings<const N: usize>(cells: [String; N]) -> Vec<String> {
    cells.into()
}

fn write_long_tables(dir: &std::path::Path, r: &DiagnosticsReport, points: &[Vec<f64>], logf: &[f64]) -> CliResult<()> {
    let header = |h: &[&str]| h.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let mut hist = Vec::new();
    for (d, m) in r.marginals.iter().enumerate() {
        let bins = m.histogram.len() as f64;
        for (b, mass) in m.histogram.iter().enumerate() {
            hist.push(strings([
                format!("x{}", d + 1),
                b.to_string(),
                fmt_f64(b as f64 / bins),
                fmt_f64((b + 1) as f64 / bins),
                fmt_f64(*mass),
            ]));
        }
    }
    write_csv(&dir.join("marginals.csv"), &header(&["variable", "bin", "lo", "hi", "mass"]), &hist)?;

    let mut corr = Vec::new();
    for (i, row) in r.correlation.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            corr.push(strings([format!("x{}", i + 1), format!("x{}", j + 1), fmt_f64(*v)]));
        }
    }
    write_csv(&dir.join("correlation.csv"), &header(&["row", "column", "correlation"]), &corr)?;

    let mut long = Vec::new();
    for (i, (x, f)) in points.iter().zip(logf).enumerate() {
        for (d, v) in x.iter().enumerate() {
            long.push(strings([
                i.to_string(),
                format!("x{}", d + 1),
                fmt_f64(*v),
                fmt_f64(*f),
                fmt_f64(r.probability_balance.log_p[i]),
            ]));
        }
    }
    write_csv(&dir.join("points.csv"), &header(&["point", "variable", "value", "logf", "log_p"]), &long)
}
