//! `med generate`: runs the engine and writes the design, ledger, report and
//! manifest of the run.

use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{SecondsFormat, Utc};
use clap::Args;
use med_core::density::LedgerRecord;
use med_core::engine::{Design, RunConfig};
use med_core::{EvaluationLedger, MedEngine};
use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::io::{coord_header, ensure_dir, fmt_f64, write_csv, write_json};
use crate::settings::{ConfigFile, DensityArgs, EngineArgs};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub density: DensityArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// JSON file with `density` and `engine` sections, or a run manifest.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "med-run")]
    pub out: PathBuf,
}

/// Provenance of a run: everything needed to reproduce its ledger.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub software: String,
    pub version: String,
    pub seed: u64,
    /// Resolved flags; `generate --config manifest.json` repeats the run.
    pub config: ConfigFile,
    pub run_config: RunConfig,
    pub started_at: String,
    pub finished_at: String,
    pub ledger_digest: String,
    pub evaluations: usize,
    pub budget: usize,
    pub stage_timings_ms: Vec<f64>,
}

pub fn design_rows(design: &Design) -> Vec<Vec<String>> {
    design
        .points
        .iter()
        .zip(&design.logf)
        .zip(&design.origin)
        .map(|((x, f), o)| {
            let mut row: Vec<String> = x.iter().map(|v| fmt_f64(*v)).collect();
            row.push(fmt_f64(*f));
            row.push(o.to_string());
            row
        })
        .collect()
}

pub fn write_design(path: &Path, design: &Design) -> CliResult<()> {
    let mut header = coord_header(design.dim());
    header.extend(["logf".to_string(), "stage".to_string()]);
    write_csv(path, &header, &design_rows(design))
}

pub fn write_ledger(path: &Path, records: &[LedgerRecord], p: usize) -> CliResult<()> {
    let mut header = vec!["seq".to_string(), "stage".to_string()];
    header.extend(coord_header(p));
    header.extend(["logf".to_string(), "duration_ms".to_string()]);
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.seq.to_string(), r.stage.to_string()];
            row.extend(r.x.iter().map(|v| fmt_f64(*v)));
            row.push(fmt_f64(r.logf));
            row.push(fmt_f64(r.duration_ms));
            row
        })
        .collect();
    write_csv(path, &header, &rows)
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn run(args: GenerateArgs, threads: Option<usize>) -> CliResult<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let density = args.density.merge(&file.density);
    let engine = args.engine.merge(&file.engine);
    let model = density.build(threads)?;
    let config = engine.config(model.dim())?;
    let out = ensure_dir(&args.out)?;

    let started_at = now();
    let clock = Instant::now();
    let mut ledger = EvaluationLedger::new();
    let result = MedEngine::new(config.clone()).run(model.as_ref(), &mut ledger);
    // the ledger is kept even when the run fails part way
    write_ledger(&out.join("ledger.csv"), ledger.records(), model.dim())?;
    let output = result?;
    write_design(&out.join("design.csv"), &output.design)?;
    write_json(&out.join("report.json"), &output.report)?;

    let manifest = RunManifest {
        software: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: config.seed,
        config: ConfigFile {
            density,
            engine: EngineArgs::from_config(&config),
        },
        run_config: config,
        started_at,
        finished_at: now(),
        ledger_digest: ledger.digest(),
        evaluations: ledger.count(),
        budget: output.report.budget,
        stage_timings_ms: output.stage_timings_ms,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    eprintln!(
        "{}: {} points, {} evaluations in {:.1} s -> {}",
        output.report.density,
        output.design.len(),
        manifest.evaluations,
        clock.elapsed().as_secs_f64(),
        out.display()
    );
    Ok(())
}
