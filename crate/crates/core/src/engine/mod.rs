//! Annealed, budget-limited MED construction.
//!
//! Stage 1 evaluates a CBC lattice. Each later stage `k + 1` sets a
//! whitening covariance and distance power from `D_k`, proposes and
//! evaluates one new point next to every design point (criterion without
//! whitening, surrogate log densities for the candidates), and finally picks
//! `D_{k+1}` greedily from all points evaluated so far with the whitened
//! criterion at `gamma_{k+1}`.

mod config;
mod propose;
mod schedule;
mod select;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{default_k, default_n, DEFAULT_THETA_MULTIPLE, RunConfig, SMode, SurrogateTarget, ThetaRule};
pub use propose::{propose_new_points, ProposeParams, ProposeStats};
pub use schedule::{adaptive_s, logf_range, quantile, update_sigma, AnnealSchedule, MAX_SIGMA_CONDITION};
pub use select::{best_candidate, candidate_scores, greedy_order};

use crate::density::{eval_logf_batch, DensityModel, EvaluationLedger};
use crate::error::{MedError, Result};
use crate::geometry::{psi_log, DistanceSpec, S_ZERO_THRESHOLD};
use crate::linalg::condition_number;
use crate::point::{sq_euclidean, Point};
use crate::qmc::{cbc_lattice, is_prime, smallest_prime_at_least, LatticeRule, ScrambledHalton};
use crate::rng::{stream, Domain};

/// A design `D_k` with the exact log densities of its points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub points: Vec<Point>,
    pub logf: Vec<f64>,
    /// Stage in which each point was evaluated.
    pub origin: Vec<usize>,
    /// Stage this design belongs to.
    pub stage: usize,
    pub gamma: f64,
}

impl Design {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |x| x.dim())
    }
}

/// All points evaluated so far (`C_k`), in evaluation order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvaluatedSet {
    pub points: Vec<Point>,
    pub logf: Vec<f64>,
    pub origin: Vec<usize>,
}

impl EvaluatedSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, x: Point, logf: f64, stage: usize) {
        self.points.push(x);
        self.logf.push(logf);
        self.origin.push(stage);
    }
}

/// Greedy second pass: picks `n` of the evaluated points at level `gamma`.
/// Performs no density evaluations.
pub fn greedy_select(
    evaluated: &EvaluatedSet,
    n: usize,
    gamma: f64,
    stage: usize,
    spec: &DistanceSpec,
) -> Result<Design> {
    let order = greedy_order(&evaluated.points, &evaluated.logf, n, gamma, spec)?;
    Ok(Design {
        points: order.iter().map(|&i| evaluated.points[i].clone()).collect(),
        logf: order.iter().map(|&i| evaluated.logf[i]).collect(),
        origin: order.iter().map(|&i| evaluated.origin[i]).collect(),
        stage,
        gamma,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: usize,
    pub gamma: f64,
    pub s: f64,
    pub sigma_condition: f64,
    /// `log psi` of the design (no whitening).
    pub log_psi: f64,
    /// `log psi` of the design with the stage's whitening.
    pub log_psi_tilde: f64,
    pub evaluations: usize,
    pub candidate_set_size: usize,
    pub proposal: Option<ProposeStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeInfo {
    pub n: usize,
    pub generator: Vec<usize>,
    pub shift: Option<Vec<f64>>,
    pub kernel: String,
    pub error_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub density: String,
    pub dim: usize,
    pub config: RunConfig,
    pub budget: usize,
    pub evaluations: usize,
    pub gammas: Vec<f64>,
    pub s_zero_threshold: f64,
    /// Annealing level used by both passes of stage `k + 1`.
    pub selection_gamma: String,
    pub lattice: LatticeInfo,
    pub stages: Vec<StageReport>,
    /// Relative RMS change of a 20-point local surrogate when its
    /// correlation parameter is doubled.
    pub theta_sensitivity: Option<f64>,
}

/// Final design, report and wall-clock stage timings.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub design: Design,
    pub evaluated: EvaluatedSet,
    pub report: RunReport,
    pub stage_timings_ms: Vec<f64>,
}

pub struct MedEngine {
    config: RunConfig,
}

impl MedEngine {
    pub fn new(config: RunConfig) -> Self {
        MedEngine { config }
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// Runs all stages, spending exactly `n * K` evaluations. On error the
    /// ledger keeps every evaluation made so far.
    pub fn run(&self, model: &dyn DensityModel, ledger: &mut EvaluationLedger) -> Result<RunOutput> {
        let cfg = &self.config;
        cfg.validate()?;
        let p = model.dim();
        if p == 0 {
            return Err(MedError::invalid("density dimension must be at least 1"));
        }
        let schedule = AnnealSchedule::new(cfg.stages)?;
        let n = cfg.n;
        let mut timings = Vec::with_capacity(cfg.stages);
        let mut stages = Vec::with_capacity(cfg.stages);

        let t0 = Instant::now();
        let lattice = initial_lattice(n, p, cfg)?;
        let d1_points: Vec<Point> = (0..n).map(|i| lattice.point(i)).collect();
        let d1_logf = eval_logf_batch(model, &d1_points, ledger, 1)?;
        let mut evaluated = EvaluatedSet::default();
        for (x, l) in d1_points.iter().zip(&d1_logf) {
            evaluated.push(x.clone(), *l, 1);
        }
        let mut design = Design {
            points: d1_points,
            logf: d1_logf,
            origin: vec![1; n],
            stage: 1,
            gamma: 0.0,
        };
        let unit = psi_log(&design.points, &design.logf, 0.0, &DistanceSpec::unwhitened(0.0))?.log_value;
        stages.push(StageReport {
            stage: 1,
            gamma: 0.0,
            s: 0.0,
            sigma_condition: 1.0,
            log_psi: unit,
            log_psi_tilde: unit,
            evaluations: ledger.count(),
            candidate_set_size: evaluated.len(),
            proposal: None,
        });
        timings.push(t0.elapsed().as_secs_f64() * 1e3);

        for next in 2..=cfg.stages {
            let t = Instant::now();
            let gamma_k = schedule.gamma(next - 1);
            let gamma = schedule.gamma(next);
            let sigma = update_sigma(&design.points, p, gamma_k, gamma, cfg.whitening);
            let s = match cfg.s_mode {
                SMode::Fixed(s) => s,
                SMode::Adaptive => {
                    let (lo, hi) = logf_range(&design.logf, cfg.quantiles);
                    adaptive_s(lo, hi, gamma)
                }
            };
            let white = if cfg.whitening {
                DistanceSpec::whitened(s, sigma.clone())?
            } else {
                DistanceSpec::unwhitened(s)
            };

            let params = ProposeParams {
                stage: next,
                gamma,
                s,
                adjacency: &white,
            };
            let stats = propose_new_points(model, ledger, &design, &mut evaluated, cfg, params)?;

            let before = ledger.count();
            design = greedy_select(&evaluated, n, gamma, next, &white)?;
            debug_assert_eq!(before, ledger.count());

            stages.push(StageReport {
                stage: next,
                gamma,
                s,
                sigma_condition: condition_number(&sigma),
                log_psi: psi_log(&design.points, &design.logf, gamma, &DistanceSpec::unwhitened(s))?.log_value,
                log_psi_tilde: psi_log(&design.points, &design.logf, gamma, &white)?.log_value,
                evaluations: ledger.count(),
                candidate_set_size: evaluated.len(),
                proposal: Some(stats),
            });
            timings.push(t.elapsed().as_secs_f64() * 1e3);
        }

        let report = RunReport {
            density: model.name().to_string(),
            dim: p,
            config: cfg.clone(),
            budget: cfg.budget(),
            evaluations: ledger.count(),
            gammas: schedule.gammas().to_vec(),
            s_zero_threshold: S_ZERO_THRESHOLD,
            selection_gamma: "both passes of stage k+1 use gamma_{k+1}".into(),
            lattice: LatticeInfo {
                n: lattice.n,
                generator: lattice.z.clone(),
                shift: lattice.shift.clone(),
                kernel: "prod_l (1 + B2(x_l) / l^2)".into(),
                error_sq: lattice.error_sq(),
            },
            stages,
            theta_sensitivity: theta_sensitivity(&design, &evaluated, cfg.seed),
        };
        Ok(RunOutput {
            design,
            evaluated,
            report,
            stage_timings_ms: timings,
        })
    }
}

/// CBC lattice with `n` points, or the first `n` points of the one with the
/// next prime size when `n` is not prime.
fn initial_lattice(n: usize, p: usize, cfg: &RunConfig) -> Result<LatticeRule> {
    let size = if is_prime(n) { n } else { smallest_prime_at_least(n) };
    let rule = cbc_lattice(size, p)?;
    Ok(if cfg.lattice_shift {
        rule.with_random_shift(cfg.seed)
    } else {
        rule
    })
}

const SENSITIVITY_TRAINING: usize = 20;
const SENSITIVITY_PROBES: u64 = 200;

/// Fits the 20 evaluated points nearest the design's first point with the
/// default `theta` and with `2 theta`, and returns the RMS difference of the
/// two predictions over their bounding box, relative to the range of the
/// training values.
fn theta_sensitivity(design: &Design, evaluated: &EvaluatedSet, seed: u64) -> Option<f64> {
    use crate::qmc::RegionBox;
    use crate::surrogate::{default_theta, LimitKriging};

    let center = design.points.first()?;
    let mut idx: Vec<usize> = (0..evaluated.len()).collect();
    idx.sort_by(|&a, &b| {
        sq_euclidean(&evaluated.points[a], center)
            .total_cmp(&sq_euclidean(&evaluated.points[b], center))
            .then(a.cmp(&b))
    });
    idx.truncate(SENSITIVITY_TRAINING);
    if idx.len() < 2 {
        return None;
    }
    let x: Vec<&Point> = idx.iter().map(|&i| &evaluated.points[i]).collect();
    let y: Vec<f64> = idx.iter().map(|&i| evaluated.logf[i]).collect();
    let range = y.iter().copied().fold(f64::NEG_INFINITY, f64::max) - y.iter().copied().fold(f64::INFINITY, f64::min);
    if !(range > 0.0) {
        return Some(0.0);
    }
    let theta = default_theta(&x);
    let a = LimitKriging::fit(&x, &y, theta).ok()?;
    let b = LimitKriging::fit(&x, &y, 2.0 * theta).ok()?;
    let region = RegionBox::around(&x, 1e-6);
    let mut rng = stream(seed, Domain::Bench, 0, u64::MAX >> 40);
    let halton = ScrambledHalton::new(center.dim(), &mut rng);
    let mut ss = 0.0;
    for i in 0..SENSITIVITY_PROBES {
        let u = region.map(&halton.point(i));
        let d = a.predict(&u) - b.predict(&u);
        ss += d * d;
    }
    Some((ss / SENSITIVITY_PROBES as f64).sqrt() / range)
}
