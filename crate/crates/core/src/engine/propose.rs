//! First pass of a stage: one new evaluated point next to each design point.

use serde::{Deserialize, Serialize};

use super::config::{RunConfig, SurrogateTarget, ThetaRule};
use super::select::best_candidate;
use super::{Design, EvaluatedSet};
use crate::density::{eval_logf, floor_logf, DensityModel, EvaluationLedger};
use crate::error::{MedError, Result};
use crate::geometry::DistanceSpec;
use crate::point::{sq_euclidean, Point};
use crate::qmc::{local_candidates, LocalFillSpec, RegionBox};
use crate::rng::{stream, Domain};
use crate::surrogate::{default_theta, LimitKriging};

/// Parameters of one proposal pass.
#[derive(Debug, Clone, Copy)]
pub struct ProposeParams<'a> {
    /// 1-based index of the stage being built.
    pub stage: usize,
    /// Annealing level of that stage.
    pub gamma: f64,
    /// Power of the generalized distance (no whitening in this pass).
    pub s: f64,
    /// Whitened distance of the stage, used only to find adjacent design points.
    pub adjacency: &'a DistanceSpec,
}

/// Per-pass bookkeeping for the run report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProposeStats {
    pub candidates_scored: usize,
    pub regions_inflated: usize,
    pub max_jitter: f64,
}

fn nearest_indices<P: AsRef<[f64]>>(points: &[P], center: &[f64], count: usize) -> Vec<usize> {
    let mut idx: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, x)| (sq_euclidean(x.as_ref(), center), i))
        .collect();
    let count = count.min(idx.len());
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if count < idx.len() {
        idx.select_nth_unstable_by(count, cmp);
        idx.truncate(count);
    }
    idx.sort_by(cmp);
    idx.into_iter().map(|(_, i)| i).collect()
}

/// Local surrogate of `log f` fitted on the given training points.
pub(crate) struct LocalSurrogate {
    model: LimitKriging,
    target: SurrogateTarget,
    scale_log: f64,
}

impl LocalSurrogate {
    pub(crate) fn fit(x: &[&Point], logf: &[f64], config: &RunConfig) -> Result<Self> {
        let theta = match config.theta {
            ThetaRule::MedianSpacing { multiple } => default_theta(x) / (multiple * multiple),
            ThetaRule::Fixed { value } => value,
        };
        let scale_log = logf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let y: Vec<f64> = match config.surrogate_target {
            SurrogateTarget::LogDensity => logf.to_vec(),
            SurrogateTarget::Density => logf.iter().map(|l| (l - scale_log).exp()).collect(),
        };
        Ok(LocalSurrogate {
            model: LimitKriging::fit(x, &y, theta)?,
            target: config.surrogate_target,
            scale_log,
        })
    }

    pub(crate) fn predict_log(&self, x: &[f64]) -> f64 {
        let y = self.model.predict(x);
        match self.target {
            SurrogateTarget::LogDensity => floor_logf(y),
            SurrogateTarget::Density => floor_logf(if y > 0.0 { y.ln() + self.scale_log } else { f64::NEG_INFINITY }),
        }
    }

    pub(crate) fn jitter(&self) -> f64 {
        self.model.jitter()
    }
}

/// Proposes, evaluates and records one new point per design point, in design
/// order. Every new point is appended to `evaluated` only after the whole pass
/// so that the local regions all see the same `C_k`; the scoring of point `j`
/// conditions on the design and on the new points `1..j-1`.
pub fn propose_new_points(
    model: &dyn DensityModel,
    ledger: &mut EvaluationLedger,
    design: &Design,
    evaluated: &mut EvaluatedSet,
    config: &RunConfig,
    params: ProposeParams<'_>,
) -> Result<ProposeStats> {
    let n = design.len();
    let fill = LocalFillSpec {
        m: config.m,
        n_combos: config.n_combos,
        delta: config.delta,
    };
    let plain = DistanceSpec::unwhitened(params.s);
    let design_white: Vec<Vec<f64>> = design.points.iter().map(|x| params.adjacency.whiten(x)).collect();
    let mut stats = ProposeStats::default();

    let mut cond: Vec<Point> = design.points.clone();
    let mut cond_logf: Vec<f64> = design.logf.clone();
    let mut new_points = Vec::with_capacity(n);
    let mut new_logf = Vec::with_capacity(n);

    for j in 0..n {
        let center = &design.points[j];

        let local = nearest_indices(&evaluated.points, center, n);
        let train_idx = &local[..local.len().min(config.max_training)];
        let train_x: Vec<&Point> = train_idx.iter().map(|&i| &evaluated.points[i]).collect();
        let train_y: Vec<f64> = train_idx.iter().map(|&i| evaluated.logf[i]).collect();
        let surrogate = LocalSurrogate::fit(&train_x, &train_y, config)?;
        stats.max_jitter = stats.max_jitter.max(surrogate.jitter());

        let adj = nearest_indices(&design_white, &design_white[j], 3);
        let adjacent: Vec<(&[f64], &[f64])> = adj
            .into_iter()
            .filter(|&i| i != j)
            .take(2)
            .map(|i| (center.coords(), design.points[i].coords()))
            .collect();

        let region_pts: Vec<&Point> = local.iter().map(|&i| &evaluated.points[i]).collect();
        let region = RegionBox::around(&region_pts, config.delta);
        let mut rng = stream(config.seed, Domain::LocalFill, params.stage as u64, j as u64);
        let mut pool = local_candidates(&region, &adjacent, &evaluated.points, &fill, &mut rng);
        if pool.is_empty() {
            stats.regions_inflated += 1;
            pool = local_candidates(&region.inflated(2.0), &adjacent, &evaluated.points, &fill, &mut rng);
        }
        if pool.is_empty() {
            return Err(MedError::EmptyCandidatePool {
                stage: params.stage,
                index: j + 1,
            });
        }
        let preds: Vec<f64> = pool.points.iter().map(|x| surrogate.predict_log(x)).collect();
        stats.candidates_scored += pool.len();

        // nearby conditioning points first so the early exit triggers sooner
        let order = nearest_indices(&cond, center, cond.len());
        let cx: Vec<&Point> = order.iter().map(|&i| &cond[i]).collect();
        let cl: Vec<f64> = order.iter().map(|&i| cond_logf[i]).collect();
        let (best, _) = best_candidate(&pool.points, &preds, &cx, &cl, params.gamma, &plain).ok_or(
            MedError::EmptyCandidatePool {
                stage: params.stage,
                index: j + 1,
            },
        )?;

        let x = pool.points.swap_remove(best);
        let logf = eval_logf(model, &x, ledger, params.stage)?;
        cond.push(x.clone());
        cond_logf.push(logf);
        new_points.push(x);
        new_logf.push(logf);
    }

    for (x, l) in new_points.into_iter().zip(new_logf) {
        evaluated.push(x, l, params.stage);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_indices_break_ties_by_index() {
        let pts = [vec![0.0], vec![1.0], vec![-1.0], vec![0.5]];
        assert_eq!(nearest_indices(&pts, &[0.0], 3), vec![0, 3, 1]);
        assert_eq!(nearest_indices(&pts, &[0.0], 10), vec![0, 3, 1, 2]);
    }
}
