//! Quality measures for point sets.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::density::truth::std_normal_cdf;
use crate::density::Truth;
use crate::error::{MedError, Result};
use crate::geometry::{charge_log, psi_log, DistanceSpec};
use crate::linalg::{sample_covariance, shrink_to_condition};
use crate::engine::MAX_SIGMA_CONDITION;
use crate::point::sq_euclidean;

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `log q_i + log q_j - log d_ij` for every ordered pair `i != j`
/// (Euclidean `d`); `+inf` for coincident points.
fn energy_terms<'a, P: AsRef<[f64]>>(points: &'a [P], logf: &'a [f64]) -> impl Iterator<Item = (usize, usize, f64)> + 'a {
    let n = points.len();
    let p = points.first().map_or(1, |x| x.as_ref().len());
    (0..n).flat_map(move |i| {
        (0..n).filter(move |&j| j != i).map(move |j| {
            let d2 = sq_euclidean(points[i].as_ref(), points[j].as_ref());
            let t = charge_log(logf[i], p) + charge_log(logf[j], p) - 0.5 * d2.ln();
            (i, j, t)
        })
    })
}

fn check_pairs<P: AsRef<[f64]>>(points: &[P], logf: &[f64]) -> Result<()> {
    if points.len() < 2 {
        return Err(MedError::invalid("energy needs at least two points"));
    }
    if logf.len() != points.len() {
        return Err(MedError::invalid("one log density per point is required"));
    }
    Ok(())
}

/// Log of the total potential energy `sum_{i != j} q_i q_j / d_ij`,
/// `q = f^{-1/(2p)}`. Coincident points give `+inf`.
pub fn total_energy_log<P: AsRef<[f64]>>(points: &[P], logf: &[f64]) -> Result<f64> {
    check_pairs(points, logf)?;
    Ok(log_sum_exp(energy_terms(points, logf).map(|t| t.2)))
}

/// Log of `max_{i != j} q_i q_j / d_ij` and the (unordered) pair attaining it.
pub fn max_energy_log<P: AsRef<[f64]>>(points: &[P], logf: &[f64]) -> Result<(f64, (usize, usize))> {
    check_pairs(points, logf)?;
    let mut best = (f64::NEG_INFINITY, (0, 1));
    for (i, j, t) in energy_terms(points, logf) {
        if i < j && t > best.0 {
            best = (t, (i, j));
        }
    }
    Ok(best)
}

/// Centered L2 discrepancy of points in `[0,1]^p`.
pub fn cl2_discrepancy<P: AsRef<[f64]>>(points: &[P]) -> Result<f64> {
    let n = points.len();
    if n == 0 {
        return Err(MedError::invalid("discrepancy of an empty point set"));
    }
    let p = points[0].as_ref().len();
    if points.iter().any(|x| x.as_ref().iter().any(|v| !(0.0..=1.0).contains(v))) {
        return Err(MedError::invalid("discrepancy needs points in the unit cube"));
    }
    let a: Vec<Vec<f64>> = points.iter().map(|x| x.as_ref().iter().map(|v| (v - 0.5).abs()).collect()).collect();
    let first = (13.0f64 / 12.0).powi(p as i32);
    let second: f64 = a
        .iter()
        .map(|ai| ai.iter().map(|t| 1.0 + 0.5 * t - 0.5 * t * t).product::<f64>())
        .sum::<f64>()
        * 2.0
        / n as f64;
    let mut third = 0.0;
    for i in 0..n {
        let xi = points[i].as_ref();
        for j in 0..n {
            let xj = points[j].as_ref();
            let mut prod = 1.0;
            for l in 0..p {
                prod *= 1.0 + 0.5 * a[i][l] + 0.5 * a[j][l] - 0.5 * (xi[l] - xj[l]).abs();
            }
            third += prod;
        }
    }
    third /= (n * n) as f64;
    Ok((first - second + third).max(0.0).sqrt())
}

/// How points are mapped to the unit cube before computing CL2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CdfTransform {
    /// Points are already on the scale of interest.
    None,
    /// Rosenblatt transform of a known target.
    Truth,
    /// Per-dimension normal CDF with the sample mean and sd.
    Estimated,
}

/// Applies a [`CdfTransform`]; `truth` is required for [`CdfTransform::Truth`].
pub fn cdf_transform<P: AsRef<[f64]>>(points: &[P], mode: CdfTransform, truth: Option<&Truth>) -> Result<Vec<Vec<f64>>> {
    match mode {
        CdfTransform::None => Ok(points.iter().map(|x| x.as_ref().to_vec()).collect()),
        CdfTransform::Truth => {
            let t = truth.ok_or_else(|| MedError::invalid("truth transform requested for a density without a known truth"))?;
            Ok(points.iter().map(|x| t.to_uniform(x.as_ref())).collect())
        }
        CdfTransform::Estimated => {
            let m = marginals_and_correlations(points, 1)?;
            Ok(points
                .iter()
                .map(|x| {
                    x.as_ref()
                        .iter()
                        .zip(&m.marginals)
                        .map(|(v, s)| if s.sd > 0.0 { std_normal_cdf((v - s.mean) / s.sd) } else { 0.5 })
                        .collect()
                })
                .collect())
        }
    }
}

/// `log` of the volume of a `p`-ball of diameter `d`.
pub fn log_ball_volume(p: usize, d: f64) -> f64 {
    let h = p as f64 / 2.0;
    h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0) + p as f64 * (d / 2.0).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityBalance {
    /// `log P_{i i*}` with `i*` the partner minimizing `P_ij`.
    pub log_p: Vec<f64>,
    pub partner: Vec<usize>,
    /// `max - min` of `log_p`.
    pub spread: f64,
}

/// `P_ij = sqrt(f_i f_j) V(d_ij)` with `V` the volume of the ball with
/// diameter `d_ij`. Densities are unnormalized, so only comparisons within a
/// design are meaningful.
pub fn probability_balance<P: AsRef<[f64]>>(points: &[P], logf: &[f64]) -> Result<ProbabilityBalance> {
    check_pairs(points, logf)?;
    let n = points.len();
    let p = points[0].as_ref().len();
    let mut log_p = Vec::with_capacity(n);
    let mut partner = Vec::with_capacity(n);
    for i in 0..n {
        let mut best = (f64::INFINITY, 0);
        for j in (0..n).filter(|&j| j != i) {
            let d = sq_euclidean(points[i].as_ref(), points[j].as_ref()).sqrt();
            let v = 0.5 * (logf[i] + logf[j]) + log_ball_volume(p, d);
            if v < best.0 {
                best = (v, j);
            }
        }
        log_p.push(best.0);
        partner.push(best.1);
    }
    let hi = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = log_p.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ProbabilityBalance {
        log_p,
        partner,
        spread: hi - lo,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalSummary {
    pub mean: f64,
    pub sd: f64,
    /// Equal-width bins on `[0,1]`; masses sum to one.
    pub histogram: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginals {
    pub marginals: Vec<MarginalSummary>,
    /// Sample correlations; entries involving a zero-variance coordinate are 0.
    pub correlation: Vec<Vec<f64>>,
    pub degenerate: bool,
}

/// `ceil(sqrt(n))`.
pub fn default_bins(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).max(1)
}

pub fn marginals_and_correlations<P: AsRef<[f64]>>(points: &[P], bins: usize) -> Result<Marginals> {
    let n = points.len();
    if n < 2 {
        return Err(MedError::invalid("marginal summaries need at least two points"));
    }
    if bins == 0 {
        return Err(MedError::invalid("bins: must be at least 1"));
    }
    let p = points[0].as_ref().len();
    let cov = sample_covariance(points);
    let mut marginals = Vec::with_capacity(p);
    for l in 0..p {
        let mean = points.iter().map(|x| x.as_ref()[l]).sum::<f64>() / n as f64;
        let mut histogram = vec![0.0; bins];
        for x in points {
            let b = ((x.as_ref()[l] * bins as f64).floor().max(0.0) as usize).min(bins - 1);
            histogram[b] += 1.0 / n as f64;
        }
        marginals.push(MarginalSummary {
            mean,
            sd: cov[(l, l)].max(0.0).sqrt(),
            histogram,
        });
    }
    let mut degenerate = false;
    let correlation = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| {
                    let (si, sj) = (marginals[i].sd, marginals[j].sd);
                    if si == 0.0 || sj == 0.0 {
                        degenerate = true;
                        0.0
                    } else if i == j {
                        1.0
                    } else {
                        (cov[(i, j)] / (si * sj)).clamp(-1.0, 1.0)
                    }
                })
                .collect()
        })
        .collect();
    Ok(Marginals {
        marginals,
        correlation,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct DiagnosticsOptions<'a> {
    pub bins: Option<usize>,
    pub gamma: f64,
    pub s: f64,
    pub transform: CdfTransform,
    pub truth: Option<&'a Truth>,
}

impl Default for DiagnosticsOptions<'_> {
    fn default() -> Self {
        DiagnosticsOptions {
            bins: None,
            gamma: 1.0,
            s: 2.0,
            transform: CdfTransform::Estimated,
            truth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthComparison {
    /// `|sample mean - true mean|` per coordinate.
    pub mean_error: Vec<f64>,
    /// `sample sd / true sd` per coordinate.
    pub sd_ratio: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub n: usize,
    pub dim: usize,
    pub gamma: f64,
    pub s: f64,
    pub psi_log: f64,
    /// Criterion whitened by the design's own (conditioned) covariance.
    pub psi_tilde_log: f64,
    pub total_energy_log: f64,
    pub max_energy_log: f64,
    pub cl2: f64,
    pub cl2_transform: CdfTransform,
    pub marginals: Vec<MarginalSummary>,
    pub correlation: Vec<Vec<f64>>,
    pub degenerate: bool,
    pub probability_balance: ProbabilityBalance,
    pub truth: Option<TruthComparison>,
    pub note: String,
}

/// All diagnostics of a design with attached log densities.
pub fn diagnose<P: AsRef<[f64]>>(points: &[P], logf: &[f64], opts: &DiagnosticsOptions<'_>) -> Result<DiagnosticsReport> {
    check_pairs(points, logf)?;
    let n = points.len();
    let p = points[0].as_ref().len();
    let bins = opts.bins.unwrap_or_else(|| default_bins(n));
    let m = marginals_and_correlations(points, bins)?;
    let plain = DistanceSpec::unwhitened(opts.s);
    let psi = psi_log(points, logf, opts.gamma, &plain)?.log_value;
    let psi_tilde = if m.degenerate {
        psi
    } else {
        let sigma = shrink_to_condition(&sample_covariance(points), MAX_SIGMA_CONDITION);
        psi_log(points, logf, opts.gamma, &DistanceSpec::whitened(opts.s, sigma)?)?.log_value
    };
    let unit = cdf_transform(points, opts.transform, opts.truth)?;
    let truth = opts.truth.map(|t| {
        let moments = t.marginal_moments();
        TruthComparison {
            mean_error: m.marginals.iter().zip(&moments).map(|(s, (mu, _))| (s.mean - mu).abs()).collect(),
            sd_ratio: m.marginals.iter().zip(&moments).map(|(s, (_, sd))| s.sd / sd).collect(),
        }
    });
    Ok(DiagnosticsReport {
        n,
        dim: p,
        gamma: opts.gamma,
        s: opts.s,
        psi_log: psi,
        psi_tilde_log: psi_tilde,
        total_energy_log: total_energy_log(points, logf)?,
        max_energy_log: max_energy_log(points, logf)?.0,
        cl2: cl2_discrepancy(&unit)?,
        cl2_transform: opts.transform,
        marginals: m.marginals,
        correlation: m.correlation,
        degenerate: m.degenerate,
        probability_balance: probability_balance(points, logf)?,
        truth,
        note: "densities are unnormalized: energies and probability-balance values compare only within this design".into(),
    })
}
