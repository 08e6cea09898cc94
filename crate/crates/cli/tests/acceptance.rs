//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. `MED_ACCEPTANCE_ONLY=3,6` runs a subset.
//!
//! Every numeric oracle here is computed independently of the library code
//! it checks.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use med_core::bench::compare;
use med_core::density::{make_ar1_normal, make_banana, DensityModel, EvaluationLedger, Uniform};
use med_core::diagnostics::cl2_discrepancy;
use med_core::engine::{default_k, default_n, RunConfig, RunOutput, SMode};
use med_core::geometry::{log_power_mean_dist, psi_log, DistanceSpec};
use med_core::sampler::{MedSampler, MetropolisSampler, SampleRequest, Sampler};
use med_core::surrogate::LimitKriging;
use med_core::MedEngine;
use nalgebra::DMatrix;
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// criterion 1
const BANANA_BUDGET: usize = 654;
const P30_BUDGET: usize = 5302;
const BANANA_MAX_SECS: f64 = 60.0;
const P30_MAX_SECS: f64 = 1200.0;
// criterion 3
const BANANA_MEAN_TOL: f64 = 0.05;
const FOLLOWUP_N: usize = 10_000;
const KS_MAX: f64 = 0.1;
const QUADRATURE_GRID: usize = 400;
const BANANA_MAX_TOTAL_SECS: f64 = 300.0;
// criterion 4
const INDEP_MEAN_TOL: f64 = 0.03;
const INDEP_SD_RANGE: (f64, f64) = (0.7, 1.3);
const INDEP_MAX_SECS: f64 = 600.0;
// criterion 5
const CORR_MAE_MAX: f64 = 0.15;
// criterion 6
const ELLIPSOID_REL_TOL: f64 = 0.05;
const ELLIPSOID_GRID: usize = 201;
const RANDOM_PAIRS: usize = 1000;
// criterion 7
const MIN_PROJECTION_GAP: f64 = 1e-6;
const RANDOM_SUBSETS: usize = 100;
// criterion 8
const INTERPOLATION_TOL: f64 = 1e-6;
const CONSTANT_TOL: f64 = 1e-8;
// criterion 9
const GEOMETRIC_LIMIT_TOL: f64 = 1e-4;
const S_NEAR_ZERO: f64 = 1e-6;
// criterion 10
const MC_SAMPLES: usize = 1_000_000;
const MC_SETS: usize = 10;
const MC_SIGMAS: f64 = 3.0;
/// "Exact" up to the rounding of the closed form.
const HAND_TOL: f64 = 1e-15;
// criterion 11
const BENCH_SEEDS: u64 = 10;
const BENCH_MIN_WINS: usize = 8;

/// AR(1) marginal sd used throughout, on the unit scale.
const SIGMA: f64 = 0.125;

type Criterion = (usize, &'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn run_engine(model: &dyn DensityModel, config: RunConfig) -> (RunOutput, EvaluationLedger, f64) {
    let mut ledger = EvaluationLedger::new();
    let t = Instant::now();
    let out = MedEngine::new(config).run(model, &mut ledger).expect("engine run");
    (out, ledger, t.elapsed().as_secs_f64())
}

fn column_stats(points: &[Vec<f64>], d: usize) -> (f64, f64) {
    let n = points.len() as f64;
    let mean = points.iter().map(|x| x[d]).sum::<f64>() / n;
    let var = points.iter().map(|x| (x[d] - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn coords(out: &RunOutput) -> Vec<Vec<f64>> {
    out.design.points.iter().map(|x| x.coords().to_vec()).collect()
}

fn med(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_med")).args(args).output().expect("spawn med");
    assert!(out.status.success(), "med {args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn read_points(path: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let cols: Vec<usize> = (0..header.len()).filter(|&c| header[c].starts_with('x')).collect();
    lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            cols.iter().map(|&c| cells[c].parse().unwrap()).collect()
        })
        .collect()
}

fn c1_budget() -> Verdict {
    let (_, ledger, secs) = run_engine(&make_banana(), RunConfig::for_dimension(2).with_seed(1));
    let p = 30;
    let rho = 0.9f64.powf((p as f64).ln());
    let model = make_ar1_normal(p, rho, SIGMA).unwrap();
    let (_, ledger30, secs30) = run_engine(&model, RunConfig::for_dimension(p).with_seed(1));
    verdict(
        ledger.count() == BANANA_BUDGET && ledger30.count() == P30_BUDGET && secs < BANANA_MAX_SECS && secs30 < P30_MAX_SECS,
        format!(
            "banana {} evaluations in {secs:.1} s (want {BANANA_BUDGET}, < {BANANA_MAX_SECS} s); p=30 {} in {secs30:.0} s (want {P30_BUDGET}, < {P30_MAX_SECS} s)",
            ledger.count(),
            ledger30.count()
        ),
    )
}

fn c2_defaults() -> Verdict {
    let want = [(2, 109, 6), (3, 113, 7), (10, 149, 13), (30, 241, 22)];
    let got: Vec<(usize, usize, usize)> = want.iter().map(|&(p, _, _)| (p, default_n(p), default_k(p))).collect();
    verdict(got == want, format!("(p, n, K) = {got:?}"))
}

/// Banana log density in original coordinates, written out independently.
fn banana_original(x1: f64, x2: f64) -> f64 {
    -x1 * x1 / 200.0 - 0.5 * (x2 + 0.03 * x1 * x1 - 3.0).powi(2)
}

/// Marginal CDFs of the banana on the unit scale from a trapezoid rule on a
/// `g x g` grid; returns (grid, cdf of x1, cdf of x2).
fn banana_quadrature(g: usize) -> (Vec<f64>, [Vec<f64>; 2]) {
    let u: Vec<f64> = (0..g).map(|i| i as f64 / (g - 1) as f64).collect();
    let h = 1.0 / (g - 1) as f64;
    let w = |i: usize| if i == 0 || i == g - 1 { 0.5 * h } else { h };
    let mut m = [vec![0.0; g], vec![0.0; g]];
    for i in 0..g {
        for j in 0..g {
            let f = banana_original(-40.0 + 80.0 * u[i], -25.0 + 35.0 * u[j]).exp();
            m[0][i] += w(j) * f;
            m[1][j] += w(i) * f;
        }
    }
    let cdf = |m: &[f64]| {
        let mut c = vec![0.0; g];
        for i in 1..g {
            c[i] = c[i - 1] + 0.5 * h * (m[i] + m[i - 1]);
        }
        let total = c[g - 1];
        c.iter().map(|v| v / total).collect::<Vec<f64>>()
    };
    let cdfs = [cdf(&m[0]), cdf(&m[1])];
    (u, cdfs)
}

fn ks_statistic(sample: &[f64], grid: &[f64], cdf: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let h = grid[1] - grid[0];
    let mut worst: f64 = 0.0;
    for (k, x) in s.iter().enumerate() {
        let i = ((x / h).floor() as usize).min(grid.len() - 2);
        let t = (x - grid[i]) / h;
        let f = cdf[i] + t * (cdf[i + 1] - cdf[i]);
        worst = worst.max((k + 1) as f64 / n - f).max(f - k as f64 / n);
    }
    worst
}

fn c3_banana() -> Verdict {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let run_s = run.to_str().unwrap();
    med(&["generate", "--density", "banana", "--seed", "42", "--out", run_s]);
    med(&["followup", "--run", run_s, "--N", &FOLLOWUP_N.to_string(), "--seed", "1"]);
    let design = read_points(&run.join("design.csv"));
    let samples = read_points(&run.join("samples.csv"));
    let (mean_x1, _) = column_stats(&design, 0);
    let (grid, cdfs) = banana_quadrature(QUADRATURE_GRID);
    let ks: Vec<f64> = (0..2)
        .map(|d| ks_statistic(&samples.iter().map(|x| x[d]).collect::<Vec<_>>(), &grid, &cdfs[d]))
        .collect();
    let secs = t.elapsed().as_secs_f64();
    verdict(
        (mean_x1 - 0.5).abs() <= BANANA_MEAN_TOL && ks.iter().all(|k| *k < KS_MAX) && secs < BANANA_MAX_TOTAL_SECS,
        format!(
            "design x1 mean {mean_x1:.4} (|.-0.5| <= {BANANA_MEAN_TOL}); follow-up {} samples, KS x1 {:.4}, x2 {:.4} (< {KS_MAX}); {secs:.1} s",
            samples.len(),
            ks[0],
            ks[1]
        ),
    )
}

fn c4_independent() -> Verdict {
    let p = 10;
    let model = make_ar1_normal(p, 0.0, SIGMA).unwrap();
    let (out, _, secs) = run_engine(&model, RunConfig::for_dimension(p).with_seed(1));
    let pts = coords(&out);
    let stats: Vec<(f64, f64)> = (0..p).map(|d| column_stats(&pts, d)).collect();
    let worst_mean = stats.iter().map(|(m, _)| (m - 0.5).abs()).fold(0.0, f64::max);
    let ratios: Vec<f64> = stats.iter().map(|(_, s)| s / SIGMA).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    verdict(
        out.design.len() == 149
            && worst_mean <= INDEP_MEAN_TOL
            && lo >= INDEP_SD_RANGE.0
            && hi <= INDEP_SD_RANGE.1
            && secs < INDEP_MAX_SECS,
        format!(
            "n={} max |mean-0.5| {worst_mean:.4} (<= {INDEP_MEAN_TOL}); sd/sigma in [{lo:.3}, {hi:.3}] (within {INDEP_SD_RANGE:?}); {secs:.1} s",
            out.design.len()
        ),
    )
}

fn c5_correlated() -> Verdict {
    let p = 10;
    let rho = 0.9;
    let model = make_ar1_normal(p, rho, SIGMA).unwrap();
    let (out, _, _) = run_engine(&model, RunConfig::for_dimension(p).with_seed(1));
    let pts = coords(&out);
    let stats: Vec<(f64, f64)> = (0..p).map(|d| column_stats(&pts, d)).collect();
    let n = pts.len() as f64;
    let mut errs = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            let cov = pts.iter().map(|x| (x[i] - stats[i].0) * (x[j] - stats[j].0)).sum::<f64>() / (n - 1.0);
            let r = cov / (stats[i].1 * stats[j].1);
            errs.push((r - rho.powi((j - i) as i32)).abs());
        }
    }
    let mae = errs.iter().sum::<f64>() / errs.len() as f64;
    let mean_sd_on = stats.iter().map(|s| s.1).sum::<f64>() / p as f64;

    let (off, _, _) = run_engine(&model, RunConfig::for_dimension(p).with_seed(1).with_whitening(false));
    let pts_off = coords(&off);
    let mean_sd_off = (0..p).map(|d| column_stats(&pts_off, d).1).sum::<f64>() / p as f64;
    verdict(
        errs.len() == 45 && mae <= CORR_MAE_MAX && mean_sd_off > SIGMA,
        format!(
            "whitened: correlation MAE {mae:.4} over {} pairs (<= {CORR_MAE_MAX}), mean sd {mean_sd_on:.4}; unwhitened: mean sd {mean_sd_off:.4} (> {SIGMA})",
            errs.len()
        ),
    )
}

fn c6_ellipsoid() -> Verdict {
    let p = 2.0;
    let mut literal_ok = true;
    let mut dominance_ok = true;
    let mut parts = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for rho in [0.0, 0.5, 0.9] {
        // oracle: maximize -q + p ln q with q = u' S^-1 u, S = sigma^2 [[1, rho], [rho, 1]]
        let det = SIGMA.powi(4) * (1.0 - rho * rho);
        let q = |u: [f64; 2]| SIGMA * SIGMA * (u[0] * u[0] - 2.0 * rho * u[0] * u[1] + u[1] * u[1]) / det;
        let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
        for i in 0..ELLIPSOID_GRID {
            for j in 0..ELLIPSOID_GRID {
                let u = [-0.5 + i as f64 / (ELLIPSOID_GRID - 1) as f64, -0.5 + j as f64 / (ELLIPSOID_GRID - 1) as f64];
                let qu = q(u);
                if qu == 0.0 {
                    continue;
                }
                let v = -qu + p * qu.ln();
                if v > best.0 {
                    best = (v, u);
                }
            }
        }
        let u = best.1;
        let qstar = q(u);
        let target = p * SIGMA * SIGMA;
        let rel_literal = (qstar - target).abs() / target;
        let rel_p = (qstar - p).abs() / p;
        literal_ok &= rel_literal < ELLIPSOID_REL_TOL;

        let model = make_ar1_normal(2, rho, SIGMA).unwrap();
        let sigma = DMatrix::from_row_slice(2, 2, &[SIGMA * SIGMA, rho * SIGMA * SIGMA, rho * SIGMA * SIGMA, SIGMA * SIGMA]);
        let spec = DistanceSpec::whitened(2.0, sigma).unwrap();
        let crit = |pts: &[Vec<f64>]| {
            let lf: Vec<f64> = pts.iter().map(|x| model.log_density(x).unwrap()).collect();
            psi_log(pts, &lf, 1.0, &spec).unwrap().log_value
        };
        let at_oracle = crit(&[vec![0.5 - u[0], 0.5 - u[1]], vec![0.5 + u[0], 0.5 + u[1]]]);
        let beaten = (0..RANDOM_PAIRS)
            .filter(|_| {
                let d: Vec<Vec<f64>> = (0..2).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
                crit(&d) > at_oracle
            })
            .count();
        dominance_ok &= beaten == 0;
        parts.push(format!(
            "rho={rho}: u'S^-1u={qstar:.4}, rel. to p*sigma^2 {rel_literal:.1}, rel. to p {rel_p:.4}, random designs above oracle {beaten}/{RANDOM_PAIRS}"
        ));
    }
    verdict(
        literal_ok && dominance_ok,
        format!(
            "{}; literal p*sigma^2 target {} (criterion double counts sigma^2, see README), dominance {}",
            parts.join("; "),
            if literal_ok { "met" } else { "missed" },
            if dominance_ok { "holds" } else { "violated" }
        ),
    )
}

fn c7_uniform() -> Verdict {
    let model = Uniform::new(2);
    let base = RunConfig::for_dimension(2).with_size(25, default_k(2)).with_seed(7);
    let (zero, _, _) = run_engine(&model, base.clone().with_s(SMode::Fixed(0.0)));
    let mut gaps = Vec::new();
    for d in 0..2 {
        let mut v: Vec<f64> = zero.design.points.iter().map(|x| x[d]).collect();
        v.sort_by(f64::total_cmp);
        gaps.push(v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min));
    }
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);

    let (two, _, _) = run_engine(&model, base.with_s(SMode::Fixed(2.0)));
    let spec = DistanceSpec::unwhitened(2.0);
    let psi = |idx: &[usize]| {
        let pts: Vec<&[f64]> = idx.iter().map(|&i| two.evaluated.points[i].coords()).collect();
        let lf: Vec<f64> = idx.iter().map(|&i| two.evaluated.logf[i]).collect();
        psi_log(&pts, &lf, 1.0, &spec).unwrap().log_value
    };
    let design_psi = psi_log(&two.design.points, &two.design.logf, 1.0, &spec).unwrap().log_value;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut random: Vec<f64> = (0..RANDOM_SUBSETS)
        .map(|_| psi(&sample_indices(&mut rng, two.evaluated.len(), 25).into_vec()))
        .collect();
    random.sort_by(f64::total_cmp);
    let median = 0.5 * (random[RANDOM_SUBSETS / 2 - 1] + random[RANDOM_SUBSETS / 2]);
    verdict(
        min_gap > MIN_PROJECTION_GAP && design_psi >= median,
        format!(
            "s=0: min projection gap {min_gap:.3e} (> {MIN_PROJECTION_GAP:e}); s=2: log psi {design_psi:.4} vs median of {RANDOM_SUBSETS} random subsets of {} candidates {median:.4}",
            two.evaluated.len()
        ),
    )
}

fn c8_surrogate() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
    let y: Vec<f64> = x.iter().map(|v| (4.0 * v[0]).sin() + v[1] * v[2] - 2.0 * v[2] * v[2]).collect();
    let model = LimitKriging::fit_default(&x, &y).unwrap();
    let interp = x.iter().zip(&y).map(|(v, t)| (model.predict(v) - t).abs()).fold(0.0, f64::max);

    let c = vec![2.5; x.len()];
    let flat = LimitKriging::fit_default(&x, &c).unwrap();
    let probes: Vec<Vec<f64>> = (0..500).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
    let constant = probes.iter().map(|v| (flat.predict(v) - 2.5).abs()).fold(0.0, f64::max);

    let single = LimitKriging::fit_default(&[vec![0.3, 0.6, 0.9]], &[-1.25]).unwrap();
    let one = probes.iter().map(|v| (single.predict(v) + 1.25).abs()).fold(0.0, f64::max);
    verdict(
        interp <= INTERPOLATION_TOL && constant <= CONSTANT_TOL && one <= CONSTANT_TOL,
        format!(
            "max interpolation error {interp:.2e} (<= {INTERPOLATION_TOL:e}); constant data {constant:.2e}, single point {one:.2e} (<= {CONSTANT_TOL:e})"
        ),
    )
}

fn c9_geometry() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = [S_NEAR_ZERO, 0.1, 0.5, 1.0, 1.5, 2.0, 3.0];
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for _ in 0..1000 {
        let p = rng.random_range(1..=6);
        let a: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
        let geo = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).product::<f64>().powf(1.0 / p as f64);
        worst = worst.max((log_power_mean_dist(&a, &b, S_NEAR_ZERO).exp() - geo).abs());
        let d: Vec<f64> = grid.iter().map(|&s| log_power_mean_dist(&a, &b, s).exp()).collect();
        monotone &= d.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    }
    verdict(
        worst < GEOMETRIC_LIMIT_TOL && monotone,
        format!("max |d_s - geometric mean| at s={S_NEAR_ZERO:e}: {worst:.2e} (< {GEOMETRIC_LIMIT_TOL:e}); monotone in s on all 1000 pairs: {monotone}"),
    )
}

/// Squared local discrepancy summed over the nonempty coordinate subsets of
/// a 2-d point set, at one integration point. Its mean over `x ~ U[0,1]^2` is
/// the squared centered L2 discrepancy.
fn cl2_integrand(points: &[[f64; 2]], x: [f64; 2]) -> f64 {
    // box between x and the cube vertex nearest to x, per coordinate
    let inside = |y: f64, x: f64| if x < 0.5 { y < x } else { y >= x };
    let side = |x: f64| if x < 0.5 { x } else { 1.0 - x };
    let n = points.len() as f64;
    let mut total = 0.0;
    for mask in 1..4u32 {
        let vol: f64 = x
            .iter()
            .enumerate()
            .filter(|(d, _)| mask & (1 << d) != 0)
            .map(|(_, v)| side(*v))
            .product();
        let count = points
            .iter()
            .filter(|y| (0..2).all(|d| mask & (1 << d) == 0 || inside(y[d], x[d])))
            .count() as f64;
        total += (vol - count / n).powi(2);
    }
    total
}

fn c10_cl2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_z: f64 = 0.0;
    for _ in 0..MC_SETS {
        let pts: Vec<[f64; 2]> = (0..16).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
        let (mut s, mut ss) = (0.0, 0.0);
        for _ in 0..MC_SAMPLES {
            let g = cl2_integrand(&pts, [rng.random::<f64>(), rng.random::<f64>()]);
            s += g;
            ss += g * g;
        }
        let mean = s / MC_SAMPLES as f64;
        let se = ((ss / MC_SAMPLES as f64 - mean * mean) / (MC_SAMPLES as f64 - 1.0)).sqrt();
        let closed = cl2_discrepancy(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap().powi(2);
        worst_z = worst_z.max((closed - mean).abs() / se);
    }
    let centre = cl2_discrepancy(&[vec![0.5]]).unwrap().powi(2);
    let corner = cl2_discrepancy(&[vec![0.0]]).unwrap().powi(2);
    // exact integral of the 1-d integrand for the single point x = 0:
    // local discrepancy is t - 1 for t < 1/2 and 1 - t for t >= 1/2, so 7/24 + 1/24
    let corner_oracle = 1.0 / 3.0;
    let hand_centre = 1.0 / 12.0;
    let hand_corner = 7.0 / 12.0;
    verdict(
        worst_z <= MC_SIGMAS && (centre - hand_centre).abs() <= HAND_TOL && (corner - hand_corner).abs() <= HAND_TOL,
        format!(
            "closed form vs {MC_SAMPLES}-sample MC on {MC_SETS} sets: worst |z| {worst_z:.2} (<= {MC_SIGMAS}); n=1 x=0.5: {centre} (hand 1/12); n=1 x=0: {corner} (hand 7/12, integral oracle {corner_oracle})"
        ),
    )
}

fn c11_bench() -> Verdict {
    let model = make_banana();
    let samplers: Vec<Box<dyn Sampler>> = vec![Box::new(MedSampler), Box::new(MetropolisSampler { initial_sd: 0.1 })];
    let mut wins = 0;
    let mut pairs = Vec::new();
    for seed in 0..BENCH_SEEDS {
        let req = SampleRequest {
            n: default_n(2),
            stages: default_k(2),
            seed,
        };
        let c = compare(&model, &samplers, &req).unwrap();
        let (m, r) = (c.entries[0].cl2, c.entries[1].cl2);
        assert_eq!(c.entries[1].evaluations, req.budget());
        if m < r {
            wins += 1;
        }
        pairs.push(format!("{m:.3}/{r:.3}"));
    }
    verdict(
        wins >= BENCH_MIN_WINS,
        format!("MED below Metropolis in {wins}/{BENCH_SEEDS} seeds (>= {BENCH_MIN_WINS}); CL2 med/metropolis {}", pairs.join(" ")),
    )
}

fn c12_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let run = dir.path().join(name);
        med(&["generate", "--density", "banana", "--seed", "2024", "--out", run.to_str().unwrap()]);
        runs.push(run);
    }
    let same = |f: &str| fs::read(runs[0].join(f)).unwrap() == fs::read(runs[1].join(f)).unwrap();
    let digest = |r: &Path| {
        let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(r.join("manifest.json")).unwrap()).unwrap();
        m["ledger_digest"].as_str().unwrap().to_string()
    };
    let files: Vec<(&str, bool)> = ["design.csv", "ledger.csv", "report.json"].iter().map(|f| (*f, same(f))).collect();
    let digests = digest(&runs[0]) == digest(&runs[1]);
    verdict(
        digests && files.iter().all(|f| f.1),
        format!("ledger digests equal: {digests}; byte-identical: {files:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "budget exactness", c1_budget),
        (2, "default n and K", c2_defaults),
        (3, "banana accuracy", c3_banana),
        (4, "independent normal marginals", c4_independent),
        (5, "correlated normal with whitening", c5_correlated),
        (6, "two-point ellipsoid", c6_ellipsoid),
        (7, "uniform projections", c7_uniform),
        (8, "surrogate contract", c8_surrogate),
        (9, "geometry limits", c9_geometry),
        (10, "CL2 oracle", c10_cl2),
        (11, "benchmark direction", c11_bench),
        (12, "determinism", c12_determinism),
    ];
    let only: Option<Vec<usize>> = std::env::var("MED_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let t = Instant::now();
        let v = check();
        println!(
            "criterion {id:>2} {} {name}: {} [{:.1} s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
        if !v.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
