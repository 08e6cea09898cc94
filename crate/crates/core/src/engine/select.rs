//! Candidate scoring for both selection passes.

use crate::error::{MedError, Result};
use crate::geometry::{pair_term_from_log_dist, DistanceSpec};

/// Index of the candidate maximizing `min_i term(c, x_i)` over the
/// conditioning set, with its score.
///
/// `cand_logf` are (surrogate) log densities of the candidates and
/// `cond_logf` the exact log densities of the conditioning points; all
/// coordinates are taken as already transformed by the distance's whitener.
/// Ties go to the lowest index. A running minimum that can no longer beat
/// the current best stops early, which leaves the result unchanged.
/// Conditioning points likely to give small terms should come first.
pub fn best_candidate<C: AsRef<[f64]>, D: AsRef<[f64]>>(
    cands: &[C],
    cand_logf: &[f64],
    cond: &[D],
    cond_logf: &[f64],
    gamma: f64,
    spec: &DistanceSpec,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (c, x) in cands.iter().enumerate() {
        let x = x.as_ref();
        let p = x.len();
        let bound = best.map_or(f64::NEG_INFINITY, |b| b.1);
        let mut score = f64::INFINITY;
        for (y, &ly) in cond.iter().zip(cond_logf) {
            let log_d = spec.log_dist_whitened(x, y.as_ref());
            let t = pair_term_from_log_dist(cand_logf[c], ly, log_d, gamma, p);
            if t < score {
                score = t;
                if score <= bound {
                    break;
                }
            }
        }
        if score > bound && score > f64::NEG_INFINITY {
            best = Some((c, score));
        }
    }
    best
}

/// Scores of every candidate without early exit (reference form of
/// [`best_candidate`]).
pub fn candidate_scores<C: AsRef<[f64]>, D: AsRef<[f64]>>(
    cands: &[C],
    cand_logf: &[f64],
    cond: &[D],
    cond_logf: &[f64],
    gamma: f64,
    spec: &DistanceSpec,
) -> Vec<f64> {
    cands
        .iter()
        .zip(cand_logf)
        .map(|(x, &lx)| {
            let x = x.as_ref();
            cond.iter()
                .zip(cond_logf)
                .map(|(y, &ly)| pair_term_from_log_dist(lx, ly, spec.log_dist_whitened(x, y.as_ref()), gamma, x.len()))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Greedy selection order of `n` of the points: first the argmax of `logf`,
/// then repeatedly the point maximizing its minimum pair term to those
/// already chosen. Uses exact log densities only and evaluates nothing.
pub fn greedy_order<P: AsRef<[f64]>>(
    points: &[P],
    logf: &[f64],
    n: usize,
    gamma: f64,
    spec: &DistanceSpec,
) -> Result<Vec<usize>> {
    let total = points.len();
    if total < n {
        return Err(MedError::invalid(format!(
            "cannot select {n} points from a candidate set of {total}"
        )));
    }
    if logf.len() != total {
        return Err(MedError::invalid("one log density per candidate is required"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let white: Vec<Vec<f64>> = points.iter().map(|x| spec.whiten(x.as_ref())).collect();
    let p = white[0].len();

    let mut first = 0;
    for i in 1..total {
        if logf[i] > logf[first] {
            first = i;
        }
    }
    let mut chosen = vec![false; total];
    let mut order = Vec::with_capacity(n);
    let mut min_score = vec![f64::INFINITY; total];
    let mut last = first;
    chosen[first] = true;
    order.push(first);

    while order.len() < n {
        let xl = &white[last];
        let mut best: Option<(usize, f64)> = None;
        for c in 0..total {
            if chosen[c] {
                continue;
            }
            let t = pair_term_from_log_dist(logf[c], logf[last], spec.log_dist_whitened(&white[c], xl), gamma, p);
            if t < min_score[c] {
                min_score[c] = t;
            }
            if best.is_none_or(|(_, b)| min_score[c] > b) {
                best = Some((c, min_score[c]));
            }
        }
        let (c, score) = best.expect("at least one unchosen candidate");
        if score == f64::NEG_INFINITY {
            return Err(MedError::invalid(format!(
                "greedy selection stalled at point {}: every remaining candidate coincides with a chosen point",
                order.len() + 1
            )));
        }
        chosen[c] = true;
        order.push(c);
        last = c;
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::psi_log;

    fn brute_force_greedy(points: &[Vec<f64>], logf: &[f64], n: usize, gamma: f64, s: f64) -> Vec<usize> {
        // replay the definition directly from pairwise distances
        let p = points[0].len() as f64;
        let term = |a: usize, b: usize| {
            let gaps: Vec<f64> = points[a].iter().zip(&points[b]).map(|(x, y)| (x - y).abs()).collect();
            let d = if s == 0.0 {
                gaps.iter().product::<f64>().powf(1.0 / p)
            } else {
                (gaps.iter().map(|g| g.powf(s)).sum::<f64>() / p).powf(1.0 / s)
            };
            gamma * (logf[a] + logf[b]) + 2.0 * p * d.ln()
        };
        let mut order = vec![(0..points.len())
            .max_by(|&a, &b| logf[a].total_cmp(&logf[b]).then(b.cmp(&a)))
            .unwrap()];
        while order.len() < n {
            let mut best = (usize::MAX, f64::NEG_INFINITY);
            for c in 0..points.len() {
                if order.contains(&c) {
                    continue;
                }
                let v = order.iter().map(|&i| term(c, i)).fold(f64::INFINITY, f64::min);
                if v > best.1 {
                    best = (c, v);
                }
            }
            order.push(best.0);
        }
        order
    }

    #[test]
    fn two_points_ordered_by_logf() {
        let pts = [vec![0.2], vec![0.8]];
        let order = greedy_order(&pts, &[-3.0, -1.0], 2, 1.0, &DistanceSpec::euclidean()).unwrap();
        assert_eq!(order, vec![1, 0]);
        assert!(greedy_order(&pts, &[0.0, 0.0], 3, 1.0, &DistanceSpec::euclidean()).is_err());
    }

    #[test]
    fn one_dimensional_order_matches_brute_force() {
        let pts: Vec<Vec<f64>> = [0.05, 0.31, 0.52, 0.74, 0.97].iter().map(|v| vec![*v]).collect();
        let logf = [-2.0, -0.4, 0.0, -0.9, -3.1];
        for &gamma in &[0.0, 0.5, 1.0] {
            let got = greedy_order(&pts, &logf, 4, gamma, &DistanceSpec::euclidean()).unwrap();
            assert_eq!(got, brute_force_greedy(&pts, &logf, 4, gamma, 2.0), "gamma {gamma}");
        }
    }

    #[test]
    fn random_2d_order_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<Vec<f64>> = (0..40).map(|_| vec![rng.random(), rng.random()]).collect();
        let logf: Vec<f64> = pts.iter().map(|x| -10.0 * ((x[0] - 0.4).powi(2) + (x[1] - 0.6).powi(2))).collect();
        for &s in &[0.0, 1.0, 2.0] {
            let got = greedy_order(&pts, &logf, 15, 0.7, &DistanceSpec::unwhitened(s)).unwrap();
            assert_eq!(got, brute_force_greedy(&pts, &logf, 15, 0.7, s), "s {s}");
        }
    }

    #[test]
    fn uniform_logf_gives_maximin_ordering() {
        let pts: Vec<Vec<f64>> = [0.0, 0.1, 0.45, 0.5, 1.0].iter().map(|v| vec![*v]).collect();
        let order = greedy_order(&pts, &[0.0; 5], 3, 1.0, &DistanceSpec::euclidean()).unwrap();
        // ties in logf go to index 0, then the farthest point, then the midpoint
        assert_eq!(order, vec![0, 4, 3]);
    }

    #[test]
    fn density_term_dominates_at_equal_distance() {
        let cands = [vec![0.4], vec![0.6]];
        let cond = [vec![0.5]];
        let best = best_candidate(&cands, &[0.0, -5.0], &cond, &[0.0], 1.0, &DistanceSpec::euclidean());
        assert_eq!(best.unwrap().0, 0);
        let best = best_candidate(&cands, &[-5.0, 0.0], &cond, &[0.0], 1.0, &DistanceSpec::euclidean());
        assert_eq!(best.unwrap().0, 1);
    }

    #[test]
    fn zero_gamma_is_pure_distance() {
        let cands = [vec![0.55], vec![0.9], vec![0.7]];
        let cond = [vec![0.5]];
        let best = best_candidate(&cands, &[0.0, -50.0, 3.0], &cond, &[0.0], 0.0, &DistanceSpec::euclidean());
        assert_eq!(best.unwrap().0, 1);
    }

    #[test]
    fn farthest_on_a_line_wins_under_uniform_surrogate() {
        let cands = [vec![0.6, 0.6], vec![0.9, 0.9], vec![0.7, 0.7]];
        let cond = [vec![0.5, 0.5]];
        let scores = candidate_scores(&cands, &[0.0; 3], &cond, &[0.0], 1.0, &DistanceSpec::euclidean());
        let hand: Vec<f64> = [0.1f64, 0.4, 0.2].iter().map(|g| 4.0 * g.ln()).collect();
        for (a, b) in scores.iter().zip(&hand) {
            assert!((a - b).abs() < 1e-12);
        }
        let best = best_candidate(&cands, &[0.0; 3], &cond, &[0.0], 1.0, &DistanceSpec::euclidean());
        assert_eq!(best.unwrap().0, 1);
    }

    #[test]
    fn early_exit_agrees_with_full_scoring() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let cands: Vec<Vec<f64>> = (0..60).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
            let cond: Vec<Vec<f64>> = (0..25).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
            let cl: Vec<f64> = (0..60).map(|_| -rng.random::<f64>() * 4.0).collect();
            let dl: Vec<f64> = (0..25).map(|_| -rng.random::<f64>() * 4.0).collect();
            let spec = DistanceSpec::unwhitened(rng.random::<f64>() * 2.0);
            let scores = candidate_scores(&cands, &cl, &cond, &dl, 0.6, &spec);
            let mut want = 0;
            for i in 1..scores.len() {
                if scores[i] > scores[want] {
                    want = i;
                }
            }
            let (got, score) = best_candidate(&cands, &cl, &cond, &dl, 0.6, &spec).unwrap();
            assert_eq!(got, want);
            assert_eq!(score, scores[want]);
        }
    }

    #[test]
    fn greedy_beats_its_own_prefix_alternatives() {
        // the psi of a greedy pair is the best achievable with the argmax as first point
        let pts: Vec<Vec<f64>> = [0.1, 0.35, 0.6, 0.95].iter().map(|v| vec![*v]).collect();
        let logf = [-1.0, 0.0, -0.5, -2.0];
        let spec = DistanceSpec::euclidean();
        let order = greedy_order(&pts, &logf, 2, 1.0, &spec).unwrap();
        let chosen: Vec<&Vec<f64>> = order.iter().map(|&i| &pts[i]).collect();
        let lf: Vec<f64> = order.iter().map(|&i| logf[i]).collect();
        let v = psi_log(&chosen, &lf, 1.0, &spec).unwrap().log_value;
        for j in [0, 2, 3] {
            let w = psi_log(&[&pts[1], &pts[j]], &[logf[1], logf[j]], 1.0, &spec).unwrap().log_value;
            assert!(v >= w);
        }
    }
}
