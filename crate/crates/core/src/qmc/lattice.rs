//! Rank-1 lattice rules built component by component.
//!
//! The generating vector minimizes the squared worst-case error for the
//! shift-invariant kernel `prod_l (1 + w_l B2({x_l}))` with product weights
//! `w_l = 1 / l^2`, where `B2(x) = x^2 - x + 1/6`. The construction is the
//! naive `O(n^2)` per component search, which is plenty for designs of a few
//! hundred points.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::primes::is_prime;
use crate::error::{MedError, Result};
use crate::point::Point;
use crate::rng::{stream, Domain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeRule {
    pub n: usize,
    pub z: Vec<usize>,
    pub shift: Option<Vec<f64>>,
}

fn b2(x: f64) -> f64 {
    x * x - x + 1.0 / 6.0
}

/// Weight of coordinate `l` (1-based).
pub fn product_weight(l: usize) -> f64 {
    1.0 / (l * l) as f64
}

/// Squared worst-case error of the unshifted lattice with generator `z`.
pub fn lattice_error_sq(n: usize, z: &[usize]) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        let mut prod = 1.0;
        for (l, &zl) in z.iter().enumerate() {
            let k = (i as u64 * zl as u64) % n as u64;
            prod *= 1.0 + product_weight(l + 1) * b2(k as f64 / n as f64);
        }
        total += prod;
    }
    total / n as f64 - 1.0
}

/// Component-by-component construction with `z_1 = 1`. Ties between
/// candidate components go to the smallest value.
pub fn cbc_lattice(n: usize, p: usize) -> Result<LatticeRule> {
    if !is_prime(n) {
        return Err(MedError::invalid(format!("lattice size must be prime, got {n}")));
    }
    if p == 0 {
        return Err(MedError::invalid("lattice dimension must be at least 1"));
    }
    let table: Vec<f64> = (0..n).map(|k| b2(k as f64 / n as f64)).collect();
    let mut prod = vec![0.0; n];
    for (i, v) in prod.iter_mut().enumerate() {
        *v = 1.0 + product_weight(1) * table[i];
    }
    let mut z = vec![1usize];
    for l in 2..=p {
        let w = product_weight(l);
        let mut best = (f64::INFINITY, 1usize);
        for cand in 1..n {
            let mut err = 0.0;
            for (i, pi) in prod.iter().enumerate() {
                let k = (i * cand) % n;
                err += pi * (1.0 + w * table[k]);
            }
            if err < best.0 - 1e-12 * best.0.abs().min(1e300) {
                best = (err, cand);
            }
        }
        let zl = best.1;
        for (i, pi) in prod.iter_mut().enumerate() {
            *pi *= 1.0 + w * table[(i * zl) % n];
        }
        z.push(zl);
    }
    Ok(LatticeRule { n, z, shift: None })
}

impl LatticeRule {
    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// Adds a uniform random shift drawn from `seed`.
    pub fn with_random_shift(mut self, seed: u64) -> Self {
        let mut rng = stream(seed, Domain::LatticeShift, 0, 0);
        self.shift = Some((0..self.dim()).map(|_| rng.random::<f64>()).collect());
        self
    }

    pub fn point(&self, i: usize) -> Point {
        let n = self.n as u64;
        Point::new(
            self.z
                .iter()
                .enumerate()
                .map(|(l, &zl)| {
                    let base = ((i as u64 * zl as u64) % n) as f64 / n as f64;
                    match &self.shift {
                        Some(s) => (base + s[l]).fract(),
                        None => base,
                    }
                })
                .collect(),
        )
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    pub fn error_sq(&self) -> f64 {
        lattice_error_sq(self.n, &self.z)
    }
}
