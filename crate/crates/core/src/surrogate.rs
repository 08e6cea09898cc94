//! Limit kriging with a Gaussian correlation function and a fixed
//! correlation parameter.
//!
//! The predictor is `y(x) = r(x)' R^-1 y / r(x)' R^-1 1`, where
//! `R_ij = exp(-theta |x_i - x_j|^2) + eps I`. Unlike ordinary kriging it
//! does not revert to a global mean away from the data, which makes it much
//! less sensitive to a poorly chosen `theta`.

use nalgebra::{DMatrix, DVector};

use crate::error::{MedError, Result};
use crate::point::{sq_euclidean, Point};

pub const INITIAL_JITTER: f64 = 1e-8;
pub const MAX_JITTER: f64 = 1e-4;
/// Training points closer than 1e-12 are treated as duplicates.
const DUPLICATE_SQ_DIST: f64 = 1e-24;
/// Denominators smaller than this fall back to the GLS mean.
const MIN_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LimitKriging {
    x: Vec<Point>,
    theta: f64,
    jitter: f64,
    r_inv_y: Vec<f64>,
    r_inv_one: Vec<f64>,
    gls_mean: f64,
}

/// `theta = ln 2 / d^2`, with `d` the median nearest-neighbour distance, so
/// the correlation at a typical spacing is one half.
pub fn default_theta<P: AsRef<[f64]>>(x: &[P]) -> f64 {
    let k = x.len();
    if k < 2 {
        return 1.0;
    }
    let mut nn: Vec<f64> = (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| j != i)
                .map(|j| sq_euclidean(x[i].as_ref(), x[j].as_ref()))
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|d| *d > 0.0)
        .collect();
    if nn.is_empty() {
        return 1.0;
    }
    nn.sort_by(f64::total_cmp);
    let d2 = nn[nn.len() / 2];
    std::f64::consts::LN_2 / d2
}

fn nearest_pair<P: AsRef<[f64]>>(x: &[P]) -> (usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let d = sq_euclidean(x[i].as_ref(), x[j].as_ref());
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    (best.1, best.2)
}

impl LimitKriging {
    pub fn fit<P: AsRef<[f64]>>(x: &[P], y: &[f64], theta: f64) -> Result<Self> {
        let k = x.len();
        if k == 0 || y.len() != k {
            return Err(MedError::invalid("kriging needs one value per training point (k >= 1)"));
        }
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(MedError::invalid(format!("theta must be positive, got {theta}")));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(MedError::invalid("kriging training values must be finite"));
        }
        let mut base = DMatrix::identity(k, k);
        for i in 0..k {
            for j in (i + 1)..k {
                let d2 = sq_euclidean(x[i].as_ref(), x[j].as_ref());
                if d2 <= DUPLICATE_SQ_DIST {
                    return Err(MedError::Factorization { first: i, second: j });
                }
                let r = (-theta * d2).exp();
                base[(i, j)] = r;
                base[(j, i)] = r;
            }
        }
        let mut jitter = INITIAL_JITTER;
        let chol = loop {
            let mut r = base.clone();
            for i in 0..k {
                r[(i, i)] += jitter;
            }
            if let Some(c) = r.cholesky() {
                break c;
            }
            jitter *= 10.0;
            if jitter > MAX_JITTER * (1.0 + 1e-9) {
                let (first, second) = nearest_pair(x);
                return Err(MedError::Factorization { first, second });
            }
        };
        let r_inv_y = chol.solve(&DVector::from_column_slice(y));
        let r_inv_one = chol.solve(&DVector::from_element(k, 1.0));
        let denom = r_inv_one.sum();
        let gls_mean = if denom.abs() > MIN_DENOMINATOR {
            r_inv_y.sum() / denom
        } else {
            y.iter().sum::<f64>() / k as f64
        };
        Ok(LimitKriging {
            x: x.iter().map(|p| Point::new(p.as_ref().to_vec())).collect(),
            theta,
            jitter,
            r_inv_y: r_inv_y.as_slice().to_vec(),
            r_inv_one: r_inv_one.as_slice().to_vec(),
            gls_mean,
        })
    }

    /// Fits with [`default_theta`].
    pub fn fit_default<P: AsRef<[f64]>>(x: &[P], y: &[f64]) -> Result<Self> {
        Self::fit(x, y, default_theta(x))
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, xi) in self.x.iter().enumerate() {
            let r = (-self.theta * sq_euclidean(x, xi)).exp();
            num += r * self.r_inv_y[i];
            den += r * self.r_inv_one[i];
        }
        if den.abs() < MIN_DENOMINATOR {
            self.gls_mean
        } else {
            num / den
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn gls_mean(&self) -> f64 {
        self.gls_mean
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}
