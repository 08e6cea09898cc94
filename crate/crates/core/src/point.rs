use serde::{Deserialize, Serialize};
use std::ops::{Deref, DerefMut};

/// A point in the unit hypercube `[0,1]^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    /// Builds a point, clipping every coordinate into `[0,1]`.
    pub fn clipped(mut coords: Vec<f64>) -> Self {
        for c in &mut coords {
            *c = c.clamp(0.0, 1.0);
        }
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn in_unit_cube(&self) -> bool {
        self.0.iter().all(|c| (0.0..=1.0).contains(c))
    }

    /// Max-norm distance.
    pub fn max_norm_dist(&self, other: &[f64]) -> f64 {
        max_norm_dist(&self.0, other)
    }
}

pub(crate) fn max_norm_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// True when `a` and `b` are within `tol` in every coordinate. Exits at the
/// first coordinate that differs by more than `tol`.
pub(crate) fn within_max_norm(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
}

pub(crate) fn sq_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
