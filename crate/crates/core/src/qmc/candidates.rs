//! Local candidate pools.
//!
//! A pool holds space-filling points inside the bounding box of a local
//! region (a digit-scrambled Halton stream, skipping anything within `delta`
//! of an already evaluated point) plus a few random affine combinations
//! `w a + (1 - w) b`, `w ~ U[-0.5, 1.5]`, of adjacent design points.

use rand::Rng;

use super::primes::first_primes;
use crate::point::{within_max_norm, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Lattice,
    LocalFill,
    LinearCombination,
}

#[derive(Debug, Clone, Default)]
pub struct CandidatePool {
    pub points: Vec<Point>,
    pub provenance: Vec<Provenance>,
}

impl CandidatePool {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LocalFillSpec {
    /// Space-filling points per region.
    pub m: usize,
    /// Linear combinations of adjacent points per region.
    pub n_combos: usize,
    /// Minimum max-norm distance to evaluated points.
    pub delta: f64,
}

/// Axis-aligned box inside `[0,1]^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl RegionBox {
    /// Bounding box of `points`; zero-width sides are widened by `delta`.
    pub fn around<P: AsRef<[f64]>>(points: &[P], delta: f64) -> RegionBox {
        let p = points[0].as_ref().len();
        let mut lo = vec![f64::INFINITY; p];
        let mut hi = vec![f64::NEG_INFINITY; p];
        for x in points {
            for (d, v) in x.as_ref().iter().enumerate() {
                lo[d] = lo[d].min(*v);
                hi[d] = hi[d].max(*v);
            }
        }
        for d in 0..p {
            if hi[d] - lo[d] < delta {
                lo[d] = (lo[d] - delta).max(0.0);
                hi[d] = (hi[d] + delta).min(1.0);
            }
        }
        RegionBox { lo, hi }
    }

    /// Scales the box about its center by `factor`, clipped to the unit cube.
    pub fn inflated(&self, factor: f64) -> RegionBox {
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| {
                let c = 0.5 * (l + h);
                let r = 0.5 * (h - l) * factor;
                ((c - r).max(0.0), (c + r).min(1.0))
            })
            .unzip();
        RegionBox { lo, hi }
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    /// Maps a point of the unit cube into the box.
    pub fn map(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(u, (l, h))| l + u * (h - l))
            .collect()
    }
}

/// Halton sequence with an independent random permutation of the digits at
/// every position in every base.
#[derive(Debug, Clone)]
pub struct ScrambledHalton {
    bases: Vec<u64>,
    perms: Vec<Vec<Vec<u32>>>,
}

impl ScrambledHalton {
    /// Digit positions beyond `2^depth_bits` points are still scrambled, but
    /// only this many are generated.
    const DEPTH_BITS: f64 = 24.0;

    pub fn new<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Self {
        let bases: Vec<u64> = first_primes(p).into_iter().map(|b| b as u64).collect();
        let perms = bases
            .iter()
            .map(|&b| {
                let depth = (Self::DEPTH_BITS * std::f64::consts::LN_2 / (b as f64).ln()).ceil() as usize;
                (0..depth)
                    .map(|_| {
                        let mut perm: Vec<u32> = (0..b as u32).collect();
                        for i in (1..perm.len()).rev() {
                            let j = rng.random_range(0..=i);
                            perm.swap(i, j);
                        }
                        perm
                    })
                    .collect()
            })
            .collect();
        ScrambledHalton { bases, perms }
    }

    pub fn point(&self, index: u64) -> Vec<f64> {
        self.bases
            .iter()
            .zip(&self.perms)
            .map(|(&b, perms)| {
                let mut i = index;
                let inv_b = 1.0 / b as f64;
                let mut f = inv_b;
                let mut r = 0.0;
                for perm in perms {
                    let digit = (i % b) as usize;
                    r += perm[digit] as f64 * f;
                    i /= b;
                    f *= inv_b;
                }
                r.min(1.0 - f64::EPSILON)
            })
            .collect()
    }
}

fn near_any<P: AsRef<[f64]>>(x: &[f64], others: &[P], tol: f64) -> bool {
    others.iter().any(|o| within_max_norm(x, o.as_ref(), tol))
}

/// Builds a candidate pool inside `region`.
///
/// `adjacent` lists the point pairs used for linear combinations (cycled
/// through in order); `existing` are the evaluated points the pool must stay
/// `delta` away from. Deterministic given the state of `rng`.
pub fn local_candidates<P: AsRef<[f64]>, R: Rng + ?Sized>(
    region: &RegionBox,
    adjacent: &[(&[f64], &[f64])],
    existing: &[P],
    spec: &LocalFillSpec,
    rng: &mut R,
) -> CandidatePool {
    let p = region.lo.len();
    let mut pool = CandidatePool::default();

    // only evaluated points near the box can violate the separation rule
    let nearby: Vec<&[f64]> = existing
        .iter()
        .map(|x| x.as_ref())
        .filter(|x| {
            x.iter()
                .zip(region.lo.iter().zip(&region.hi))
                .all(|(v, (l, h))| *v > l - spec.delta && *v < h + spec.delta)
        })
        .collect();

    if spec.m > 0 {
        let halton = ScrambledHalton::new(p, rng);
        let max_tries = 4 * spec.m as u64 + 16;
        let mut i = 0u64;
        while pool.len() < spec.m && i < max_tries {
            let x = region.map(&halton.point(i));
            i += 1;
            if near_any(&x, &nearby, spec.delta) {
                continue;
            }
            pool.points.push(Point::clipped(x));
            pool.provenance.push(Provenance::LocalFill);
        }
    }

    if !adjacent.is_empty() {
        for c in 0..spec.n_combos {
            let (a, b) = adjacent[c % adjacent.len()];
            let w: f64 = rng.random_range(-0.5..=1.5);
            let x = combine(a, b, w);
            if near_any(&x, existing, spec.delta) || near_any(&x, &pool.points, 1e-12) {
                continue;
            }
            pool.points.push(x);
            pool.provenance.push(Provenance::LinearCombination);
        }
    }
    pool
}

/// `w a + (1 - w) b`, clipped to the unit cube.
pub(crate) fn combine(a: &[f64], b: &[f64], w: f64) -> Point {
    Point::clipped(a.iter().zip(b).map(|(a, b)| w * a + (1.0 - w) * b).collect())
}
