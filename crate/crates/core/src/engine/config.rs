use serde::{Deserialize, Serialize};

use crate::error::{MedError, Result};
use crate::qmc::largest_prime_below;

/// Largest prime strictly below `100 + 5p`.
pub fn default_n(p: usize) -> usize {
    largest_prime_below(100 + 5 * p).expect("100 + 5p > 2")
}

/// `ceil(4 sqrt(p))`.
pub fn default_k(p: usize) -> usize {
    (4.0 * (p as f64).sqrt()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "value")]
pub enum SMode {
    /// `s = 2 (1 - (f_min / f_max)^gamma)` from the previous design.
    Adaptive,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum ThetaRule {
    /// Correlation one half at `multiple` times the median nearest-neighbour
    /// spacing `d` of the training points: `theta = ln 2 / (multiple d)^2`.
    MedianSpacing { multiple: f64 },
    Fixed { value: f64 },
}

/// Default spacing multiple of the engine's local surrogates.
pub const DEFAULT_THETA_MULTIPLE: f64 = 3.0;

/// What the local surrogate interpolates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurrogateTarget {
    LogDensity,
    /// `f / max f` on the training set, logged after prediction.
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Design size.
    pub n: usize,
    /// Number of annealing stages `K`.
    pub stages: usize,
    pub seed: u64,
    /// Space-filling candidates per local region.
    pub m: usize,
    /// Linear-combination candidates per local region.
    pub n_combos: usize,
    /// Minimum max-norm distance between a candidate and evaluated points.
    pub delta: f64,
    pub theta: ThetaRule,
    pub surrogate_target: SurrogateTarget,
    /// Cap on local surrogate training points.
    pub max_training: usize,
    pub s_mode: SMode,
    pub whitening: bool,
    /// Lower/upper quantiles of the design's log densities used in place of
    /// min/max by the adaptive `s` rule.
    pub quantiles: Option<(f64, f64)>,
    /// Random shift for the initial lattice.
    pub lattice_shift: bool,
}

impl RunConfig {
    /// Defaults for a `p`-dimensional density.
    pub fn for_dimension(p: usize) -> Self {
        RunConfig {
            n: default_n(p),
            stages: default_k(p),
            seed: 0,
            m: 50 * p,
            n_combos: 5,
            delta: 1e-6,
            theta: ThetaRule::MedianSpacing {
                multiple: DEFAULT_THETA_MULTIPLE,
            },
            surrogate_target: SurrogateTarget::LogDensity,
            max_training: 200,
            s_mode: SMode::Adaptive,
            whitening: true,
            quantiles: None,
            lattice_shift: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_size(mut self, n: usize, stages: usize) -> Self {
        self.n = n;
        self.stages = stages;
        self
    }

    pub fn with_s(mut self, s_mode: SMode) -> Self {
        self.s_mode = s_mode;
        self
    }

    pub fn with_whitening(mut self, on: bool) -> Self {
        self.whitening = on;
        self
    }

    /// Total density evaluations of a run.
    pub fn budget(&self) -> usize {
        self.n * self.stages
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: String| Err(MedError::invalid(format!("{key}: {why}")));
        if self.n < 2 {
            return bad("n", format!("must be at least 2, got {}", self.n));
        }
        if self.stages < 2 {
            return bad("stages", format!("must be at least 2, got {}", self.stages));
        }
        if self.m + self.n_combos == 0 {
            return bad("m", "no candidates would be generated".into());
        }
        if !(self.delta > 0.0) {
            return bad("delta", format!("must be positive, got {}", self.delta));
        }
        let t = match self.theta {
            ThetaRule::Fixed { value } => value,
            ThetaRule::MedianSpacing { multiple } => multiple,
        };
        if !(t > 0.0) || !t.is_finite() {
            return bad("theta", format!("must be positive, got {t}"));
        }
        if self.max_training == 0 {
            return bad("max_training", "must be at least 1".into());
        }
        if let SMode::Fixed(s) = self.s_mode {
            if !(s >= 0.0) || !s.is_finite() {
                return bad("s", format!("must be finite and non-negative, got {s}"));
            }
        }
        if let Some((lo, hi)) = self.quantiles {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return bad("quantiles", format!("need 0 <= lo <= hi <= 1, got ({lo}, {hi})"));
            }
        }
        Ok(())
    }
}
