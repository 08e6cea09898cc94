use nalgebra::DMatrix;
use statrs::function::erf::{erfc, erfc_inv};

use super::UnitBox;
use crate::linalg::solve_lower;

/// Known target distribution, used for truth-based diagnostics.
#[derive(Debug, Clone)]
pub enum Truth {
    Uniform { dim: usize },
    /// Normal in unit coordinates with covariance `chol * chol'`.
    Normal { mean: Vec<f64>, chol: DMatrix<f64> },
    /// The banana density, defined in original coordinates of `bounds`.
    Banana { bounds: UnitBox },
}

pub(crate) fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Inverse standard normal CDF; `u` is clamped to `[1e-12, 1 - 1e-12]`.
pub(crate) fn std_normal_quantile(u: f64) -> f64 {
    let u = u.clamp(1e-12, 1.0 - 1e-12);
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u)
}

impl Truth {
    pub fn dim(&self) -> usize {
        match self {
            Truth::Uniform { dim } => *dim,
            Truth::Normal { mean, .. } => mean.len(),
            Truth::Banana { .. } => 2,
        }
    }

    /// Rosenblatt transform of a unit-scale point to `[0,1]^p`: the output is
    /// uniformly distributed when the input follows the truth.
    pub fn to_uniform(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Truth::Uniform { .. } => x.to_vec(),
            Truth::Normal { mean, chol } => {
                let centered: Vec<f64> = x.iter().zip(mean).map(|(v, m)| v - m).collect();
                solve_lower(chol, &centered)
                    .iter()
                    .map(|z| std_normal_cdf(*z))
                    .collect()
            }
            Truth::Banana { bounds } => {
                let o = bounds.to_original(x);
                let z1 = o[0] / 10.0;
                let z2 = o[1] + 0.03 * o[0] * o[0] - 3.0;
                vec![std_normal_cdf(z1), std_normal_cdf(z2)]
            }
        }
    }

    /// Inverse of [`Truth::to_uniform`]: maps uniform points to draws from the
    /// truth (in unit scale, possibly outside the unit cube).
    pub fn from_uniform(&self, u: &[f64]) -> Vec<f64> {
        match self {
            Truth::Uniform { .. } => u.to_vec(),
            Truth::Normal { mean, chol } => {
                let z = nalgebra::DVector::from_iterator(u.len(), u.iter().map(|v| std_normal_quantile(*v)));
                (chol * z).iter().zip(mean).map(|(a, m)| a + m).collect()
            }
            Truth::Banana { bounds } => {
                let x1 = 10.0 * std_normal_quantile(u[0]);
                let x2 = std_normal_quantile(u[1]) - 0.03 * x1 * x1 + 3.0;
                bounds.to_unit(&[x1, x2])
            }
        }
    }

    /// Per-coordinate (mean, sd) in unit scale.
    pub fn marginal_moments(&self) -> Vec<(f64, f64)> {
        match self {
            Truth::Uniform { dim } => vec![(0.5, (1.0f64 / 12.0).sqrt()); *dim],
            Truth::Normal { mean, chol } => {
                let cov = chol * chol.transpose();
                mean.iter()
                    .enumerate()
                    .map(|(i, m)| (*m, cov[(i, i)].sqrt()))
                    .collect()
            }
            Truth::Banana { bounds } => {
                // x1 ~ N(0, 100); x2 = 3 - 0.03 x1^2 + z, so E x2 = 0 and
                // var x2 = 0.03^2 * 2 * 100^2 + 1 = 19.
                let orig = [(0.0, 10.0), (0.0, 19.0f64.sqrt())];
                orig.iter()
                    .enumerate()
                    .map(|(i, (m, s))| {
                        let w = bounds.hi[i] - bounds.lo[i];
                        ((m - bounds.lo[i]) / w, s / w)
                    })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{make_ar1_normal, make_banana, DensityModel};

    #[test]
    fn normal_cdf_reference_values() {
        assert!((std_normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((std_normal_cdf(1.959963984540054) - 0.975).abs() < 1e-9, "{}", std_normal_cdf(1.959963984540054));
    }

    #[test]
    fn uniform_round_trip() {
        let u = [0.13, 0.71];
        for t in [make_banana().truth().unwrap(), make_ar1_normal(2, 0.6, 0.1).unwrap().truth().unwrap()] {
            let back = t.to_uniform(&t.from_uniform(&u));
            assert!((back[0] - u[0]).abs() < 1e-10 && (back[1] - u[1]).abs() < 1e-10, "{back:?}");
        }
        assert!((std_normal_quantile(0.975) - 1.959963984540054).abs() < 1e-9);
    }

    #[test]
    fn banana_mode_maps_to_center() {
        let t = make_banana().truth().unwrap();
        let u = t.to_uniform(&[0.5, 0.8]);
        assert!((u[0] - 0.5).abs() < 1e-12 && (u[1] - 0.5).abs() < 1e-12);
        let m = t.marginal_moments();
        assert!((m[0].0 - 0.5).abs() < 1e-12);
        assert!((m[0].1 - 0.125).abs() < 1e-12);
    }

    #[test]
    fn normal_transform_decorrelates() {
        let t = make_ar1_normal(2, 0.9, 0.125).unwrap().truth().unwrap();
        let u = t.to_uniform(&[0.5, 0.5]);
        assert_eq!(u, vec![0.5, 0.5]);
        let m = t.marginal_moments();
        assert!((m[1].1 - 0.125).abs() < 1e-12);
    }
}
