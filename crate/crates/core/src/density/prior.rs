use super::{DensityModel, UnitBox};
use crate::error::{MedError, Result};

/// Uniform on `[a, b]` with exponential tails: `log p(x)` is `lambda_a (x - a)`
/// below `a`, zero inside, and `-lambda_b (x - b)` above `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewisePrior {
    pub a: f64,
    pub b: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
}

pub fn make_piecewise_prior(a: f64, b: f64, lambda_a: f64, lambda_b: f64) -> Result<PiecewisePrior> {
    if !(a < b) {
        return Err(MedError::invalid(format!("prior requires a < b, got a = {a}, b = {b}")));
    }
    if !(lambda_a > 0.0 && lambda_b > 0.0) {
        return Err(MedError::invalid("prior rates must be positive"));
    }
    Ok(PiecewisePrior {
        a,
        b,
        lambda_a,
        lambda_b,
    })
}

impl PiecewisePrior {
    pub fn log_density(&self, x: f64) -> f64 {
        if x < self.a {
            self.lambda_a * (x - self.a)
        } else if x > self.b {
            -self.lambda_b * (x - self.b)
        } else {
            0.0
        }
    }
}

/// Product of independent piecewise priors, one per coordinate, evaluated in
/// original coordinates.
#[derive(Debug, Clone)]
pub struct ProductPrior {
    factors: Vec<PiecewisePrior>,
    bounds: UnitBox,
}

impl ProductPrior {
    pub fn new(factors: Vec<PiecewisePrior>, bounds: UnitBox) -> Result<Self> {
        if factors.len() != bounds.dim() {
            return Err(MedError::invalid(format!(
                "{} prior factors for a {}-dimensional box",
                factors.len(),
                bounds.dim()
            )));
        }
        Ok(ProductPrior { factors, bounds })
    }

    pub fn factors(&self) -> &[PiecewisePrior] {
        &self.factors
    }
}

impl DensityModel for ProductPrior {
    fn name(&self) -> &str {
        "prior"
    }

    fn dim(&self) -> usize {
        self.factors.len()
    }

    fn unit_box(&self) -> &UnitBox {
        &self.bounds
    }

    fn log_density(&self, x: &[f64]) -> Result<f64> {
        let o = self.bounds.to_original(x);
        Ok(self
            .factors
            .iter()
            .zip(&o)
            .map(|(f, v)| f.log_density(*v))
            .sum())
    }
}
