use super::{DensityModel, Truth, UnitBox};
use crate::error::Result;

/// Constant density on `[0,1]^p`.
#[derive(Debug, Clone)]
pub struct Uniform {
    bounds: UnitBox,
}

impl Uniform {
    pub fn new(p: usize) -> Self {
        Uniform {
            bounds: UnitBox::unit(p),
        }
    }
}

impl DensityModel for Uniform {
    fn name(&self) -> &str {
        "uniform"
    }

    fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn unit_box(&self) -> &UnitBox {
        &self.bounds
    }

    fn log_density(&self, _x: &[f64]) -> Result<f64> {
        Ok(0.0)
    }

    fn truth(&self) -> Option<Truth> {
        Some(Truth::Uniform { dim: self.dim() })
    }
}
