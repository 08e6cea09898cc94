use super::{DensityModel, Truth, UnitBox};
use crate::error::Result;

/// The banana-shaped density
/// `log f(x) = -x1^2/200 - (x2 + 0.03 x1^2 - 3)^2 / 2`
/// on the box `[-40,40] x [-25,10]`.
#[derive(Debug, Clone)]
pub struct Banana {
    bounds: UnitBox,
}

pub fn make_banana() -> Banana {
    Banana {
        bounds: UnitBox {
            lo: vec![-40.0, -25.0],
            hi: vec![40.0, 10.0],
        },
    }
}

impl Banana {
    pub fn log_density_original(x1: f64, x2: f64) -> f64 {
        let t = x2 + 0.03 * x1 * x1 - 3.0;
        -0.5 * x1 * x1 / 100.0 - 0.5 * t * t
    }
}

impl DensityModel for Banana {
    fn name(&self) -> &str {
        "banana"
    }

    fn dim(&self) -> usize {
        2
    }

    fn unit_box(&self) -> &UnitBox {
        &self.bounds
    }

    fn log_density(&self, x: &[f64]) -> Result<f64> {
        let o = self.bounds.to_original(x);
        Ok(Self::log_density_original(o[0], o[1]))
    }

    fn truth(&self) -> Option<Truth> {
        Some(Truth::Banana {
            bounds: self.bounds.clone(),
        })
    }
}
