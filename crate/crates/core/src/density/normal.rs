use nalgebra::DMatrix;

use super::{DensityModel, Truth, UnitBox};
use crate::error::{MedError, Result};
use crate::linalg::{cholesky_lower, solve_lower};

/// `N(0.5 * 1, sigma^2 R)` with `R_ij = rho^|i-j|`, on the unit cube.
#[derive(Debug, Clone)]
pub struct Ar1Normal {
    rho: f64,
    sigma: f64,
    bounds: UnitBox,
    cov: DMatrix<f64>,
    chol: DMatrix<f64>,
}

pub fn make_ar1_normal(p: usize, rho: f64, sigma: f64) -> Result<Ar1Normal> {
    if p == 0 {
        return Err(MedError::invalid("dimension must be at least 1"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(MedError::invalid(format!("sigma must be positive, got {sigma}")));
    }
    if rho == 1.0 && p > 1 {
        return Err(MedError::SingularCovariance(
            "rho = 1 gives a rank-one AR(1) covariance".into(),
        ));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(MedError::invalid(format!("rho must lie in [0, 1), got {rho}")));
    }
    let cov = DMatrix::from_fn(p, p, |i, j| {
        sigma * sigma * rho.powi((i as i32 - j as i32).abs())
    });
    let chol = cholesky_lower(&cov)
        .ok_or_else(|| MedError::SingularCovariance(format!("AR(1) covariance with rho = {rho}")))?;
    Ok(Ar1Normal {
        rho,
        sigma,
        bounds: UnitBox::unit(p),
        cov,
        chol,
    })
}

impl Ar1Normal {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn cholesky(&self) -> &DMatrix<f64> {
        &self.chol
    }
}

impl DensityModel for Ar1Normal {
    fn name(&self) -> &str {
        "ar1"
    }

    fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn unit_box(&self) -> &UnitBox {
        &self.bounds
    }

    fn log_density(&self, x: &[f64]) -> Result<f64> {
        let centered: Vec<f64> = x.iter().map(|v| v - 0.5).collect();
        let z = solve_lower(&self.chol, &centered);
        Ok(-0.5 * z.norm_squared())
    }

    fn truth(&self) -> Option<Truth> {
        Some(Truth::Normal {
            mean: vec![0.5; self.dim()],
            chol: self.chol.clone(),
        })
    }
}
