//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{MedError, Result};

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky_lower(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    a.clone().cholesky().map(|c| c.l())
}

/// Inverse of a lower-triangular matrix.
pub fn invert_lower(l: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = l.nrows();
    let mut inv = DMatrix::<f64>::identity(n, n);
    if !l.solve_lower_triangular_mut(&mut inv) {
        return Err(MedError::SingularCovariance(
            "triangular factor has a zero pivot".into(),
        ));
    }
    Ok(inv)
}

/// `L^{-1} v` for lower-triangular `L`.
pub fn solve_lower(l: &DMatrix<f64>, v: &[f64]) -> DVector<f64> {
    let mut b = DVector::from_column_slice(v);
    l.solve_lower_triangular_mut(&mut b);
    b
}

/// Sample covariance with divisor `n - 1` (divisor 1 when `n == 1`).
pub fn sample_covariance<P: AsRef<[f64]>>(points: &[P]) -> DMatrix<f64> {
    let n = points.len();
    let p = points.first().map(|x| x.as_ref().len()).unwrap_or(0);
    let mut mean = vec![0.0; p];
    for x in points {
        for (m, v) in mean.iter_mut().zip(x.as_ref()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n.max(1) as f64;
    }
    let mut cov = DMatrix::<f64>::zeros(p, p);
    for x in points {
        let x = x.as_ref();
        for a in 0..p {
            let da = x[a] - mean[a];
            for b in 0..=a {
                cov[(a, b)] += da * (x[b] - mean[b]);
            }
        }
    }
    let denom = (n.max(2) - 1) as f64;
    for a in 0..p {
        for b in 0..=a {
            let v = cov[(a, b)] / denom;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    cov
}

/// Spectral condition number of a symmetric matrix; infinite when singular
/// or indefinite.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let eig = a.clone().symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Shrinks `a` towards its own diagonal until its condition number is at
/// most `max_cond`. Diagonal entries are first floored at `max_diag / max_cond`
/// so the fully shrunk matrix always satisfies the bound.
pub fn shrink_to_condition(a: &DMatrix<f64>, max_cond: f64) -> DMatrix<f64> {
    let p = a.nrows();
    let max_diag = (0..p).map(|i| a[(i, i)]).fold(0.0f64, f64::max);
    let floor = max_diag / max_cond;
    let mut base = a.clone();
    for i in 0..p {
        if base[(i, i)] < floor {
            base[(i, i)] = floor;
        }
    }
    let diag = DMatrix::from_diagonal(&base.diagonal());
    let mut alpha = 0.0;
    loop {
        let m = &base * (1.0 - alpha) + &diag * alpha;
        if alpha >= 1.0 || condition_number(&m) <= max_cond {
            return m;
        }
        alpha = (alpha + 0.05f64).min(1.0);
    }
}
