use crate::error::{MedError, Result};
use crate::point::Point;

/// First `n` points of the Sobol sequence in one or two dimensions
/// (Gray-code order, starting at the origin).
pub fn sobol(n: usize, p: usize) -> Result<Vec<Point>> {
    if p == 0 || p > 2 {
        return Err(MedError::invalid(format!(
            "Sobol points are available for p <= 2 only, got p = {p}"
        )));
    }
    let mut v1 = [0u32; 32];
    let mut v2 = [0u32; 32];
    for k in 0..32 {
        v1[k] = 1u32 << (31 - k);
        // primitive polynomial x + 1 with m_1 = 1
        v2[k] = if k == 0 { 1u32 << 31 } else { v2[k - 1] ^ (v2[k - 1] >> 1) };
    }
    let scale = 1.0 / 4_294_967_296.0;
    let (mut a, mut b) = (0u32, 0u32);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            let c = (i - 1).trailing_ones() as usize;
            a ^= v1[c];
            b ^= v2[c];
        }
        let mut x = vec![a as f64 * scale];
        if p == 2 {
            x.push(b as f64 * scale);
        }
        out.push(Point::new(x));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_points() {
        let s = sobol(4, 2).unwrap();
        let got: Vec<&[f64]> = s.iter().map(|x| x.coords()).collect();
        assert_eq!(got, vec![&[0.0, 0.0][..], &[0.5, 0.5], &[0.75, 0.25], &[0.25, 0.75]]);
        assert!(sobol(4, 3).is_err());
    }

    #[test]
    fn stratifies_dyadic_boxes() {
        let s = sobol(16, 2).unwrap();
        // each 1/4 x 1/4 cell holds exactly one point
        let mut cells = [0; 16];
        for x in &s {
            cells[(x[0] * 4.0) as usize * 4 + (x[1] * 4.0) as usize] += 1;
        }
        assert!(cells.iter().all(|&c| c == 1));
    }
}
