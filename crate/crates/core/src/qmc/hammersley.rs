use super::primes::first_primes;
use crate::point::Point;

/// Van der Corput radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv_b = 1.0 / b as f64;
    let mut f = inv_b;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv_b;
    }
    r
}

/// Hammersley set: point `i` is `(i/n, phi_2(i), phi_3(i), ...)`.
pub fn hammersley(n: usize, p: usize) -> Vec<Point> {
    let bases = first_primes(p.saturating_sub(1));
    (0..n)
        .map(|i| {
            let mut x = Vec::with_capacity(p);
            x.push(i as f64 / n as f64);
            x.extend(bases.iter().map(|&b| radical_inverse(i as u64, b as u64)));
            x.truncate(p);
            Point::new(x)
        })
        .collect()
}
