pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Largest prime strictly below `bound`, if any.
pub fn largest_prime_below(bound: usize) -> Option<usize> {
    (2..bound).rev().find(|&k| is_prime(k))
}

pub fn smallest_prime_at_least(n: usize) -> usize {
    (n.max(2)..).find(|&k| is_prime(k)).expect("primes are unbounded")
}

pub fn first_primes(count: usize) -> Vec<usize> {
    (2..).filter(|&k| is_prime(k)).take(count).collect()
}
