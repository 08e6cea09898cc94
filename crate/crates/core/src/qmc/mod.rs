//! Point-set generators: rank-1 lattices for the initial design, the
//! Hammersley and Sobol baselines, and local candidate pools.

mod candidates;
mod hammersley;
mod lattice;
mod primes;
mod sobol;

pub use candidates::{
    local_candidates, CandidatePool, LocalFillSpec, Provenance, RegionBox, ScrambledHalton,
};
pub use hammersley::{hammersley, radical_inverse};
pub use lattice::{cbc_lattice, lattice_error_sq, product_weight, LatticeRule};
pub use primes::{first_primes, is_prime, largest_prime_below, smallest_prime_at_least};
pub use sobol::sobol;
