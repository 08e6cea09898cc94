//! Minimum energy designs (MED) for deterministic sampling of expensive,
//! unnormalized densities.
//!
//! The engine anneals from the uniform distribution on `[0,1]^p` towards the
//! target in `K` stages. Each stage spends exactly `n` density evaluations:
//! one new point is proposed next to each current design point using a local
//! limit-kriging surrogate, and the next design is then picked greedily from
//! every point evaluated so far. A full run therefore costs `K * n`
//! evaluations, all of which are recorded in an [`EvaluationLedger`].
//!
//! ```no_run
//! use med_core::density::{make_banana, EvaluationLedger};
//! use med_core::engine::{MedEngine, RunConfig};
//!
//! let model = make_banana();
//! let config = RunConfig::for_dimension(2).with_seed(42);
//! let mut ledger = EvaluationLedger::new();
//! let out = MedEngine::new(config).run(&model, &mut ledger).unwrap();
//! assert_eq!(ledger.count(), 6 * 109);
//! println!("{} design points", out.design.len());
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod density;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod qmc;
pub mod rng;
pub mod sampler;
pub mod surrogate;

mod point;

pub use density::{DensityModel, EvaluationLedger};
pub use engine::{Design, MedEngine, RunConfig, RunReport};
pub use error::{MedError, Result};
pub use point::Point;
