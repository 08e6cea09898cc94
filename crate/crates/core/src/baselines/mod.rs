//! Reference samplers: robust adaptive Metropolis and the surrogate-based
//! follow-up chains started at design points.

mod followup;
mod metropolis;

pub use followup::{chain_lengths, followup_mcmc, softmax_weights, FollowupConfig, FollowupSamples};
pub use metropolis::{adaptive_metropolis, metropolis_chain, Chain, ChainSpec, DEFAULT_TARGET_ACCEPTANCE};
