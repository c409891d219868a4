//! Discrete Bayesian-network structure learning with penalized MDL scores,
//! the associated sample-complexity bounds, and seeded Monte Carlo checks.
//!
//! Entropies and log-likelihoods are in bits throughout.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod dag;
pub mod error;
pub mod experiments;
pub mod format;
pub mod learn;
pub mod network;
pub mod rng;
pub mod score;
pub mod table;
pub mod targets;

pub use error::{Error, Result};
pub use learn::{LearnMode, LearnResult, SubsampleOptions};
pub use network::{BayesNet, Dataset, Schema, Structure, Variable};
pub use score::{Penalty, Preference, ScoreReport};
pub use table::JointTable;
