//! Process-fairness auditing for tabular classifiers.
//!
//! A model is explained locally with weighted-ridge surrogates fitted on
//! binary bin-match neighborhoods, the local explanations are aggregated over
//! a submodular pick of instances into a global feature ranking, and a model
//! that ranks sensitive features among its most important ones is replaced by
//! an average of feature-dropout retrainings.

pub mod classifiers;
pub mod cli;
pub mod data;
pub mod lime;
pub mod error;
pub mod fairness;
pub mod global;
pub mod rng;

pub use error::{Error, Result};
