//! Local surrogate explanations: perturb around an instance in a binary
//! interpretable space, weight by proximity, and fit a weighted ridge model.

mod explain;
mod kernel;
pub mod render;
mod sample;
mod surrogate;

pub use explain::{
    explain_instance, explain_instance_for_class, fit_surrogate, top_k, Contribution, Explanation,
};
pub use kernel::{kernel_weight, KernelConfig};
pub use sample::{sample_neighborhood, Neighborhood, SurrogateConfig};
pub use surrogate::{weighted_ridge, SurrogateFit};
