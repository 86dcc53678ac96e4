use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the exponential proximity kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub sigma: f64,
}

impl KernelConfig {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kernel width must be finite and > 0, got {sigma}"
            )));
        }
        Ok(KernelConfig { sigma })
    }

    /// `0.75·√d` for a `d`-dimensional binary representation.
    pub fn for_dimension(d: usize) -> Self {
        KernelConfig {
            sigma: 0.75 * (d.max(1) as f64).sqrt(),
        }
    }
}

/// `exp(−D²/σ²)` with `D` the Euclidean distance between two binary vectors,
/// so `D²` is their Hamming distance.
pub fn kernel_weight(a: &[u8], b: &[u8], sigma: f64) -> f64 {
    assert_eq!(a.len(), b.len(), "binary vectors must have equal length");
    let d2 = a.iter().zip(b).filter(|(x, y)| x != y).count() as f64;
    (-d2 / (sigma * sigma)).exp()
}
