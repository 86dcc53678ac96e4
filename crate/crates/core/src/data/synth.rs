//! Synthetic data with a planted dependence on a sensitive attribute.
//!
//! Per row, drawn in this order from one seeded stream:
//!
//! ```text
//! s        ~ Bernoulli(1/2)                        (levels "no"/"yes")
//! s_k      ~ Bernoulli(1/2)                        (one per extra sensitive feature)
//! u        = r·(2s − 1) + sqrt(1 − r²)·ε,  ε ~ N(0, 1)
//! noise_j  ~ N(0, 1)
//! label    ~ Bernoulli(sigmoid(bias·s + Σ extra_k·s_k + 2u))
//! ```
//!
//! so `corr(u, s) = r` (the redundancy) and the label depends on `s` only
//! through `bias` and through `u`. With `bias = 0` and `r = 0` the label is
//! independent of `s`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::dataset::Dataset;
use crate::data::schema::{Feature, Schema};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedBiasConfig {
    pub n_rows: usize,
    pub n_noise_features: usize,
    pub bias_strength: f64,
    pub redundancy: f64,
    /// Bias strengths of additional sensitive features `s_1`, `s_2`, ...
    pub extra_sensitive: Vec<f64>,
    pub seed: u64,
}

impl Default for PlantedBiasConfig {
    fn default() -> Self {
        PlantedBiasConfig {
            n_rows: 1000,
            n_noise_features: 3,
            bias_strength: 2.0,
            redundancy: 0.5,
            extra_sensitive: Vec::new(),
            seed: 0,
        }
    }
}

impl PlantedBiasConfig {
    pub fn sensitive_names(&self) -> Vec<String> {
        std::iter::once("s".to_string())
            .chain((1..=self.extra_sensitive.len()).map(|k| format!("s_{k}")))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.n_rows < 100 {
            return Err(Error::InvalidArgument(format!(
                "n_rows must be >= 100, got {}",
                self.n_rows
            )));
        }
        if !(self.bias_strength >= 0.0 && self.bias_strength.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bias_strength must be finite and >= 0, got {}",
                self.bias_strength
            )));
        }
        if let Some(b) = self.extra_sensitive.iter().find(|b| !(**b >= 0.0 && b.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "extra sensitive bias must be finite and >= 0, got {b}"
            )));
        }
        if !(0.0..=1.0).contains(&self.redundancy) {
            return Err(Error::InvalidArgument(format!(
                "redundancy must be in [0, 1], got {}",
                self.redundancy
            )));
        }
        Ok(())
    }
}

pub fn generate_planted_bias(cfg: &PlantedBiasConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut features: Vec<Feature> = cfg
        .sensitive_names()
        .into_iter()
        .map(|n| Feature::categorical(n, ["no", "yes"]))
        .collect();
    features.push(Feature::numeric("u"));
    features.extend((0..cfg.n_noise_features).map(|j| Feature::numeric(format!("noise_{j}"))));
    let schema = Schema::new(features, "label", vec!["0".into(), "1".into()])?;

    let d = schema.n_features();
    let r = cfg.redundancy;
    let resid = (1.0 - r * r).max(0.0).sqrt();
    let mut rng = rng::seeded(cfg.seed);
    let mut values = Vec::with_capacity(cfg.n_rows * d);
    let mut labels = Vec::with_capacity(cfg.n_rows);
    for _ in 0..cfg.n_rows {
        let s = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
        values.push(s);
        let mut logit = cfg.bias_strength * s;
        for &b in &cfg.extra_sensitive {
            let sk = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
            values.push(sk);
            logit += b * sk;
        }
        let eps: f64 = rng.sample(StandardNormal);
        let u = r * (2.0 * s - 1.0) + resid * eps;
        values.push(u);
        logit += 2.0 * u;
        for _ in 0..cfg.n_noise_features {
            values.push(rng.sample(StandardNormal));
        }
        let p = 1.0 / (1.0 + (-logit).exp());
        labels.push(usize::from(rng.random_bool(p)));
    }
    Dataset::from_flat(schema, values, labels)
}
