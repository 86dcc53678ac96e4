use serde::{Deserialize, Serialize};

use crate::classifiers::{argmax, ProbabilisticClassifier};
use crate::data::{FeatureKind, FeatureStats};
use crate::error::Result;
use crate::lime::kernel::KernelConfig;
use crate::lime::sample::{sample_neighborhood, Neighborhood, SurrogateConfig};
use crate::lime::surrogate::{weighted_ridge, SurrogateFit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub feature: String,
    pub index: usize,
    pub weight: f64,
}

/// A local linear explanation of one prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub instance: Vec<f64>,
    /// Instance values as text: level names for categorical features.
    pub instance_text: Vec<String>,
    pub explained_class: usize,
    pub class_label: String,
    /// Black-box probability of the explained class at the instance.
    pub model_output: f64,
    /// The `k` largest coefficients by magnitude, ties toward the lower index.
    pub contributions: Vec<Contribution>,
    pub intercept: f64,
    pub local_r2: f64,
    /// Coefficient of every feature, in schema order.
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub sigma: f64,
    pub config: SurrogateConfig,
}

impl Explanation {
    /// Sum of intercept and all coefficients: the surrogate's value at the instance.
    pub fn surrogate_at_instance(&self) -> f64 {
        self.intercept + self.coefficients.iter().sum::<f64>()
    }
}

/// Fits the surrogate to a sampled neighborhood.
pub fn fit_surrogate(neigh: &Neighborhood, lambda: f64) -> Result<SurrogateFit> {
    let design: Vec<f64> = neigh.binary.iter().map(|&b| f64::from(b)).collect();
    weighted_ridge(&design, &neigh.outputs, &neigh.weights, neigh.n_features, lambda)
}

/// Indices of the `k` largest `|c|`, ties toward the lower index.
pub fn top_k(coefficients: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..coefficients.len()).collect();
    order.sort_by(|&a, &b| coefficients[b].abs().total_cmp(&coefficients[a].abs()).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Explains the model's predicted class at `x`.
pub fn explain_instance(
    model: &dyn ProbabilisticClassifier,
    x: &[f64],
    stats: &FeatureStats,
    cfg: &SurrogateConfig,
    kernel: &KernelConfig,
) -> Result<Explanation> {
    let class = argmax(&model.predict_proba(x)?);
    explain_instance_for_class(model, x, stats, cfg, kernel, class)
}

pub fn explain_instance_for_class(
    model: &dyn ProbabilisticClassifier,
    x: &[f64],
    stats: &FeatureStats,
    cfg: &SurrogateConfig,
    kernel: &KernelConfig,
    class: usize,
) -> Result<Explanation> {
    let neigh = sample_neighborhood(x, stats, model, class, cfg, kernel)?;
    let fit = fit_surrogate(&neigh, cfg.lambda)?;
    let schema = model.schema();
    let contributions = top_k(&fit.coefficients, cfg.k)
        .into_iter()
        .map(|j| Contribution {
            feature: schema.feature(j).name.clone(),
            index: j,
            weight: fit.coefficients[j],
        })
        .collect();
    let instance_text = schema
        .features()
        .iter()
        .zip(x)
        .map(|(f, &v)| match &f.kind {
            FeatureKind::Categorical { levels } => levels[v as usize].clone(),
            FeatureKind::Numeric => format!("{v}"),
        })
        .collect();
    Ok(Explanation {
        instance: x.to_vec(),
        instance_text,
        explained_class: class,
        class_label: schema.class_labels()[class].clone(),
        model_output: neigh.outputs[0],
        contributions,
        intercept: fit.intercept,
        local_r2: fit.local_r2,
        coefficients: fit.coefficients,
        std_errors: fit.std_errors,
        sigma: kernel.sigma,
        config: *cfg,
    })
}
