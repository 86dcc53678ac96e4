//! Global view of a model from many local explanations: an explanation
//! matrix over candidate instances, greedy submodular pick, and mean
//! aggregation over the picked rows.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::ProbabilisticClassifier;
use crate::data::{Dataset, FeatureStats};
use crate::error::{Error, Result};
use crate::lime::{explain_instance, KernelConfig, SurrogateConfig};
use crate::rng;

pub const DEFAULT_BUDGET: usize = 15;
pub const DEFAULT_MAX_CANDIDATES: usize = 200;
/// Multiple of the per-fit coefficient standard error below which a mean
/// absolute contribution is treated as sampling noise.
pub const NOISE_MULTIPLIER: f64 = 3.0;

/// Signed local contributions, one row per candidate instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationMatrix {
    pub features: Vec<String>,
    /// Row-major `m × d`; zero where a feature was outside that row's top k.
    pub weights: Vec<f64>,
    /// Row-major `m × d` standard errors of every coefficient, top k or not.
    pub std_errors: Vec<f64>,
    pub local_r2: Vec<f64>,
    /// Index of each row's instance in the candidate dataset.
    pub instances: Vec<usize>,
}

impl ExplanationMatrix {
    pub fn from_weights(features: Vec<String>, rows: &[Vec<f64>]) -> Self {
        let d = features.len();
        assert!(rows.iter().all(|r| r.len() == d));
        ExplanationMatrix {
            weights: rows.concat(),
            std_errors: vec![0.0; rows.len() * d],
            local_r2: vec![1.0; rows.len()],
            instances: (0..rows.len()).collect(),
            features,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.local_r2.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.weights[i * d..(i + 1) * d]
    }

    pub fn std_error_row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.std_errors[i * d..(i + 1) * d]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalContribution {
    pub feature: String,
    pub index: usize,
    pub mean_signed: f64,
    pub mean_abs: f64,
    pub noise_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalExplanation {
    /// Sorted by descending `mean_abs`, ties toward the lower feature index.
    pub ranked: Vec<GlobalContribution>,
    /// Candidate-row indices in pick order.
    pub picked: Vec<usize>,
    pub budget: usize,
}

impl GlobalExplanation {
    pub fn get(&self, feature: &str) -> Option<(usize, &GlobalContribution)> {
        self.ranked.iter().enumerate().find(|(_, c)| c.feature == feature).map(|(r, c)| (r + 1, c))
    }
}

/// Up to `max` distinct row indices in ascending order; all rows when `n <= max`.
pub fn select_candidates(n: usize, max: usize, seed: u64) -> Vec<usize> {
    if n <= max {
        return (0..n).collect();
    }
    let mut r = rng::seeded(seed);
    let mut picked = index::sample(&mut r, n, max).into_vec();
    picked.sort_unstable();
    picked
}

/// Explains every candidate row; row `i` uses seed `derive(cfg.seed, i)`.
pub fn build_explanation_matrix(
    model: &dyn ProbabilisticClassifier,
    candidates: &Dataset,
    stats: &FeatureStats,
    cfg: &SurrogateConfig,
    kernel: &KernelConfig,
) -> Result<ExplanationMatrix> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate instances to explain".into()));
    }
    let d = candidates.n_features();
    let explanations = (0..candidates.n_rows())
        .into_par_iter()
        .map(|i| {
            let row_cfg = SurrogateConfig { seed: rng::derive(cfg.seed, i as u64), ..*cfg };
            explain_instance(model, candidates.row(i), stats, &row_cfg, kernel)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut weights = vec![0.0; explanations.len() * d];
    let mut std_errors = Vec::with_capacity(explanations.len() * d);
    for (i, e) in explanations.iter().enumerate() {
        for c in &e.contributions {
            weights[i * d + c.index] = c.weight;
        }
        std_errors.extend_from_slice(&e.std_errors);
    }
    Ok(ExplanationMatrix {
        features: candidates.schema().feature_names().into_iter().map(String::from).collect(),
        weights,
        std_errors,
        local_r2: explanations.iter().map(|e| e.local_r2).collect(),
        instances: (0..candidates.n_rows()).collect(),
    })
}

/// `I_j = √(Σ_i |W_ij|)`.
pub fn feature_importance(w: &ExplanationMatrix) -> Vec<f64> {
    let d = w.n_features();
    let mut imp = vec![0.0; d];
    for i in 0..w.n_rows() {
        for (j, v) in w.row(i).iter().enumerate() {
            imp[j] += v.abs();
        }
    }
    imp.iter().map(|v| v.sqrt()).collect()
}

/// Importance mass of the features touched by at least one row of `set`.
pub fn coverage(w: &ExplanationMatrix, importance: &[f64], set: &[usize]) -> f64 {
    (0..w.n_features())
        .filter(|&j| set.iter().any(|&i| w.row(i)[j] != 0.0))
        .map(|j| importance[j])
        .sum()
}

/// Greedy maximization of coverage, up to `budget` rows; stops early once no
/// row adds coverage. Ties go to the lower row index.
pub fn submodular_pick(w: &ExplanationMatrix, budget: usize) -> Vec<usize> {
    let importance = feature_importance(w);
    let mut covered = vec![false; w.n_features()];
    let mut chosen = vec![false; w.n_rows()];
    let mut picked = Vec::new();
    while picked.len() < budget {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..w.n_rows()).filter(|&i| !chosen[i]) {
            let gain: f64 = w
                .row(i)
                .iter()
                .enumerate()
                .filter(|&(j, v)| *v != 0.0 && !covered[j])
                .map(|(j, _)| importance[j])
                .sum();
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        match best {
            Some((i, gain)) if gain > 0.0 => {
                chosen[i] = true;
                picked.push(i);
                for (j, v) in w.row(i).iter().enumerate() {
                    if *v != 0.0 {
                        covered[j] = true;
                    }
                }
            }
            _ => break,
        }
    }
    picked
}

/// Mean signed and mean absolute contribution of each feature over `picked`.
pub fn aggregate_global(w: &ExplanationMatrix, picked: &[usize], budget: usize) -> Result<GlobalExplanation> {
    if picked.is_empty() {
        return Err(Error::InvalidArgument("cannot aggregate an empty pick".into()));
    }
    let m = picked.len() as f64;
    let mut ranked: Vec<GlobalContribution> = w
        .features
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let (mut s, mut a, mut se) = (0.0, 0.0, 0.0);
            for &i in picked {
                let v = w.row(i)[j];
                s += v;
                a += v.abs();
                se += w.std_error_row(i)[j];
            }
            GlobalContribution {
                feature: name.clone(),
                index: j,
                mean_signed: s / m,
                mean_abs: a / m,
                noise_threshold: NOISE_MULTIPLIER * se / m,
            }
        })
        .collect();
    ranked.sort_by(|a, b| b.mean_abs.total_cmp(&a.mean_abs).then(a.index.cmp(&b.index)));
    Ok(GlobalExplanation {
        ranked,
        picked: picked.to_vec(),
        budget,
    })
}

/// Pick then aggregate. When no row covers anything (every contribution is
/// exactly zero) the first row stands in for the pick.
pub fn explain_globally(w: &ExplanationMatrix, budget: usize) -> Result<GlobalExplanation> {
    if budget == 0 {
        return Err(Error::InvalidArgument("pick budget must be >= 1".into()));
    }
    let mut picked = submodular_pick(w, budget);
    if picked.is_empty() {
        picked.push(0);
    }
    aggregate_global(w, &picked, budget)
}
