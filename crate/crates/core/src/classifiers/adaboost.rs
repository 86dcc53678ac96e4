//! Multi-class AdaBoost (SAMME) over depth-1 trees.

use serde::{Deserialize, Serialize};

use crate::classifiers::argmax;
use crate::classifiers::tree::{DecisionTree, TreeFit};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    stumps: Vec<(f64, DecisionTree)>,
    n_classes: usize,
}

/// SAMME stage weight: `lr · (ln((1 − err)/err) + ln(K − 1))`.
pub fn samme_alpha(err: f64, n_classes: usize, learning_rate: f64) -> f64 {
    learning_rate * (((1.0 - err) / err).ln() + ((n_classes - 1) as f64).ln())
}

impl AdaBoost {
    pub(crate) fn fit(base: &TreeFit<'_>, rounds: usize, learning_rate: f64, seed: u64) -> (AdaBoost, Vec<Vec<f64>>) {
        let n = base.data.n_rows();
        let k = base.data.schema().n_classes();
        let mut weights = vec![1.0 / n as f64; n];
        let mut history = Vec::new();
        let mut stumps = Vec::new();
        let mut r = rng::seeded(rng::derive(seed, 0));
        for _ in 0..rounds {
            let fit = TreeFit {
                weights: Some(&weights),
                max_depth: Some(1),
                ..*base
            };
            let stump = DecisionTree::fit(&fit, (0..n).collect(), &mut r);
            let miss: Vec<bool> = (0..n)
                .map(|i| argmax(stump.predict_proba(base.data.row(i))) != base.data.label(i))
                .collect();
            let total: f64 = weights.iter().sum();
            let err = miss.iter().zip(&weights).filter(|(m, _)| **m).map(|(_, w)| w).sum::<f64>() / total;
            if err <= 0.0 {
                stumps.push((1.0, stump));
                break;
            }
            if err >= 1.0 - 1.0 / k as f64 {
                if stumps.is_empty() {
                    stumps.push((1.0, stump));
                }
                break;
            }
            let alpha = samme_alpha(err, k, learning_rate);
            for (w, &m) in weights.iter_mut().zip(&miss) {
                if m {
                    *w *= alpha.exp();
                }
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            history.push(weights.clone());
            stumps.push((alpha, stump));
        }
        (AdaBoost { stumps, n_classes: k }, history)
    }

    pub fn stage_weights(&self) -> Vec<f64> {
        self.stumps.iter().map(|(a, _)| *a).collect()
    }

    /// Normalized weighted vote: `Σ_m α_m [h_m(x) = c] / Σ_m α_m`.
    pub fn predict_proba(&self, row: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        let mut total = 0.0;
        for (alpha, stump) in &self.stumps {
            votes[argmax(stump.predict_proba(row))] += alpha;
            total += alpha;
        }
        votes.iter_mut().for_each(|v| *v /= total);
        votes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Dataset, Feature, Schema};
    use crate::rng;
    use rand::Rng;

    #[test]
    fn alpha_for_error_point_two() {
        assert!((samme_alpha(0.2, 2, 1.0) - 4f64.ln()).abs() < 1e-15);
        assert!((samme_alpha(0.2, 2, 1.0) - 1.3863).abs() < 1e-4);
    }

    #[test]
    fn reweighted_distributions_stay_normalized() {
        let mut r = rng::seeded(3);
        let schema = Schema::new(
            vec![Feature::numeric("a"), Feature::numeric("b")],
            "y",
            vec!["0".into(), "1".into()],
        )
        .unwrap();
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)])
            .collect();
        let labels = rows
            .iter()
            .map(|x| usize::from(x[0] * x[1] + 0.2 * r.random_range(-1.0..1.0) > 0.0))
            .collect();
        let ds = Dataset::new(schema, rows, labels).unwrap();
        let fit = TreeFit {
            data: &ds,
            active: &[0, 1],
            categorical: &[false, false],
            weights: None,
            max_depth: Some(1),
            min_samples_split: 2,
            max_features: 2,
        };
        let (model, history) = AdaBoost::fit(&fit, 50, 1.0, 0);
        assert!(!history.is_empty());
        for w in &history {
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let p = model.predict_proba(ds.row(0));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
