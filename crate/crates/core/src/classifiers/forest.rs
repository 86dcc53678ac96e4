//! Bootstrap-aggregated tree ensembles (random forest and bagging) with soft
//! voting: the probability vector is the mean of member leaf distributions.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::tree::{DecisionTree, TreeFit};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    trees: Vec<DecisionTree>,
    n_classes: usize,
}

impl Forest {
    /// Member `k` draws its bootstrap sample and feature subsets from
    /// `rng::derive(seed, k)` only, so members train independently.
    pub(crate) fn fit(fit: &TreeFit<'_>, tree_count: usize, bootstrap: bool, seed: u64) -> Forest {
        let n = fit.data.n_rows();
        let trees = (0..tree_count)
            .into_par_iter()
            .map(|k| {
                let mut r = rng::seeded(rng::derive(seed, k as u64));
                let samples: Vec<usize> = if bootstrap {
                    (0..n).map(|_| r.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit(fit, samples, &mut r)
            })
            .collect();
        Forest {
            trees,
            n_classes: fit.data.schema().n_classes(),
        }
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn predict_proba(&self, row: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_classes];
        for t in &self.trees {
            for (a, p) in acc.iter_mut().zip(t.predict_proba(row)) {
                *a += p;
            }
        }
        let m = self.trees.len() as f64;
        acc.iter_mut().for_each(|a| *a /= m);
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Dataset, Feature, Schema};

    fn constant_label_data() -> Dataset {
        let schema = Schema::new(
            vec![Feature::numeric("a"), Feature::categorical("g", ["x", "y"])],
            "t",
            vec!["p".into(), "q".into()],
        )
        .unwrap();
        let rows = (0..20).map(|i| vec![i as f64, (i % 2) as f64]).collect();
        Dataset::new(schema, rows, vec![1; 20]).unwrap()
    }

    #[test]
    fn constant_label_predicts_certainty() {
        let ds = constant_label_data();
        let fit = TreeFit {
            data: &ds,
            active: &[0, 1],
            categorical: &[false, true],
            weights: None,
            max_depth: None,
            min_samples_split: 2,
            max_features: 1,
        };
        let f = Forest::fit(&fit, 10, true, 4);
        for probe in [[-5.0, 0.0], [7.5, 1.0], [100.0, 0.0]] {
            assert_eq!(f.predict_proba(&probe), vec![0.0, 1.0]);
        }
    }

    #[test]
    fn three_pure_votes_average() {
        let leaf = |d: Vec<f64>| {
            serde_json::from_value::<DecisionTree>(serde_json::json!({
                "nodes": [{"node": "leaf", "distribution": d}]
            }))
            .unwrap()
        };
        let f = Forest {
            trees: vec![leaf(vec![1.0, 0.0]), leaf(vec![1.0, 0.0]), leaf(vec![0.0, 1.0])],
            n_classes: 2,
        };
        let p = f.predict_proba(&[0.0]);
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15 && (p[1] - 1.0 / 3.0).abs() < 1e-15);
    }
}
