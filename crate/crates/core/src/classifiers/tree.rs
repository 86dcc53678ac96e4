//! CART with Gini impurity.
//!
//! Numeric splits sit at midpoints between consecutive distinct values
//! (`x <= t` goes left); categorical splits are one-vs-rest on a code
//! (`x == code` goes left). Only features in the active list are ever
//! inspected, both at fit and at prediction time.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitTest {
    LessEq(f64),
    Equals(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        distribution: Vec<f64>,
    },
    Split {
        feature: usize,
        test: SplitTest,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

/// Fitting inputs shared by every tree-based learner.
pub(crate) struct TreeFit<'a> {
    pub data: &'a Dataset,
    pub active: &'a [usize],
    pub categorical: &'a [bool],
    /// Per source-row weight; `None` means unit weights.
    pub weights: Option<&'a [f64]>,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Number of non-constant features to examine per node.
    pub max_features: usize,
}

struct Candidate {
    feature: usize,
    test: SplitTest,
    score: f64,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn predict_proba(&self, row: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { distribution } => return distribution,
                Node::Split {
                    feature,
                    test,
                    left,
                    right,
                } => {
                    let v = row[*feature];
                    let go_left = match *test {
                        SplitTest::LessEq(t) => v <= t,
                        SplitTest::Equals(code) => v as u32 == code,
                    };
                    i = if go_left { *left } else { *right };
                }
            }
        }
    }

    /// Fits on `samples` (source row indices; repeats act as bootstrap copies).
    pub(crate) fn fit(fit: &TreeFit<'_>, samples: Vec<usize>, rng: &mut Rng) -> DecisionTree {
        let k = fit.data.schema().n_classes();
        let mut nodes: Vec<Node> = Vec::new();
        // (node slot, samples, depth)
        let mut stack = vec![(0usize, samples, 0usize)];
        nodes.push(Node::Leaf {
            distribution: Vec::new(),
        });
        let mut order: Vec<usize> = fit.active.to_vec();
        while let Some((slot, samples, depth)) = stack.pop() {
            let dist = class_weights(fit, &samples, k);
            let total: f64 = dist.iter().sum();
            let pure = dist.iter().filter(|&&w| w > 0.0).count() <= 1;
            let depth_ok = fit.max_depth.is_none_or(|m| depth < m);
            let split = if !pure && depth_ok && samples.len() >= fit.min_samples_split {
                order.shuffle(rng);
                best_split(fit, &samples, &order, k)
            } else {
                None
            };
            match split {
                None => {
                    let distribution = if total > 0.0 {
                        dist.iter().map(|w| w / total).collect()
                    } else {
                        vec![1.0 / k as f64; k]
                    };
                    nodes[slot] = Node::Leaf { distribution };
                }
                Some(c) => {
                    let (l, r): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&i| {
                        let v = fit.data.value(i, c.feature);
                        match c.test {
                            SplitTest::LessEq(t) => v <= t,
                            SplitTest::Equals(code) => v as u32 == code,
                        }
                    });
                    let left = nodes.len();
                    let right = left + 1;
                    nodes.push(Node::Leaf {
                        distribution: Vec::new(),
                    });
                    nodes.push(Node::Leaf {
                        distribution: Vec::new(),
                    });
                    nodes[slot] = Node::Split {
                        feature: c.feature,
                        test: c.test,
                        left,
                        right,
                    };
                    stack.push((right, r, depth + 1));
                    stack.push((left, l, depth + 1));
                }
            }
        }
        DecisionTree { nodes }
    }
}

fn weight_of(fit: &TreeFit<'_>, i: usize) -> f64 {
    fit.weights.map_or(1.0, |w| w[i])
}

fn class_weights(fit: &TreeFit<'_>, samples: &[usize], k: usize) -> Vec<f64> {
    let mut dist = vec![0.0; k];
    for &i in samples {
        dist[fit.data.label(i)] += weight_of(fit, i);
    }
    dist
}

/// Σ_k w_k² / W, larger is purer. Zero-weight sides contribute nothing.
fn purity(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        0.0
    } else {
        counts.iter().map(|c| c * c).sum::<f64>() / total
    }
}

fn best_split(fit: &TreeFit<'_>, samples: &[usize], order: &[usize], k: usize) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    let mut examined = 0;
    for &j in order {
        if examined >= fit.max_features && best.is_some() {
            break;
        }
        let found = if fit.categorical[j] {
            categorical_split(fit, samples, j, k)
        } else {
            numeric_split(fit, samples, j, k)
        };
        let Some((c, varied)) = found else { continue };
        if varied {
            examined += 1;
        }
        if best.as_ref().is_none_or(|b| c.score > b.score) {
            best = Some(c);
        }
    }
    best
}

fn numeric_split(fit: &TreeFit<'_>, samples: &[usize], j: usize, k: usize) -> Option<(Candidate, bool)> {
    let mut items: Vec<(f64, usize, f64)> = samples
        .iter()
        .map(|&i| (fit.data.value(i, j), fit.data.label(i), weight_of(fit, i)))
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    if items[0].0 == items[items.len() - 1].0 {
        return None;
    }
    let mut right = vec![0.0; k];
    for &(_, l, w) in &items {
        right[l] += w;
    }
    let mut left = vec![0.0; k];
    let mut best: Option<(f64, f64)> = None;
    for t in 0..items.len() - 1 {
        let (v, l, w) = items[t];
        left[l] += w;
        right[l] -= w;
        let next = items[t + 1].0;
        if next == v {
            continue;
        }
        let score = purity(&left) + purity(&right);
        if best.is_none_or(|(s, _)| score > s) {
            let mut mid = v + (next - v) / 2.0;
            if mid >= next {
                mid = v;
            }
            best = Some((score, mid));
        }
    }
    best.map(|(score, t)| {
        (
            Candidate {
                feature: j,
                test: SplitTest::LessEq(t),
                score,
            },
            true,
        )
    })
}

fn categorical_split(fit: &TreeFit<'_>, samples: &[usize], j: usize, k: usize) -> Option<(Candidate, bool)> {
    let levels = fit.data.schema().feature(j).n_levels().unwrap_or(0);
    let mut per_code = vec![vec![0.0; k]; levels];
    let mut present = vec![false; levels];
    let mut total = vec![0.0; k];
    for &i in samples {
        let code = fit.data.value(i, j) as usize;
        let (l, w) = (fit.data.label(i), weight_of(fit, i));
        per_code[code][l] += w;
        total[l] += w;
        present[code] = true;
    }
    let n_present = present.iter().filter(|&&p| p).count();
    if n_present < 2 {
        return None;
    }
    let mut best: Option<Candidate> = None;
    for code in 0..levels {
        if !present[code] {
            continue;
        }
        // with two codes present the second one-vs-rest split mirrors the first
        if n_present == 2 && best.is_some() {
            break;
        }
        let rest: Vec<f64> = total.iter().zip(&per_code[code]).map(|(t, c)| t - c).collect();
        let score = purity(&per_code[code]) + purity(&rest);
        if best.as_ref().is_none_or(|b| score > b.score) {
            best = Some(Candidate {
                feature: j,
                test: SplitTest::Equals(code as u32),
                score,
            });
        }
    }
    best.map(|c| (c, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Feature, Schema};
    use crate::rng;

    fn xor_data() -> Dataset {
        let schema = Schema::new(
            vec![Feature::numeric("a"), Feature::numeric("b")],
            "y",
            vec!["0".into(), "1".into()],
        )
        .unwrap();
        let rows = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        Dataset::new(schema, rows, vec![0, 1, 1, 0]).unwrap()
    }

    fn fit_all(ds: &Dataset, max_depth: Option<usize>) -> DecisionTree {
        let active: Vec<usize> = (0..ds.n_features()).collect();
        let categorical: Vec<bool> = ds.schema().features().iter().map(|f| f.kind.is_categorical()).collect();
        let fit = TreeFit {
            data: ds,
            active: &active,
            categorical: &categorical,
            weights: None,
            max_depth,
            min_samples_split: 2,
            max_features: active.len(),
        };
        DecisionTree::fit(&fit, (0..ds.n_rows()).collect(), &mut rng::seeded(0))
    }

    #[test]
    fn fits_xor_exactly_despite_zero_gain_root() {
        let ds = xor_data();
        let t = fit_all(&ds, None);
        for i in 0..ds.n_rows() {
            let p = t.predict_proba(ds.row(i));
            assert_eq!(p[ds.label(i)], 1.0);
        }
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn stump_threshold_is_midpoint() {
        let schema = Schema::new(vec![Feature::numeric("a")], "y", vec!["0".into(), "1".into()]).unwrap();
        let ds = Dataset::new(
            schema,
            vec![vec![1.0], vec![2.0], vec![4.0], vec![6.0]],
            vec![0, 0, 1, 1],
        )
        .unwrap();
        let t = fit_all(&ds, Some(1));
        match &t.nodes()[0] {
            Node::Split { test, .. } => assert_eq!(*test, SplitTest::LessEq(3.0)),
            n => panic!("expected split, got {n:?}"),
        }
    }

    #[test]
    fn categorical_one_vs_rest() {
        let schema = Schema::new(
            vec![Feature::categorical("g", ["a", "b", "c"])],
            "y",
            vec!["0".into(), "1".into()],
        )
        .unwrap();
        let ds = Dataset::new(
            schema,
            vec![vec![0.0], vec![1.0], vec![2.0], vec![2.0]],
            vec![0, 0, 1, 1],
        )
        .unwrap();
        let t = fit_all(&ds, None);
        for i in 0..4 {
            assert_eq!(t.predict_proba(ds.row(i))[ds.label(i)], 1.0);
        }
        match &t.nodes()[0] {
            Node::Split { test, .. } => assert_eq!(*test, SplitTest::Equals(2)),
            n => panic!("expected split, got {n:?}"),
        }
    }

    #[test]
    fn identical_rows_with_conflicting_labels_give_mixed_leaf() {
        let schema = Schema::new(vec![Feature::numeric("a")], "y", vec!["0".into(), "1".into()]).unwrap();
        let ds = Dataset::new(schema, vec![vec![1.0]; 4], vec![0, 1, 1, 1]).unwrap();
        let t = fit_all(&ds, None);
        assert_eq!(t.predict_proba(&[1.0]), &[0.25, 0.75]);
    }
}
