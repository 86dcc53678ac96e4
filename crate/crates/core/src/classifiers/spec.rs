use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifiers::logistic::LogisticParams;
use crate::data::Schema;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Logistic,
    Tree,
    RandomForest,
    Bagging,
    Adaboost,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Logistic,
        Algorithm::Tree,
        Algorithm::RandomForest,
        Algorithm::Bagging,
        Algorithm::Adaboost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Logistic => "logistic",
            Algorithm::Tree => "tree",
            Algorithm::RandomForest => "random_forest",
            Algorithm::Bagging => "bagging",
            Algorithm::Adaboost => "adaboost",
        }
    }

    /// Column heading used in accuracy tables.
    pub fn short_name(self) -> &'static str {
        match self {
            Algorithm::Logistic => "LR",
            Algorithm::Tree => "Tree",
            Algorithm::RandomForest => "RF",
            Algorithm::Bagging => "Bagging",
            Algorithm::Adaboost => "ADA",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    /// ⌈√d⌉ of the unmasked features.
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, active: usize) -> usize {
        match self {
            MaxFeatures::All => active,
            MaxFeatures::Sqrt => ((active as f64).sqrt().ceil() as usize).max(1),
            MaxFeatures::Count(c) => c.min(active),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            max_features: MaxFeatures::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub tree_count: usize,
    pub bootstrap: bool,
    pub tree: TreeParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub rounds: usize,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum Hyperparameters {
    Logistic(LogisticParams),
    Tree(TreeParams),
    RandomForest(EnsembleParams),
    Bagging(EnsembleParams),
    Adaboost(BoostParams),
}

impl Hyperparameters {
    pub fn defaults(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Logistic => Hyperparameters::Logistic(LogisticParams::default()),
            Algorithm::Tree => Hyperparameters::Tree(TreeParams::default()),
            Algorithm::RandomForest => Hyperparameters::RandomForest(EnsembleParams {
                tree_count: 100,
                bootstrap: true,
                tree: TreeParams {
                    max_features: MaxFeatures::Sqrt,
                    ..TreeParams::default()
                },
            }),
            Algorithm::Bagging => Hyperparameters::Bagging(EnsembleParams {
                tree_count: 100,
                bootstrap: true,
                tree: TreeParams::default(),
            }),
            Algorithm::Adaboost => Hyperparameters::Adaboost(BoostParams {
                rounds: 50,
                learning_rate: 1.0,
            }),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Hyperparameters::Logistic(_) => Algorithm::Logistic,
            Hyperparameters::Tree(_) => Algorithm::Tree,
            Hyperparameters::RandomForest(_) => Algorithm::RandomForest,
            Hyperparameters::Bagging(_) => Algorithm::Bagging,
            Hyperparameters::Adaboost(_) => Algorithm::Adaboost,
        }
    }

    /// Overrides one hyperparameter from its textual form. Keys:
    /// logistic `l2`, `learning_rate`, `max_iter`, `tolerance`;
    /// tree `max_depth` (`none` for unlimited), `min_samples_split`,
    /// `max_features` (`all`, `sqrt` or a count); forest/bagging add
    /// `tree_count`, `bootstrap`; adaboost `rounds`, `learning_rate`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidHyperparameter(format!("{key} = `{value}`: {what}"));
        let real = || value.parse::<f64>().map_err(|_| bad("expected a real number"));
        let count = || value.parse::<usize>().map_err(|_| bad("expected a non-negative integer"));
        let tree_key = |t: &mut TreeParams| -> Result<bool> {
            match key {
                "max_depth" => {
                    t.max_depth = if value == "none" { None } else { Some(count()?) };
                }
                "min_samples_split" => t.min_samples_split = count()?,
                "max_features" => {
                    t.max_features = match value {
                        "all" => MaxFeatures::All,
                        "sqrt" => MaxFeatures::Sqrt,
                        _ => MaxFeatures::Count(count()?),
                    }
                }
                _ => return Ok(false),
            }
            Ok(true)
        };
        let known = match self {
            Hyperparameters::Logistic(p) => match key {
                "l2" => {
                    p.l2 = real()?;
                    true
                }
                "learning_rate" => {
                    p.learning_rate = real()?;
                    true
                }
                "max_iter" => {
                    p.max_iter = count()?;
                    true
                }
                "tolerance" => {
                    p.tolerance = real()?;
                    true
                }
                _ => false,
            },
            Hyperparameters::Tree(t) => tree_key(t)?,
            Hyperparameters::RandomForest(e) | Hyperparameters::Bagging(e) => match key {
                "tree_count" => {
                    e.tree_count = count()?;
                    true
                }
                "bootstrap" => {
                    e.bootstrap = value.parse().map_err(|_| bad("expected true or false"))?;
                    true
                }
                _ => tree_key(&mut e.tree)?,
            },
            Hyperparameters::Adaboost(b) => match key {
                "rounds" => {
                    b.rounds = count()?;
                    true
                }
                "learning_rate" => {
                    b.learning_rate = real()?;
                    true
                }
                _ => false,
            },
        };
        if !known {
            return Err(Error::InvalidHyperparameter(format!(
                "`{key}` is not a hyperparameter of {}",
                self.algorithm()
            )));
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidHyperparameter(m));
        let check_tree = |t: &TreeParams| -> Result<()> {
            if t.min_samples_split < 2 {
                return fail(format!("min_samples_split must be >= 2, got {}", t.min_samples_split));
            }
            if t.max_depth == Some(0) {
                return fail("max_depth must be >= 1".into());
            }
            if t.max_features == MaxFeatures::Count(0) {
                return fail("max_features must be >= 1".into());
            }
            Ok(())
        };
        match self {
            Hyperparameters::Logistic(p) => {
                if !(p.l2 >= 0.0 && p.l2.is_finite()) {
                    return fail(format!("l2 must be finite and >= 0, got {}", p.l2));
                }
                if !(p.learning_rate > 0.0 && p.learning_rate.is_finite()) {
                    return fail(format!("learning_rate must be > 0, got {}", p.learning_rate));
                }
                if p.max_iter == 0 {
                    return fail("max_iter must be >= 1".into());
                }
                if p.tolerance.is_nan() || p.tolerance < 0.0 {
                    return fail(format!("tolerance must be >= 0, got {}", p.tolerance));
                }
                Ok(())
            }
            Hyperparameters::Tree(t) => check_tree(t),
            Hyperparameters::RandomForest(e) | Hyperparameters::Bagging(e) => {
                if e.tree_count == 0 {
                    return fail("tree_count must be >= 1".into());
                }
                check_tree(&e.tree)
            }
            Hyperparameters::Adaboost(b) => {
                if b.rounds == 0 {
                    return fail("rounds must be >= 1".into());
                }
                if !(b.learning_rate > 0.0 && b.learning_rate.is_finite()) {
                    return fail(format!("learning_rate must be > 0, got {}", b.learning_rate));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub hyperparameters: Hyperparameters,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        ClassifierSpec {
            hyperparameters: Hyperparameters::defaults(algorithm),
            seed,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.hyperparameters.algorithm()
    }

    pub fn with(mut self, key: &str, value: &str) -> Result<Self> {
        self.hyperparameters.set(key, value)?;
        Ok(self)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ClassifierSpec { seed, ..self }
    }
}

/// Features removed from both training and prediction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMask {
    dropped: BTreeSet<String>,
}

impl FeatureMask {
    pub fn none() -> Self {
        FeatureMask::default()
    }

    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>, schema: &Schema) -> Result<Self> {
        let mut dropped = BTreeSet::new();
        for n in names {
            let n = n.as_ref();
            if schema.feature_index(n).is_none() {
                return Err(Error::Config(format!("mask names unknown feature `{n}`")));
            }
            dropped.insert(n.to_string());
        }
        Ok(FeatureMask { dropped })
    }

    pub fn dropped(&self) -> &BTreeSet<String> {
        &self.dropped
    }

    pub fn contains(&self, name: &str) -> bool {
        self.dropped.contains(name)
    }

    pub fn is_empty(&self) -> bool {
        self.dropped.is_empty()
    }

    /// Indices of the features that remain visible, in schema order.
    pub fn active_indices(&self, schema: &Schema) -> Vec<usize> {
        schema
            .features()
            .iter()
            .enumerate()
            .filter(|(_, f)| !self.dropped.contains(&f.name))
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        assert_eq!("random_forest".parse::<Algorithm>().unwrap(), Algorithm::RandomForest);
        assert!("svm".parse::<Algorithm>().is_err());
        let s = ClassifierSpec::new(Algorithm::RandomForest, 1)
            .with("tree_count", "7")
            .unwrap()
            .with("max_features", "all")
            .unwrap();
        match s.hyperparameters {
            Hyperparameters::RandomForest(e) => {
                assert_eq!(e.tree_count, 7);
                assert_eq!(e.tree.max_features, MaxFeatures::All);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn invalid_hyperparameters_are_rejected() {
        let rf = ClassifierSpec::new(Algorithm::RandomForest, 1);
        assert!(rf.with("tree_count", "0").is_err());
        assert!(rf.with("rounds", "3").is_err());
        let ada = ClassifierSpec::new(Algorithm::Adaboost, 1);
        assert!(ada.with("learning_rate", "0").is_err());
        assert!(ada.with("learning_rate", "abc").is_err());
        let lr = ClassifierSpec::new(Algorithm::Logistic, 1);
        assert!(lr.with("learning_rate", "-1").is_err());
        assert!(lr.with("tree_count", "3").is_err());
    }

    #[test]
    fn max_features_resolution() {
        assert_eq!(MaxFeatures::Sqrt.resolve(5), 3);
        assert_eq!(MaxFeatures::Sqrt.resolve(9), 3);
        assert_eq!(MaxFeatures::Sqrt.resolve(1), 1);
        assert_eq!(MaxFeatures::Count(10).resolve(4), 4);
    }
}
