//! The probabilistic-classifier contract and the five model families behind
//! it. Every model carries a [`FeatureMask`]; masked features are never read.

mod adaboost;
mod forest;
mod logistic;
mod persist;
mod spec;
mod tree;

pub use adaboost::{samme_alpha, AdaBoost};
pub use forest::Forest;
pub use logistic::{loss_and_gradient as logistic_loss_and_gradient, LogisticModel, LogisticParams};
pub use persist::{load_model, save_model, ModelFile, MODEL_FORMAT_VERSION};
pub use spec::{
    Algorithm, BoostParams, ClassifierSpec, EnsembleParams, FeatureMask, Hyperparameters,
    MaxFeatures, TreeParams,
};
pub use tree::{DecisionTree, Node, SplitTest};

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Schema};
use crate::error::{Error, Result};
use crate::rng;
use tree::TreeFit;

/// Anything that maps a row to a probability vector over class labels.
pub trait ProbabilisticClassifier: Send + Sync {
    fn schema(&self) -> &Schema;

    /// Probability per class label; validates the row against the schema.
    fn predict_proba(&self, row: &[f64]) -> Result<Vec<f64>>;

    fn class_labels(&self) -> &[String] {
        self.schema().class_labels()
    }

    /// Most probable class index, ties toward the lower index.
    fn predict(&self, row: &[f64]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(row)?))
    }
}

type ProbaFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Wraps a plain function as a classifier; useful for known black boxes.
pub struct FnClassifier {
    schema: Schema,
    f: Box<ProbaFn>,
}

impl FnClassifier {
    pub fn new(schema: Schema, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        FnClassifier { schema, f: Box::new(f) }
    }
}

impl ProbabilisticClassifier for FnClassifier {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn predict_proba(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.schema.check_row(row)?;
        let p = (self.f)(row);
        if p.len() != self.schema.n_classes() {
            return Err(Error::InvalidArgument(format!(
                "function returned {} probabilities for {} classes",
                p.len(),
                self.schema.n_classes()
            )));
        }
        Ok(p)
    }
}

pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = i;
        }
    }
    best
}

/// Fraction of rows whose predicted class equals the true label.
pub fn accuracy(model: &dyn ProbabilisticClassifier, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("accuracy of an empty dataset".into()));
    }
    let mut hits = 0usize;
    for (i, row) in data.rows().enumerate() {
        if model.predict(row)? == data.label(i) {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.n_rows() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FittedParams {
    Logistic(LogisticModel),
    Tree(DecisionTree),
    Forest(Forest),
    Adaboost(AdaBoost),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    spec: ClassifierSpec,
    mask: FeatureMask,
    schema: Schema,
    params: FittedParams,
}

impl TrainedModel {
    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn mask(&self) -> &FeatureMask {
        &self.mask
    }

    pub fn params(&self) -> &FittedParams {
        &self.params
    }

    pub fn from_parts(spec: ClassifierSpec, mask: FeatureMask, schema: Schema, params: FittedParams) -> Self {
        TrainedModel {
            spec,
            mask,
            schema,
            params,
        }
    }

    fn proba_unchecked(&self, row: &[f64]) -> Vec<f64> {
        match &self.params {
            FittedParams::Logistic(m) => m.predict_proba(row),
            FittedParams::Tree(t) => t.predict_proba(row).to_vec(),
            FittedParams::Forest(f) => f.predict_proba(row),
            FittedParams::Adaboost(a) => a.predict_proba(row),
        }
    }
}

impl ProbabilisticClassifier for TrainedModel {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn predict_proba(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.schema.check_row(row)?;
        Ok(self.proba_unchecked(row))
    }
}

/// Trains one model. Deterministic for fixed `(spec, data, mask)`.
pub fn train(spec: &ClassifierSpec, data: &Dataset, mask: &FeatureMask) -> Result<TrainedModel> {
    spec.hyperparameters.validate()?;
    if data.is_empty() {
        return Err(Error::DegenerateTraining("training data is empty".into()));
    }
    let present = data.class_counts().iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(Error::DegenerateTraining(format!(
            "training data contains {present} class(es); at least 2 are required"
        )));
    }
    let schema = data.schema();
    for name in mask.dropped() {
        if schema.feature_index(name).is_none() {
            return Err(Error::InvalidArgument(format!("mask names unknown feature `{name}`")));
        }
    }
    let active = mask.active_indices(schema);
    if active.is_empty() {
        return Err(Error::InvalidArgument("mask drops every feature".into()));
    }
    let categorical: Vec<bool> = schema.features().iter().map(|f| f.kind.is_categorical()).collect();
    let tree_fit = |t: &TreeParams| TreeFit {
        data,
        active: &active,
        categorical: &categorical,
        weights: None,
        max_depth: t.max_depth,
        min_samples_split: t.min_samples_split,
        max_features: t.max_features.resolve(active.len()),
    };
    let params = match &spec.hyperparameters {
        Hyperparameters::Logistic(p) => FittedParams::Logistic(LogisticModel::fit(data, &active, p)),
        Hyperparameters::Tree(t) => {
            let mut r = rng::seeded(rng::derive(spec.seed, 0));
            FittedParams::Tree(DecisionTree::fit(&tree_fit(t), (0..data.n_rows()).collect(), &mut r))
        }
        Hyperparameters::RandomForest(e) | Hyperparameters::Bagging(e) => {
            FittedParams::Forest(Forest::fit(&tree_fit(&e.tree), e.tree_count, e.bootstrap, spec.seed))
        }
        Hyperparameters::Adaboost(b) => {
            let stump = TreeParams {
                max_depth: Some(1),
                ..TreeParams::default()
            };
            FittedParams::Adaboost(AdaBoost::fit(&tree_fit(&stump), b.rounds, b.learning_rate, spec.seed).0)
        }
    };
    Ok(TrainedModel {
        spec: *spec,
        mask: mask.clone(),
        schema: schema.clone(),
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_planted_bias, Feature, PlantedBiasConfig};
    use rand::Rng;

    fn small_data() -> Dataset {
        generate_planted_bias(&PlantedBiasConfig {
            n_rows: 200,
            n_noise_features: 2,
            seed: 1,
            ..Default::default()
        })
        .unwrap()
    }

    fn fast_spec(a: Algorithm, seed: u64) -> ClassifierSpec {
        let s = ClassifierSpec::new(a, seed);
        match a {
            Algorithm::RandomForest | Algorithm::Bagging => s.with("tree_count", "10").unwrap(),
            Algorithm::Adaboost => s.with("rounds", "10").unwrap(),
            _ => s,
        }
    }

    #[test]
    fn predict_tie_breaks_low() {
        assert_eq!(argmax(&[0.7, 0.3]), 0);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 0.2, 0.7]), 2);
    }

    #[test]
    fn tree_fits_consistent_data_exactly() {
        let ds = small_data();
        let m = train(&ClassifierSpec::new(Algorithm::Tree, 0), &ds, &FeatureMask::none()).unwrap();
        assert_eq!(accuracy(&m, &ds).unwrap(), 1.0);
    }

    #[test]
    fn accuracy_of_constant_model_is_majority_rate() {
        let schema = Schema::new(vec![Feature::numeric("x")], "y", vec!["a".into(), "b".into()]).unwrap();
        let rows = (0..10).map(|i| vec![i as f64]).collect();
        let labels = (0..10).map(|i| usize::from(i >= 6)).collect();
        let ds = Dataset::new(schema.clone(), rows, labels).unwrap();
        let constant = TrainedModel::from_parts(
            ClassifierSpec::new(Algorithm::Logistic, 0),
            FeatureMask::none(),
            schema,
            FittedParams::Logistic(LogisticModel::from_coefficients(&[0], vec![(-1.0, vec![0.0])], 2)),
        );
        assert!((accuracy(&constant, &ds).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn training_errors() {
        let ds = small_data();
        let one_class: Vec<usize> = (0..ds.n_rows()).filter(|&i| ds.label(i) == 0).collect();
        let single = ds.subset(&one_class);
        assert!(matches!(
            train(&ClassifierSpec::new(Algorithm::Tree, 0), &single, &FeatureMask::none()),
            Err(Error::DegenerateTraining(_))
        ));
        let all = FeatureMask::new(ds.schema().feature_names(), ds.schema()).unwrap();
        assert!(train(&ClassifierSpec::new(Algorithm::Tree, 0), &ds, &all).is_err());
        assert!(FeatureMask::new(["nope"], ds.schema()).is_err());
    }

    #[test]
    fn every_family_is_deterministic_and_on_the_simplex() {
        let ds = small_data();
        for a in Algorithm::ALL {
            let spec = fast_spec(a, 5);
            let m1 = train(&spec, &ds, &FeatureMask::none()).unwrap();
            let m2 = train(&spec, &ds, &FeatureMask::none()).unwrap();
            for row in ds.rows().take(50) {
                let p = m1.predict_proba(row).unwrap();
                assert_eq!(p, m2.predict_proba(row).unwrap(), "{a}");
                assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9, "{a}: {p:?}");
            }
        }
    }

    #[test]
    fn single_unbootstrapped_member_equals_tree() {
        let ds = small_data();
        let tree = train(&ClassifierSpec::new(Algorithm::Tree, 9), &ds, &FeatureMask::none()).unwrap();
        let bag = ClassifierSpec::new(Algorithm::Bagging, 9)
            .with("tree_count", "1")
            .unwrap()
            .with("bootstrap", "false")
            .unwrap();
        let bag = train(&bag, &ds, &FeatureMask::none()).unwrap();
        let rf = ClassifierSpec::new(Algorithm::RandomForest, 9)
            .with("tree_count", "1")
            .unwrap()
            .with("bootstrap", "false")
            .unwrap();
        let rf = train(&rf, &ds, &FeatureMask::none()).unwrap();
        let sqrt_tree = ClassifierSpec::new(Algorithm::Tree, 9).with("max_features", "sqrt").unwrap();
        let sqrt_tree = train(&sqrt_tree, &ds, &FeatureMask::none()).unwrap();
        let mut r = rng::seeded(0);
        for _ in 0..200 {
            let row = vec![
                f64::from(u8::from(r.random_bool(0.5))),
                r.random_range(-3.0..3.0),
                r.random_range(-3.0..3.0),
                r.random_range(-3.0..3.0),
            ];
            assert_eq!(bag.predict_proba(&row).unwrap(), tree.predict_proba(&row).unwrap());
            assert_eq!(rf.predict_proba(&row).unwrap(), sqrt_tree.predict_proba(&row).unwrap());
        }
    }

    #[test]
    fn masked_feature_is_never_read() {
        let ds = small_data();
        let mask = FeatureMask::new(["s"], ds.schema()).unwrap();
        for a in Algorithm::ALL {
            let m = train(&fast_spec(a, 2), &ds, &mask).unwrap();
            for row in ds.rows().take(40) {
                let mut flipped = row.to_vec();
                flipped[0] = 1.0 - flipped[0];
                assert_eq!(m.predict_proba(row).unwrap(), m.predict_proba(&flipped).unwrap(), "{a}");
            }
        }
    }

    #[test]
    fn schema_mismatch_is_an_error() {
        let ds = small_data();
        let m = train(&ClassifierSpec::new(Algorithm::Tree, 0), &ds, &FeatureMask::none()).unwrap();
        assert!(m.predict_proba(&[0.0, 1.0]).is_err());
        assert!(m.predict_proba(&[3.0, 1.0, 0.0, 0.0]).is_err());
    }
}
