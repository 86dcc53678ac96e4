use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric,
    /// Values are stored as integer codes indexing `levels`.
    Categorical { levels: Vec<String> },
}

impl FeatureKind {
    pub fn is_categorical(&self) -> bool {
        matches!(self, FeatureKind::Categorical { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

impl Feature {
    pub fn numeric(name: impl Into<String>) -> Self {
        Feature {
            name: name.into(),
            kind: FeatureKind::Numeric,
        }
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        levels: impl IntoIterator<Item = S>,
    ) -> Self {
        Feature {
            name: name.into(),
            kind: FeatureKind::Categorical {
                levels: levels.into_iter().map(Into::into).collect(),
            },
        }
    }

    /// Number of codes for a categorical feature, `None` for numeric.
    pub fn n_levels(&self) -> Option<usize> {
        match &self.kind {
            FeatureKind::Categorical { levels } => Some(levels.len()),
            FeatureKind::Numeric => None,
        }
    }
}

/// Ordered feature roster plus the class-label column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema", into = "RawSchema")]
pub struct Schema {
    features: Vec<Feature>,
    target: String,
    class_labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RawSchema {
    features: Vec<Feature>,
    target: String,
    class_labels: Vec<String>,
}

impl TryFrom<RawSchema> for Schema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        Schema::new(raw.features, raw.target, raw.class_labels)
    }
}

impl From<Schema> for RawSchema {
    fn from(s: Schema) -> Self {
        RawSchema {
            features: s.features,
            target: s.target,
            class_labels: s.class_labels,
        }
    }
}

impl Schema {
    pub fn new(
        features: Vec<Feature>,
        target: impl Into<String>,
        class_labels: Vec<String>,
    ) -> Result<Self> {
        let target = target.into();
        if features.is_empty() {
            return Err(Error::Schema("schema needs at least one feature".into()));
        }
        let mut seen = HashSet::new();
        for f in &features {
            if !seen.insert(f.name.as_str()) {
                return Err(Error::Schema(format!("duplicate feature name `{}`", f.name)));
            }
            if let FeatureKind::Categorical { levels } = &f.kind {
                if levels.is_empty() {
                    return Err(Error::Schema(format!(
                        "categorical feature `{}` has no levels",
                        f.name
                    )));
                }
            }
        }
        if seen.contains(target.as_str()) {
            return Err(Error::Schema(format!(
                "target `{target}` is also listed as a feature"
            )));
        }
        if class_labels.len() < 2 {
            return Err(Error::Schema(format!(
                "target `{target}` needs at least 2 class labels, found {}",
                class_labels.len()
            )));
        }
        let distinct: HashSet<&str> = class_labels.iter().map(String::as_str).collect();
        if distinct.len() != class_labels.len() {
            return Err(Error::Schema("class labels must be distinct".into()));
        }
        Ok(Schema {
            features,
            target,
            class_labels,
        })
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature(&self, index: usize) -> &Feature {
        &self.features[index]
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.features.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    /// Checks that `row` has one valid slot per feature.
    pub fn check_row(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.features.len() {
            return Err(Error::Schema(format!(
                "row has {} slots, schema has {} features",
                row.len(),
                self.features.len()
            )));
        }
        for (f, &v) in self.features.iter().zip(row) {
            match &f.kind {
                FeatureKind::Numeric if !v.is_finite() => {
                    return Err(Error::Schema(format!(
                        "non-finite value {v} for numeric feature `{}`",
                        f.name
                    )));
                }
                FeatureKind::Categorical { levels }
                    if !(v >= 0.0 && v.fract() == 0.0 && (v as usize) < levels.len()) =>
                {
                    return Err(Error::Schema(format!(
                        "invalid code {v} for categorical feature `{}` ({} levels)",
                        f.name,
                        levels.len()
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }
}
