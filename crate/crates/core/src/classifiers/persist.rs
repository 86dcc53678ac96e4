//! Model files: versioned JSON documents carrying the spec echo, the mask,
//! the schema, fitted parameters and (optionally) the training statistics
//! needed to explain the model later. Floats are written in shortest
//! round-trip form, so a reloaded model predicts bitwise-identically.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifiers::TrainedModel;
use crate::data::FeatureStats;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MODEL_FORMAT_NAME: &str = "limeout-model";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub format_version: u32,
    pub model: TrainedModel,
    pub stats: Option<FeatureStats>,
}

impl ModelFile {
    pub fn new(model: TrainedModel, stats: Option<FeatureStats>) -> Self {
        ModelFile {
            format: MODEL_FORMAT_NAME.into(),
            format_version: MODEL_FORMAT_VERSION,
            model,
            stats,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let probe: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(format!("not a model file: {e}")))?;
        if probe.get("format").and_then(|v| v.as_str()) != Some(MODEL_FORMAT_NAME) {
            return Err(Error::ModelFormat("missing `limeout-model` format header".into()));
        }
        match probe.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(MODEL_FORMAT_VERSION) => {}
            Some(v) => return Err(Error::ModelFormat(format!("unsupported format_version {v}"))),
            None => return Err(Error::ModelFormat("missing format_version".into())),
        }
        serde_json::from_value(probe).map_err(|e| Error::ModelFormat(e.to_string()))
    }
}

pub fn save_model(file: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, file.to_text()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ModelFile::from_text(&text)
}
