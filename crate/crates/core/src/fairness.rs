//! Process-fairness check and the feature-dropout ensemble that replaces a
//! model relying on sensitive features.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{accuracy, train, ClassifierSpec, FeatureMask, ProbabilisticClassifier, TrainedModel};
use crate::data::{split_train_test, Dataset, FeatureStats, Schema, DEFAULT_BINS, DEFAULT_TRAIN_FRACTION};
use crate::error::{Error, Result};
use crate::global::{
    build_explanation_matrix, explain_globally, select_candidates, GlobalExplanation, DEFAULT_BUDGET,
    DEFAULT_MAX_CANDIDATES,
};
use crate::lime::{KernelConfig, SurrogateConfig};
use crate::rng;

pub const DEFAULT_TOP_K: usize = 10;

/// Feature names the user declares sensitive, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitiveSet {
    features: Vec<String>,
}

impl SensitiveSet {
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>, schema: &Schema) -> Result<Self> {
        let mut features: Vec<String> = Vec::new();
        for n in names {
            let n = n.as_ref();
            if schema.feature_index(n).is_none() {
                return Err(Error::Config(format!("sensitive feature `{n}` is not a column of the data")));
            }
            if features.iter().any(|f| f == n) {
                return Err(Error::Config(format!("sensitive feature `{n}` listed twice")));
            }
            features.push(n.to_string());
        }
        if features.is_empty() {
            return Err(Error::Config("at least one sensitive feature is required".into()));
        }
        Ok(SensitiveSet { features })
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub feature: String,
    /// 1-based position in the global ranking.
    pub rank: usize,
    pub mean_signed: f64,
    pub mean_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessVerdict {
    pub fair: bool,
    pub offenders: Vec<Offender>,
    pub k: usize,
}

/// A sensitive feature offends when its mean absolute contribution reaches
/// the K-th largest (ties count) and exceeds its own noise threshold.
pub fn assess_fairness(global: &GlobalExplanation, sensitive: &SensitiveSet, k: usize) -> FairnessVerdict {
    let cutoff = global
        .ranked
        .get(k.clamp(1, global.ranked.len().max(1)) - 1)
        .map_or(f64::INFINITY, |c| c.mean_abs);
    let mut offenders: Vec<Offender> = sensitive
        .features()
        .iter()
        .filter_map(|name| global.get(name))
        .filter(|(_, c)| c.mean_abs >= cutoff && c.mean_abs > c.noise_threshold)
        .map(|(rank, c)| Offender {
            feature: c.feature.clone(),
            rank,
            mean_signed: c.mean_signed,
            mean_abs: c.mean_abs,
        })
        .collect();
    offenders.sort_by_key(|o| o.rank);
    FairnessVerdict {
        fair: offenders.is_empty(),
        offenders,
        k,
    }
}

/// Masks of the dropout pool: one per sensitive feature, then all of them.
pub fn pool_masks(sensitive: &SensitiveSet, schema: &Schema) -> Result<Vec<FeatureMask>> {
    let mut masks = sensitive
        .features()
        .iter()
        .map(|f| FeatureMask::new([f], schema))
        .collect::<Result<Vec<_>>>()?;
    masks.push(FeatureMask::new(sensitive.features(), schema)?);
    Ok(masks)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierPool {
    pub members: Vec<TrainedModel>,
}

/// Trains the `|sensitive| + 1` dropout models; member `k` uses seed
/// `derive(spec.seed, k + 1)`.
pub fn build_pool(spec: &ClassifierSpec, train_data: &Dataset, sensitive: &SensitiveSet) -> Result<ClassifierPool> {
    let masks = pool_masks(sensitive, train_data.schema())?;
    if masks.last().is_some_and(|m| m.active_indices(train_data.schema()).is_empty()) {
        return Err(Error::InvalidArgument("every feature is sensitive; nothing left to train on".into()));
    }
    let members = masks
        .into_par_iter()
        .enumerate()
        .map(|(k, mask)| train(&spec.with_seed(rng::derive(spec.seed, k as u64 + 1)), train_data, &mask))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassifierPool { members })
}

/// Component-wise mean of the members' probability vectors.
pub fn mean_proba(members: &[&dyn ProbabilisticClassifier], x: &[f64]) -> Result<Vec<f64>> {
    let first = members
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
    let mut sum = first.predict_proba(x)?;
    for m in &members[1..] {
        for (s, p) in sum.iter_mut().zip(m.predict_proba(x)?) {
            *s += p;
        }
    }
    let n = members.len() as f64;
    Ok(sum.into_iter().map(|s| s / n).collect())
}

/// Unweighted average of a dropout pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub pool: ClassifierPool,
}

impl EnsembleModel {
    pub fn new(pool: ClassifierPool) -> Result<Self> {
        let first = pool
            .members
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
        if pool.members.iter().any(|m| m.schema() != first.schema()) {
            return Err(Error::InvalidArgument("ensemble members disagree on the schema".into()));
        }
        Ok(EnsembleModel { pool })
    }
}

pub fn ensemble_predict(ens: &EnsembleModel, x: &[f64]) -> Result<Vec<f64>> {
    let members: Vec<&dyn ProbabilisticClassifier> =
        ens.pool.members.iter().map(|m| m as &dyn ProbabilisticClassifier).collect();
    mean_proba(&members, x)
}

impl ProbabilisticClassifier for EnsembleModel {
    fn schema(&self) -> &Schema {
        self.pool.members[0].schema()
    }

    fn predict_proba(&self, row: &[f64]) -> Result<Vec<f64>> {
        ensemble_predict(self, row)
    }
}

/// Knobs of one audit besides the classifier itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditSettings {
    pub seed: u64,
    pub train_fraction: f64,
    pub bins: usize,
    pub n_samples: usize,
    pub lambda: f64,
    pub k: usize,
    /// Kernel width; `None` means `0.75·√d`.
    pub sigma: Option<f64>,
    pub budget: usize,
    pub max_candidates: usize,
    pub top_k: usize,
}

impl AuditSettings {
    pub fn with_seed(seed: u64) -> Self {
        AuditSettings {
            seed,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            bins: DEFAULT_BINS,
            n_samples: SurrogateConfig::DEFAULT_SAMPLES,
            lambda: SurrogateConfig::DEFAULT_LAMBDA,
            k: SurrogateConfig::DEFAULT_K,
            sigma: None,
            budget: DEFAULT_BUDGET,
            max_candidates: DEFAULT_MAX_CANDIDATES,
            top_k: DEFAULT_TOP_K,
        }
    }

    pub fn split_seed(&self) -> u64 {
        rng::derive_named(self.seed, "split")
    }

    pub fn candidate_seed(&self) -> u64 {
        rng::derive_named(self.seed, "candidates")
    }

    pub fn lime_seed(&self) -> u64 {
        rng::derive_named(self.seed, "lime")
    }

    pub fn surrogate(&self) -> SurrogateConfig {
        SurrogateConfig {
            n_samples: self.n_samples,
            lambda: self.lambda,
            k: self.k,
            seed: self.lime_seed(),
        }
    }

    pub fn kernel(&self, n_features: usize) -> Result<KernelConfig> {
        match self.sigma {
            Some(s) => KernelConfig::new(s),
            None => Ok(KernelConfig::for_dimension(n_features)),
        }
    }
}

/// Everything a single-algorithm audit produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub spec: ClassifierSpec,
    pub sensitive: SensitiveSet,
    pub settings: AuditSettings,
    pub train_rows: usize,
    pub test_rows: usize,
    pub original_accuracy: f64,
    pub original_global: GlobalExplanation,
    pub original_verdict: FairnessVerdict,
    /// Present only when the original model was judged unfair.
    pub ensemble: Option<EnsembleAudit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleAudit {
    pub member_masks: Vec<FeatureMask>,
    pub accuracy: f64,
    pub global: GlobalExplanation,
    pub verdict: FairnessVerdict,
}

/// Report plus the fitted models, for callers that persist them.
#[derive(Debug, Clone)]
pub struct AuditOutcome {
    pub report: AuditReport,
    pub original: TrainedModel,
    pub ensemble: Option<EnsembleModel>,
    /// Training-split statistics the explanations were sampled from.
    pub stats: FeatureStats,
}

/// Global explanation of any model over the given candidates.
pub fn explain_model_globally(
    model: &dyn ProbabilisticClassifier,
    candidates: &Dataset,
    stats: &FeatureStats,
    settings: &AuditSettings,
) -> Result<GlobalExplanation> {
    let kernel = settings.kernel(candidates.n_features())?;
    let w = build_explanation_matrix(model, candidates, stats, &settings.surrogate(), &kernel)?;
    explain_globally(&w, settings.budget)
}

/// Split, train, explain, judge; when unfair, build the dropout ensemble and
/// explain it the same way on the same candidates.
pub fn run_audit(
    spec: &ClassifierSpec,
    data: &Dataset,
    sensitive: &SensitiveSet,
    settings: &AuditSettings,
) -> Result<AuditOutcome> {
    SensitiveSet::new(sensitive.features(), data.schema())?;
    let split = split_train_test(data, settings.train_fraction, settings.split_seed())?;
    let stats = FeatureStats::compute(&split.train, settings.bins)?;
    let original = train(spec, &split.train, &FeatureMask::none())?;
    let original_accuracy = accuracy(&original, &split.test)?;

    let cand_idx = select_candidates(split.test.n_rows(), settings.max_candidates, settings.candidate_seed());
    let candidates = split.test.subset(&cand_idx);
    let original_global = explain_model_globally(&original, &candidates, &stats, settings)?;
    let original_verdict = assess_fairness(&original_global, sensitive, settings.top_k);

    let (ensemble_audit, ensemble) = if original_verdict.fair {
        (None, None)
    } else {
        let ens = EnsembleModel::new(build_pool(spec, &split.train, sensitive)?)?;
        let global = explain_model_globally(&ens, &candidates, &stats, settings)?;
        let audit = EnsembleAudit {
            member_masks: ens.pool.members.iter().map(|m| m.mask().clone()).collect(),
            accuracy: accuracy(&ens, &split.test)?,
            verdict: assess_fairness(&global, sensitive, settings.top_k),
            global,
        };
        (Some(audit), Some(ens))
    };

    Ok(AuditOutcome {
        report: AuditReport {
            spec: *spec,
            sensitive: sensitive.clone(),
            settings: *settings,
            train_rows: split.train.n_rows(),
            test_rows: split.test.n_rows(),
            original_accuracy,
            original_global,
            original_verdict,
            ensemble: ensemble_audit,
        },
        original,
        ensemble,
        stats,
    })
}
