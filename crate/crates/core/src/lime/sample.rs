use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::classifiers::ProbabilisticClassifier;
use crate::data::{FeatureStats, FeatureSummary};
use crate::error::{Error, Result};
use crate::lime::kernel::{kernel_weight, KernelConfig};
use crate::rng::{self, Rng};

const MAX_REJECTIONS: usize = 100;

/// Knobs of a single local explanation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateConfig {
    pub n_samples: usize,
    pub lambda: f64,
    /// Number of features reported per explanation.
    pub k: usize,
    pub seed: u64,
}

impl SurrogateConfig {
    pub const DEFAULT_SAMPLES: usize = 5000;
    pub const DEFAULT_LAMBDA: f64 = 1e-3;
    pub const DEFAULT_K: usize = 10;

    pub fn with_seed(seed: u64) -> Self {
        SurrogateConfig {
            n_samples: Self::DEFAULT_SAMPLES,
            lambda: Self::DEFAULT_LAMBDA,
            k: Self::DEFAULT_K,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "neighborhood size must be >= 2, got {}",
                self.n_samples
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("ridge lambda must be >= 0, got {}", self.lambda)));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be >= 1".into()));
        }
        Ok(())
    }
}

/// Perturbed points around one instance. Row 0 is the instance itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub n_features: usize,
    /// Row-major `n × d` interpretable representation: 1 where the sample
    /// falls in the instance's bin (numeric) or shares its level (categorical).
    pub binary: Vec<u8>,
    /// Row-major `n × d` samples in the original feature space.
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Black-box probability of the explained class at each sample.
    pub outputs: Vec<f64>,
    pub explained_class: usize,
}

impl Neighborhood {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn binary_row(&self, i: usize) -> &[u8] {
        &self.binary[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.n_features..(i + 1) * self.n_features]
    }
}

/// Interval `[lo, hi]` of numeric bin `b`; outer bins end at the training extremes.
fn bin_bounds(boundaries: &[f64], min: f64, max: f64, b: usize) -> (f64, f64) {
    let lo = if b == 0 { min } else { boundaries[b - 1] };
    let hi = if b == boundaries.len() { max } else { boundaries[b] };
    (lo, hi)
}

/// Normal(mean, std) truncated to bin `b` by rejection; falls back to the
/// bin midpoint after too many misses.
fn sample_in_bin(rng: &mut Rng, mean: f64, std: f64, lo: f64, hi: f64, first: bool) -> f64 {
    if hi <= lo || std <= 0.0 {
        return if std <= 0.0 && lo <= mean && mean <= hi { mean } else { 0.5 * (lo + hi) };
    }
    for _ in 0..MAX_REJECTIONS {
        let z: f64 = rng.sample(StandardNormal);
        let v = mean + std * z;
        let inside = if first { v >= lo && v <= hi } else { v > lo && v <= hi };
        if inside {
            return v;
        }
    }
    0.5 * (lo + hi)
}

enum Sampler<'a> {
    Numeric { mean: f64, std: f64, min: f64, max: f64, boundaries: &'a [f64] },
    Categorical(WeightedIndex<f64>),
}

/// Draws `cfg.n_samples` points around `x`, labels them with the model's
/// probability for `class`, and weights them by binary-space proximity.
pub fn sample_neighborhood(
    x: &[f64],
    stats: &FeatureStats,
    model: &dyn ProbabilisticClassifier,
    class: usize,
    cfg: &SurrogateConfig,
    kernel: &KernelConfig,
) -> Result<Neighborhood> {
    cfg.validate()?;
    let d = x.len();
    if stats.n_features() != d {
        return Err(Error::InvalidArgument(format!(
            "statistics describe {} features, instance has {d}",
            stats.n_features()
        )));
    }
    model.schema().check_row(x)?;
    if class >= model.schema().n_classes() {
        return Err(Error::InvalidArgument(format!("class index {class} out of range")));
    }

    let samplers = stats
        .features()
        .iter()
        .map(|f| match f {
            FeatureSummary::Numeric { mean, std, min, max, boundaries } => Ok(Sampler::Numeric {
                mean: *mean,
                std: *std,
                min: *min,
                max: *max,
                boundaries,
            }),
            FeatureSummary::Categorical { frequencies } => WeightedIndex::new(frequencies)
                .map(Sampler::Categorical)
                .map_err(|e| Error::InvalidArgument(format!("bad level frequencies: {e}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let x_bins = stats.discretize(x);

    let n = cfg.n_samples;
    let mut r = rng::seeded(cfg.seed);
    let mut points = Vec::with_capacity(n * d);
    let mut binary = Vec::with_capacity(n * d);
    points.extend_from_slice(x);
    binary.extend(std::iter::repeat_n(1u8, d));
    for _ in 1..n {
        for (j, s) in samplers.iter().enumerate() {
            let v = match s {
                Sampler::Numeric { mean, std, min, max, boundaries } => {
                    let b = r.random_range(0..=boundaries.len());
                    let (lo, hi) = bin_bounds(boundaries, *min, *max, b);
                    sample_in_bin(&mut r, *mean, *std, lo, hi, b == 0)
                }
                Sampler::Categorical(w) => w.sample(&mut r) as f64,
            };
            points.push(v);
            binary.push(u8::from(stats.discretize_value(j, v) == x_bins[j]));
        }
    }

    let ones = vec![1u8; d];
    let mut weights = Vec::with_capacity(n);
    let mut outputs = Vec::with_capacity(n);
    for i in 0..n {
        weights.push(kernel_weight(&ones, &binary[i * d..(i + 1) * d], kernel.sigma));
        outputs.push(model.predict_proba(&points[i * d..(i + 1) * d])?[class]);
    }
    Ok(Neighborhood {
        n_features: d,
        binary,
        points,
        weights,
        outputs,
        explained_class: class,
    })
}
