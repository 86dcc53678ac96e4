use rand::seq::SliceRandom;

use crate::data::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    /// Source row indices, in split order.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
}

/// Per-class training count: nearest integer to `fraction·n`, halves going to
/// train, clamped so both sides keep at least one row.
fn train_count(n: usize, fraction: f64) -> usize {
    let raw = (fraction * n as f64 + 0.5 + 1e-9).floor() as usize;
    raw.clamp(1, n - 1)
}

/// Stratified train/test split, deterministic for a fixed seed.
pub fn split_train_test(data: &Dataset, fraction: f64, seed: u64) -> Result<SplitPair> {
    if data.n_rows() < 10 {
        return Err(Error::Data(format!(
            "need at least 10 rows to split, got {}",
            data.n_rows()
        )));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "split fraction must be in (0, 1), got {fraction}"
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); data.schema().n_classes()];
    for (i, &l) in data.labels().iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = rng::seeded(seed);
    let mut train_indices = Vec::new();
    let mut test_indices = Vec::new();
    for (class, mut idx) in by_class.into_iter().enumerate() {
        if idx.is_empty() {
            continue;
        }
        if idx.len() < 2 {
            return Err(Error::Data(format!(
                "class `{}` has {} row(s); stratified split needs at least 2",
                data.schema().class_labels()[class],
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        let k = train_count(idx.len(), fraction);
        train_indices.extend_from_slice(&idx[..k]);
        test_indices.extend_from_slice(&idx[k..]);
    }
    train_indices.shuffle(&mut rng);
    test_indices.shuffle(&mut rng);
    Ok(SplitPair {
        train: data.subset(&train_indices),
        test: data.subset(&test_indices),
        train_indices,
        test_indices,
        seed,
    })
}
