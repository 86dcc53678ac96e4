//! Per-feature training statistics consumed by the perturbation sampler.

use serde::{Deserialize, Serialize};

use crate::data::dataset::Dataset;
use crate::data::schema::FeatureKind;
use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureSummary {
    Categorical {
        /// Empirical probability of each code, indexed by code.
        frequencies: Vec<f64>,
    },
    Numeric {
        mean: f64,
        /// Population standard deviation.
        std: f64,
        min: f64,
        max: f64,
        /// The `bins - 1` interior quantile cut points, nondecreasing.
        boundaries: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    bins: usize,
    features: Vec<FeatureSummary>,
}

/// Quantile of sorted data by linear interpolation at fractional rank `q·(n−1)`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

impl FeatureStats {
    pub fn compute(train: &Dataset, bins: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::InvalidArgument("cannot compute statistics on an empty dataset".into()));
        }
        if bins < 2 {
            return Err(Error::InvalidArgument(format!("bin count must be >= 2, got {bins}")));
        }
        let n = train.n_rows() as f64;
        let features = train
            .schema()
            .features()
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let col = train.column(j);
                match &f.kind {
                    FeatureKind::Categorical { levels } => {
                        let mut counts = vec![0usize; levels.len()];
                        for v in col {
                            counts[v as usize] += 1;
                        }
                        FeatureSummary::Categorical {
                            frequencies: counts.into_iter().map(|c| c as f64 / n).collect(),
                        }
                    }
                    FeatureKind::Numeric => {
                        let mean = col.iter().sum::<f64>() / n;
                        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                        let mut sorted = col;
                        sorted.sort_by(f64::total_cmp);
                        let boundaries = (1..bins)
                            .map(|k| quantile_sorted(&sorted, k as f64 / bins as f64))
                            .collect();
                        FeatureSummary::Numeric {
                            mean,
                            std: var.sqrt(),
                            min: sorted[0],
                            max: sorted[sorted.len() - 1],
                            boundaries,
                        }
                    }
                }
            })
            .collect();
        Ok(FeatureStats { bins, features })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn feature(&self, j: usize) -> &FeatureSummary {
        &self.features[j]
    }

    pub fn features(&self) -> &[FeatureSummary] {
        &self.features
    }

    /// Bin (numeric) or code (categorical) of one value. Numeric bins are
    /// right-closed: `v <= boundaries[j]` lands in bin `j`; values above every
    /// boundary land in the last bin.
    pub fn discretize_value(&self, feature: usize, v: f64) -> usize {
        match &self.features[feature] {
            FeatureSummary::Categorical { .. } => v as usize,
            FeatureSummary::Numeric { boundaries, .. } => boundaries
                .iter()
                .position(|&b| v <= b)
                .unwrap_or(boundaries.len()),
        }
    }

    pub fn discretize(&self, row: &[f64]) -> Vec<usize> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| self.discretize_value(j, v))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::{Feature, Schema};
    use proptest::prelude::*;

    fn numeric_ds(values: &[f64]) -> Dataset {
        let schema = Schema::new(vec![Feature::numeric("x")], "y", vec!["a".into(), "b".into()]).unwrap();
        let rows = values.iter().map(|&v| vec![v]).collect();
        let labels = (0..values.len()).map(|i| i % 2).collect();
        Dataset::new(schema, rows, labels).unwrap()
    }

    #[test]
    fn quartile_boundaries_by_rank_interpolation() {
        // q·(n−1) for n = 8: ranks 1.75, 3.5, 5.25 → 2.75, 4.5, 6.25
        let ds = numeric_ds(&[8.0, 1.0, 7.0, 2.0, 6.0, 3.0, 5.0, 4.0]);
        let st = FeatureStats::compute(&ds, 4).unwrap();
        match st.feature(0) {
            FeatureSummary::Numeric { boundaries, mean, .. } => {
                assert_eq!(boundaries, &vec![2.75, 4.5, 6.25]);
                assert_eq!(*mean, 4.5);
            }
            _ => unreachable!(),
        }
        assert_eq!(st.discretize_value(0, 4.5), 1);
        assert_eq!(st.discretize_value(0, -10.0), 0);
        assert_eq!(st.discretize_value(0, 2.75), 0);
        assert_eq!(st.discretize_value(0, 6.26), 3);
    }

    #[test]
    fn constant_feature() {
        let ds = numeric_ds(&[5.0; 6]);
        let st = FeatureStats::compute(&ds, 4).unwrap();
        assert_eq!(
            st.feature(0),
            &FeatureSummary::Numeric {
                mean: 5.0,
                std: 0.0,
                min: 5.0,
                max: 5.0,
                boundaries: vec![5.0, 5.0, 5.0]
            }
        );
    }

    #[test]
    fn categorical_frequencies_and_identity_discretization() {
        let schema = Schema::new(
            vec![Feature::categorical("g", ["a", "b", "c"])],
            "y",
            vec!["0".into(), "1".into()],
        )
        .unwrap();
        let ds = Dataset::new(
            schema,
            vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0]],
            vec![0, 1, 0, 1],
        )
        .unwrap();
        let st = FeatureStats::compute(&ds, 4).unwrap();
        assert_eq!(
            st.feature(0),
            &FeatureSummary::Categorical {
                frequencies: vec![0.5, 0.5, 0.0]
            }
        );
        assert_eq!(st.discretize(&[2.0]), vec![2]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let ds = numeric_ds(&[1.0, 2.0]);
        assert!(FeatureStats::compute(&ds, 1).is_err());
        assert!(FeatureStats::compute(&ds.subset(&[]), 4).is_err());
    }

    proptest! {
        #[test]
        fn discretize_is_total_and_in_range(
            values in proptest::collection::vec(-1e6f64..1e6, 1..60),
            probe in proptest::num::f64::NORMAL,
            bins in 2usize..8,
        ) {
            let st = FeatureStats::compute(&numeric_ds(&values), bins).unwrap();
            if let FeatureSummary::Numeric { boundaries, .. } = st.feature(0) {
                prop_assert!(boundaries.windows(2).all(|w| w[0] <= w[1]));
            }
            prop_assert!(st.discretize_value(0, probe) < bins);
        }

        #[test]
        fn distinct_values_fill_bins_evenly(n in 8usize..300, bins in 2usize..7, shift in -50.0f64..50.0) {
            let values: Vec<f64> = (0..n).map(|i| shift + (i as f64 * 7919.0) % n as f64).collect();
            let st = FeatureStats::compute(&numeric_ds(&values), bins).unwrap();
            let mut occ = vec![0usize; bins];
            for &v in &values {
                occ[st.discretize_value(0, v)] += 1;
            }
            let ideal = n as f64 / bins as f64;
            for o in occ {
                prop_assert!((o as f64 - ideal).abs() <= 2.0, "occupancy {o} vs {ideal}");
            }
        }

        #[test]
        fn categorical_frequencies_sum_to_one(codes in proptest::collection::vec(0usize..5, 1..100)) {
            let schema = Schema::new(
                vec![Feature::categorical("g", ["a", "b", "c", "d", "e"])],
                "y",
                vec!["0".into(), "1".into()],
            ).unwrap();
            let rows = codes.iter().map(|&c| vec![c as f64]).collect();
            let labels = vec![0; codes.len()];
            let st = FeatureStats::compute(&Dataset::new(schema, rows, labels).unwrap(), 4).unwrap();
            if let FeatureSummary::Categorical { frequencies } = st.feature(0) {
                prop_assert!((frequencies.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }
}
