//! Tabular data: schema, typed rows, CSV I/O, training statistics, splits and
//! the planted-bias generator.

mod csv_io;
mod dataset;
mod schema;
mod split;
mod stats;
mod synth;

pub use csv_io::{load_csv, load_csv_with_schema, write_csv, write_csv_to, KindOverride};
pub use dataset::Dataset;
pub use schema::{Feature, FeatureKind, Schema};
pub use split::{split_train_test, SplitPair, DEFAULT_TRAIN_FRACTION};
pub use stats::{quantile_sorted, FeatureStats, FeatureSummary, DEFAULT_BINS};
pub use synth::{generate_planted_bias, PlantedBiasConfig};
