use crate::data::schema::Schema;
use crate::error::{Error, Result};

/// Typed tabular rows. Feature slots are stored row-major as `f64`
/// (categorical slots hold integer codes); targets are class indices into
/// `schema.class_labels()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    values: Vec<f64>,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(schema: Schema, rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut values = Vec::with_capacity(rows.len() * schema.n_features());
        for (i, row) in rows.iter().enumerate() {
            schema
                .check_row(row)
                .map_err(|e| Error::Data(format!("row {i}: {e}")))?;
            values.extend_from_slice(row);
        }
        Self::from_flat(schema, values, labels)
    }

    pub(crate) fn from_flat(schema: Schema, values: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        let k = schema.n_classes();
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Data(format!("label index {bad} out of range for {k} classes")));
        }
        debug_assert_eq!(values.len(), labels.len() * schema.n_features());
        Ok(Dataset {
            schema,
            values,
            labels,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.schema.n_features()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_features())
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.values[row * self.n_features() + feature]
    }

    /// All values of one feature column, in row order.
    pub fn column(&self, feature: usize) -> Vec<f64> {
        self.rows().map(|r| r[feature]).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.schema.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// New dataset holding the given rows, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let d = self.n_features();
        let mut values = Vec::with_capacity(indices.len() * d);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            schema: self.schema.clone(),
            values,
            labels,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::Feature;

    fn schema() -> Schema {
        Schema::new(
            vec![Feature::numeric("age"), Feature::categorical("g", ["m", "f"])],
            "y",
            vec!["0".into(), "1".into()],
        )
        .unwrap()
    }

    #[test]
    fn rows_and_subset() {
        let ds = Dataset::new(
            schema(),
            vec![vec![30.0, 0.0], vec![40.0, 1.0], vec![50.0, 1.0]],
            vec![0, 1, 1],
        )
        .unwrap();
        assert_eq!(ds.n_rows(), 3);
        assert_eq!(ds.row(1), &[40.0, 1.0]);
        assert_eq!(ds.class_counts(), vec![1, 2]);
        let sub = ds.subset(&[2, 0]);
        assert_eq!(sub.row(0), &[50.0, 1.0]);
        assert_eq!(sub.labels(), &[1, 0]);
        assert_eq!(ds.column(0), vec![30.0, 40.0, 50.0]);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(Dataset::new(schema(), vec![vec![1.0, 5.0]], vec![0]).is_err());
        assert!(Dataset::new(schema(), vec![vec![1.0, 0.0]], vec![2]).is_err());
        assert!(Dataset::new(schema(), vec![vec![1.0, 0.0]], vec![]).is_err());
    }
}
