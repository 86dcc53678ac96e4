//! L2-regularized logistic regression fit by batch gradient descent on
//! internally standardized inputs. Categorical features are one-hot encoded.
//! More than two classes are handled one-vs-rest.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureKind, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub l2: f64,
    pub learning_rate: f64,
    pub max_iter: usize,
    pub tolerance: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2: 1.0,
            learning_rate: 0.1,
            max_iter: 1000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Column {
    Numeric { feature: usize },
    Indicator { feature: usize, code: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    columns: Vec<Column>,
    means: Vec<f64>,
    scales: Vec<f64>,
    /// One `(bias, weights)` per binary problem: a single problem for the
    /// positive class index 1 when there are two classes, else one per class.
    coefficients: Vec<(f64, Vec<f64>)>,
    n_classes: usize,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Regularized mean log-loss and its gradient.
///
/// `theta = [bias, w_1..w_p]`, `x` is row-major `n × p`, `y ∈ {0, 1}`.
/// `L = (1/n) Σ [softplus(z_i) − y_i z_i] + (l2 / 2n) ‖w‖²`, bias unpenalized.
pub fn loss_and_gradient(theta: &[f64], x: &[f64], y: &[f64], l2: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    let p = theta.len() - 1;
    let nf = n as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; p + 1];
    for (i, &yi) in y.iter().enumerate() {
        let row = &x[i * p..(i + 1) * p];
        let z = theta[0] + row.iter().zip(&theta[1..]).map(|(a, b)| a * b).sum::<f64>();
        loss += softplus(z) - yi * z;
        let r = sigmoid(z) - yi;
        grad[0] += r;
        for (g, &xv) in grad[1..].iter_mut().zip(row) {
            *g += r * xv;
        }
    }
    let penalty: f64 = theta[1..].iter().map(|w| w * w).sum();
    loss = loss / nf + l2 / (2.0 * nf) * penalty;
    grad[0] /= nf;
    for (g, &w) in grad[1..].iter_mut().zip(&theta[1..]) {
        *g = *g / nf + l2 / nf * w;
    }
    (loss, grad)
}

fn columns_for(schema: &Schema, active: &[usize]) -> Vec<Column> {
    let mut cols = Vec::new();
    for &j in active {
        match &schema.feature(j).kind {
            FeatureKind::Numeric => cols.push(Column::Numeric { feature: j }),
            FeatureKind::Categorical { levels } => {
                cols.extend((0..levels.len()).map(|c| Column::Indicator {
                    feature: j,
                    code: c as u32,
                }))
            }
        }
    }
    cols
}

fn raw_value(col: &Column, row: &[f64]) -> f64 {
    match *col {
        Column::Numeric { feature } => row[feature],
        Column::Indicator { feature, code } => f64::from(u8::from(row[feature] as u32 == code)),
    }
}

impl LogisticModel {
    pub(crate) fn fit(data: &Dataset, active: &[usize], params: &LogisticParams) -> LogisticModel {
        let columns = columns_for(data.schema(), active);
        let n = data.n_rows();
        let p = columns.len();
        let mut design = Vec::with_capacity(n * p);
        for row in data.rows() {
            design.extend(columns.iter().map(|c| raw_value(c, row)));
        }
        let mut means = vec![0.0; p];
        let mut scales = vec![0.0; p];
        for c in 0..p {
            let m = (0..n).map(|i| design[i * p + c]).sum::<f64>() / n as f64;
            let var = (0..n).map(|i| (design[i * p + c] - m).powi(2)).sum::<f64>() / n as f64;
            means[c] = m;
            scales[c] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        for i in 0..n {
            for c in 0..p {
                design[i * p + c] = (design[i * p + c] - means[c]) / scales[c];
            }
        }
        let k = data.schema().n_classes();
        let positives: Vec<usize> = if k == 2 { vec![1] } else { (0..k).collect() };
        let coefficients = positives
            .into_iter()
            .map(|pos| {
                let y: Vec<f64> = data.labels().iter().map(|&l| f64::from(u8::from(l == pos))).collect();
                let theta = gradient_descent(&design, &y, p, params);
                (theta[0], theta[1..].to_vec())
            })
            .collect();
        LogisticModel {
            columns,
            means,
            scales,
            coefficients,
            n_classes: k,
        }
    }

    /// A model with explicit coefficients over standardized-identity columns,
    /// one column per listed numeric feature.
    pub fn from_coefficients(features: &[usize], coefficients: Vec<(f64, Vec<f64>)>, n_classes: usize) -> Self {
        let columns: Vec<Column> = features.iter().map(|&feature| Column::Numeric { feature }).collect();
        let p = columns.len();
        assert!(coefficients.iter().all(|(_, w)| w.len() == p));
        assert_eq!(coefficients.len(), if n_classes == 2 { 1 } else { n_classes });
        LogisticModel {
            columns,
            means: vec![0.0; p],
            scales: vec![1.0; p],
            coefficients,
            n_classes,
        }
    }

    pub fn coefficients(&self) -> &[(f64, Vec<f64>)] {
        &self.coefficients
    }

    pub fn predict_proba(&self, row: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = self
            .columns
            .iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(c, (m, s))| (raw_value(c, row) - m) / s)
            .collect();
        let score = |(b, w): &(f64, Vec<f64>)| sigmoid(b + w.iter().zip(&z).map(|(a, x)| a * x).sum::<f64>());
        if self.n_classes == 2 {
            let p1 = score(&self.coefficients[0]);
            vec![1.0 - p1, p1]
        } else {
            let raw: Vec<f64> = self.coefficients.iter().map(score).collect();
            let total: f64 = raw.iter().sum();
            if total > 0.0 {
                raw.into_iter().map(|v| v / total).collect()
            } else {
                vec![1.0 / self.n_classes as f64; self.n_classes]
            }
        }
    }
}

fn gradient_descent(x: &[f64], y: &[f64], p: usize, params: &LogisticParams) -> Vec<f64> {
    let mut theta = vec![0.0; p + 1];
    let mut prev = f64::INFINITY;
    for _ in 0..params.max_iter {
        let (loss, grad) = loss_and_gradient(&theta, x, y, params.l2);
        if (prev - loss).abs() < params.tolerance {
            break;
        }
        prev = loss;
        for (t, g) in theta.iter_mut().zip(grad) {
            *t -= params.learning_rate * g;
        }
    }
    theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Feature;
    use crate::rng;
    use rand::Rng;

    #[test]
    fn zero_weights_give_even_odds() {
        let m = LogisticModel::from_coefficients(&[0, 1], vec![(0.0, vec![0.0, 0.0])], 2);
        assert_eq!(m.predict_proba(&[3.0, -7.0]), vec![0.5, 0.5]);
    }

    #[test]
    fn separable_points_reach_full_training_accuracy() {
        // class 1 iff a > b: the line a = b separates them with margin
        let schema = Schema::new(
            vec![Feature::numeric("a"), Feature::numeric("b")],
            "y",
            vec!["0".into(), "1".into()],
        )
        .unwrap();
        let rows = vec![vec![0.0, 1.0], vec![1.0, 3.0], vec![1.0, 0.0], vec![3.0, 1.0]];
        let ds = Dataset::new(schema, rows, vec![0, 0, 1, 1]).unwrap();
        let params = LogisticParams {
            max_iter: 500,
            ..Default::default()
        };
        let m = LogisticModel::fit(&ds, &[0, 1], &params);
        for i in 0..4 {
            let p = m.predict_proba(ds.row(i));
            assert!(p[ds.label(i)] > 0.5, "row {i}: {p:?}");
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut r = rng::seeded(17);
        let (n, p) = (12, 3);
        let x: Vec<f64> = (0..n * p).map(|_| r.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| f64::from(u8::from(r.random_bool(0.5)))).collect();
        for _ in 0..20 {
            let theta: Vec<f64> = (0..=p).map(|_| r.random_range(-1.5..1.5)).collect();
            let (_, g) = loss_and_gradient(&theta, &x, &y, 1.0);
            for k in 0..=p {
                let h = 1e-5;
                let mut tp = theta.clone();
                let mut tm = theta.clone();
                tp[k] += h;
                tm[k] -= h;
                let fd = (loss_and_gradient(&tp, &x, &y, 1.0).0 - loss_and_gradient(&tm, &x, &y, 1.0).0) / (2.0 * h);
                let rel = (fd - g[k]).abs() / g[k].abs().max(fd.abs()).max(1e-8);
                assert!(rel < 1e-5, "component {k}: analytic {} vs fd {fd}", g[k]);
            }
        }
    }

    #[test]
    fn one_vs_rest_normalizes() {
        let m = LogisticModel::from_coefficients(
            &[0],
            vec![(0.0, vec![1.0]), (0.5, vec![-1.0]), (-0.5, vec![0.2])],
            3,
        );
        let p = m.predict_proba(&[0.7]);
        assert_eq!(p.len(), 3);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
