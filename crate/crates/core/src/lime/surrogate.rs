//! Weighted ridge regression by the closed-form normal equations.
//!
//! Minimizes `Σ w_i (y_i − b − x_iᵀβ)² + λ‖β‖²` with the intercept `b`
//! unpenalized, solving the `(d+1)×(d+1)` system by Gaussian elimination
//! with partial pivoting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// `1 − weighted SSE / weighted total sum of squares`.
    pub local_r2: f64,
    /// Standard error of each coefficient estimate, from `σ̂²·A⁻¹`.
    pub std_errors: Vec<f64>,
}

/// LU factorization with partial pivoting of a small dense matrix.
struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<f64>, n: usize) -> Option<Lu> {
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }
        let tiny = scale * 1e-13;
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (piv, best) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= tiny {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(col * n + c, piv * n + c);
                }
                perm.swap(col, piv);
            }
            let p = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                a[r * n + col] = f;
                for c in col + 1..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
            }
        }
        Some(Lu { n, a, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                x[r] -= self.a[r * n + c] * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] -= self.a[r * n + c] * x[c];
            }
            x[r] /= self.a[r * n + r];
        }
        x
    }
}

/// Fits the weighted ridge model on a row-major `n × d` design.
pub fn weighted_ridge(x: &[f64], y: &[f64], w: &[f64], d: usize, lambda: f64) -> Result<SurrogateFit> {
    let n = y.len();
    assert_eq!(x.len(), n * d);
    assert_eq!(w.len(), n);
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("ridge lambda must be >= 0, got {lambda}")));
    }
    let positive = w.iter().filter(|&&v| v > 0.0).count();
    if positive < d + 1 {
        return Err(Error::DegenerateNeighborhood(format!(
            "{positive} positively weighted points for {} unknowns",
            d + 1
        )));
    }
    let m = d + 1;
    let mut a = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    let mut z = vec![0.0; m];
    for i in 0..n {
        let wi = w[i];
        if wi == 0.0 {
            continue;
        }
        z[0] = 1.0;
        z[1..].copy_from_slice(&x[i * d..(i + 1) * d]);
        for r in 0..m {
            let wr = wi * z[r];
            rhs[r] += wr * y[i];
            for c in r..m {
                a[r * m + c] += wr * z[c];
            }
        }
    }
    for r in 0..m {
        for c in 0..r {
            a[r * m + c] = a[c * m + r];
        }
    }
    for j in 1..m {
        a[j * m + j] += lambda;
    }
    let lu = Lu::factor(a, m).ok_or_else(|| {
        Error::DegenerateNeighborhood(format!(
            "normal equations are singular (lambda = {lambda}); some interpretable slot is constant or collinear"
        ))
    })?;
    let theta = lu.solve(&rhs);

    let wsum: f64 = w.iter().sum();
    let ymean = w.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / wsum;
    let (mut sse, mut sst) = (0.0, 0.0);
    for i in 0..n {
        let pred = theta[0] + x[i * d..(i + 1) * d].iter().zip(&theta[1..]).map(|(a, b)| a * b).sum::<f64>();
        sse += w[i] * (y[i] - pred).powi(2);
        sst += w[i] * (y[i] - ymean).powi(2);
    }
    let local_r2 = if sst > 0.0 { 1.0 - sse / sst } else if sse <= 1e-24 { 1.0 } else { f64::NEG_INFINITY };

    let dof = positive as f64 - m as f64;
    let sigma2 = if dof > 0.0 { sse / dof } else { 0.0 };
    let std_errors = (1..m)
        .map(|j| {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            (sigma2 * lu.solve(&e)[j]).max(0.0).sqrt()
        })
        .collect();

    Ok(SurrogateFit {
        coefficients: theta[1..].to_vec(),
        intercept: theta[0],
        local_r2,
        std_errors,
    })
}
