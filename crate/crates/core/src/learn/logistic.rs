//! L2-regularised multinomial logistic regression on standardised features,
//! fitted by accelerated (Nesterov) gradient descent with a fixed step of
//! 1 / L, where L bounds the curvature of the softmax loss.

use serde::{Deserialize, Serialize};

use super::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// Penalty weight on `0.5 * ||W||^2` (bias excluded).
    pub l2: f64,
    pub iterations: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            l2: 1e-2,
            iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub n_classes: usize,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// `n_classes x (n_features + 1)`, bias last.
    pub weights: Matrix,
}

fn softmax_scores(w: &Matrix, z: &[f64], out: &mut [f64]) {
    let m = z.len();
    for (k, o) in out.iter_mut().enumerate() {
        let row = w.row(k);
        *o = row[m] + row[..m].iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
    }
    let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        sum += *o;
    }
    out.iter_mut().for_each(|o| *o /= sum);
}

impl LogisticModel {
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize, params: &LogisticParams) -> Self {
        let (n, m) = (x.rows(), x.cols());
        let means: Vec<f64> = (0..m).map(|c| x.column(c).iter().sum::<f64>() / n as f64).collect();
        let scales: Vec<f64> = (0..m)
            .map(|c| {
                let var = x.column(c).iter().map(|v| (v - means[c]).powi(2)).sum::<f64>() / n as f64;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let z: Vec<f64> = (0..n)
            .flat_map(|r| {
                let row = x.row(r);
                (0..m).map(|c| (row[c] - means[c]) / scales[c]).collect::<Vec<_>>()
            })
            .collect();
        let z = Matrix::new(n, m, z);

        let width = m + 1;
        let lipschitz = 0.5 * (m as f64 + 1.0) + params.l2;
        let step = 1.0 / lipschitz;
        let mut w = Matrix::zeros(n_classes, width);
        let mut w_prev = w.clone();
        let mut look = w.clone();
        let mut grad = Matrix::zeros(n_classes, width);
        let mut p = vec![0.0; n_classes];
        for it in 0..params.iterations {
            let momentum = it as f64 / (it as f64 + 3.0);
            for k in 0..n_classes {
                for j in 0..width {
                    let v = w.get(k, j) + momentum * (w.get(k, j) - w_prev.get(k, j));
                    look.set(k, j, v);
                }
            }
            grad = Matrix::zeros(grad.rows(), grad.cols());
            for r in 0..n {
                let zr = z.row(r);
                softmax_scores(&look, zr, &mut p);
                for k in 0..n_classes {
                    let e = (p[k] - if y[r] == k { 1.0 } else { 0.0 }) / n as f64;
                    let g = grad.row_mut(k);
                    for j in 0..m {
                        g[j] += e * zr[j];
                    }
                    g[m] += e;
                }
            }
            w_prev = w.clone();
            for k in 0..n_classes {
                for j in 0..width {
                    let penalty = if j < m { params.l2 * look.get(k, j) } else { 0.0 };
                    w.set(k, j, look.get(k, j) - step * (grad.get(k, j) + penalty));
                }
            }
        }
        Self {
            n_classes,
            means,
            scales,
            weights: w,
        }
    }

    pub fn predict_proba(&self, row: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = row
            .iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(v, (mu, s))| (v - mu) / s)
            .collect();
        let mut p = vec![0.0; self.n_classes];
        softmax_scores(&self.weights, &z, &mut p);
        p
    }
}
