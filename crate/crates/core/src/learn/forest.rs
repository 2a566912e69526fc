//! Random forest of Gini classification trees on binned features.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::binning::{BinnedMatrix, MAX_BINS};
use super::Matrix;
use crate::seed::{rng_for, STREAM_FOREST};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 12,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClassNode {
    /// Sparse class distribution `(class, probability)`.
    Leaf(Vec<(usize, f64)>),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassTree {
    pub nodes: Vec<ClassNode>,
}

impl ClassTree {
    fn leaf(&self, row: &[f64]) -> &[(usize, f64)] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                ClassNode::Leaf(dist) => return dist,
                ClassNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

fn gini_impurity_sum(counts: &[f64], total: f64) -> f64 {
    // total * gini = total - sum(c^2)/total
    if total <= 0.0 {
        return 0.0;
    }
    total - counts.iter().map(|c| c * c).sum::<f64>() / total
}

struct TreeBuilder<'a> {
    binned: &'a BinnedMatrix,
    y: &'a [usize],
    n_classes: usize,
    params: &'a ForestParams,
    mtry: usize,
    nodes: Vec<ClassNode>,
    hist: Vec<f64>,
}

impl TreeBuilder<'_> {
    fn build(&mut self, rows: &mut [u32], depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let k = self.n_classes;
        let mut counts = vec![0.0; k];
        rows.iter().for_each(|&r| counts[self.y[r as usize]] += 1.0);
        let total = rows.len() as f64;
        let id = self.nodes.len();
        let dist: Vec<(usize, f64)> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0.0)
            .map(|(c, &n)| (c, n / total))
            .collect();
        let pure = dist.len() <= 1;
        self.nodes.push(ClassNode::Leaf(dist));
        if pure || depth >= self.params.max_depth || rows.len() < self.params.min_samples_split {
            return id;
        }
        let parent = gini_impurity_sum(&counts, total);
        let features = sample(rng, self.binned.n_cols(), self.mtry).into_vec();
        let mut best: Option<(f64, usize, usize)> = None;
        let mut left = vec![0.0; k];
        for &f in &features {
            let n_bins = self.binned.n_bins(f);
            if n_bins < 2 {
                continue;
            }
            let codes = self.binned.column(f);
            self.hist[..n_bins * k].fill(0.0);
            for &r in rows.iter() {
                self.hist[codes[r as usize] as usize * k + self.y[r as usize]] += 1.0;
            }
            left.fill(0.0);
            let mut n_left = 0.0;
            for b in 0..n_bins - 1 {
                for c in 0..k {
                    left[c] += self.hist[b * k + c];
                }
                n_left += self.hist[b * k..(b + 1) * k].iter().sum::<f64>();
                let n_right = total - n_left;
                if n_left == 0.0 || n_right == 0.0 {
                    continue;
                }
                let (mut sq_left, mut sq_right) = (0.0, 0.0);
                for c in 0..k {
                    sq_left += left[c] * left[c];
                    let rc = counts[c] - left[c];
                    sq_right += rc * rc;
                }
                let child = (n_left - sq_left / n_left) + (n_right - sq_right / n_right);
                let gain = parent - child;
                if gain > 1e-12 && best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, f, b));
                }
            }
        }
        let Some((_, feature, bin)) = best else {
            return id;
        };
        let codes = self.binned.column(feature);
        let mut split = 0;
        for i in 0..rows.len() {
            if codes[rows[i] as usize] as usize <= bin {
                rows.swap(i, split);
                split += 1;
            }
        }
        let (l, r) = rows.split_at_mut(split);
        let left_id = self.build(l, depth + 1, rng);
        let right_id = self.build(r, depth + 1, rng);
        self.nodes[id] = ClassNode::Split {
            feature,
            threshold: self.binned.thresholds[feature][bin],
            left: left_id,
            right: right_id,
        };
        id
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub n_classes: usize,
    pub trees: Vec<ClassTree>,
}

impl ForestModel {
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize, params: &ForestParams, seed: u64) -> Self {
        let binned = BinnedMatrix::fit(x, MAX_BINS);
        let n = y.len();
        let mtry = ((x.cols() as f64).sqrt().round() as usize).clamp(1, x.cols().max(1));
        let trees = (0..params.n_trees)
            .map(|t| {
                let mut rng = rng_for(seed, &[STREAM_FOREST, t as u64]);
                let mut rows: Vec<u32> = (0..n).map(|_| rng.random_range(0..n as u32)).collect();
                let mut builder = TreeBuilder {
                    binned: &binned,
                    y,
                    n_classes,
                    params,
                    mtry,
                    nodes: Vec::new(),
                    hist: vec![0.0; 256 * n_classes],
                };
                builder.build(&mut rows, 0, &mut rng);
                ClassTree {
                    nodes: builder.nodes,
                }
            })
            .collect();
        Self { n_classes, trees }
    }

    pub fn predict_proba(&self, row: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n_classes];
        for t in &self.trees {
            for &(c, v) in t.leaf(row) {
                p[c] += v;
            }
        }
        let n = self.trees.len() as f64;
        p.iter_mut().for_each(|v| *v /= n);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forest_learns_bands_and_sums_to_one() {
        let x = Matrix::new(90, 2, (0..180).map(|v| f64::from(v % 90)).collect());
        let y: Vec<usize> = (0..90).map(|i| (2 * i % 90) / 30).collect();
        let m = ForestModel::fit(&x, &y, 3, &ForestParams::default(), 1);
        let mut correct = 0;
        for r in 0..90 {
            let p = m.predict_proba(x.row(r));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let arg = p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            correct += usize::from(arg == y[r]);
        }
        assert!(correct >= 85, "{correct}");
    }

    #[test]
    fn seeded_forest_is_deterministic() {
        let x = Matrix::new(40, 1, (0..40).map(f64::from).collect());
        let y: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let a = ForestModel::fit(&x, &y, 2, &ForestParams::default(), 5);
        let b = ForestModel::fit(&x, &y, 2, &ForestParams::default(), 5);
        assert_eq!(a, b);
    }
}
