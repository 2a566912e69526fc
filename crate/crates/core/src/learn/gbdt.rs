//! Gradient-boosted decision trees with second-order (Newton) leaf values.
//!
//! Two classes use one logistic tree per round; more classes use one tree
//! per class per round under the softmax loss. Trees are grown depth-first on
//! histogram-binned features.

use serde::{Deserialize, Serialize};

use super::binning::{BinnedMatrix, MAX_BINS};
use super::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbdtParams {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub lambda: f64,
    pub min_child_weight: f64,
}

impl Default for GbdtParams {
    fn default() -> Self {
        Self {
            n_rounds: 100,
            max_depth: 3,
            learning_rate: 0.1,
            lambda: 1.0,
            min_child_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RegNode {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegTree {
    pub nodes: Vec<RegNode>,
}

impl RegTree {
    #[inline]
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                RegNode::Leaf(v) => return v,
                RegNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }
}

struct Grower<'a> {
    binned: &'a BinnedMatrix,
    /// Interleaved (gradient, hessian) per row.
    gh: &'a [[f64; 2]],
    params: &'a GbdtParams,
    offsets: Vec<usize>,
    nodes: Vec<RegNode>,
    spare: Vec<Vec<[f64; 2]>>,
}

impl Grower<'_> {
    fn leaf_value(&self, g: f64, h: f64) -> f64 {
        -g / (h + self.params.lambda) * self.params.learning_rate
    }

    fn take_hist(&mut self) -> Vec<[f64; 2]> {
        let total = *self.offsets.last().expect("offsets");
        match self.spare.pop() {
            Some(mut h) => {
                h.fill([0.0; 2]);
                h
            }
            None => vec![[0.0; 2]; total],
        }
    }

    fn build_hist(&mut self, rows: &[u32]) -> Vec<[f64; 2]> {
        let mut hist = self.take_hist();
        for f in 0..self.binned.n_cols() {
            let codes = self.binned.column(f);
            let h = &mut hist[self.offsets[f]..self.offsets[f + 1]];
            for &r in rows {
                let cell = &mut h[codes[r as usize] as usize];
                let v = self.gh[r as usize];
                cell[0] += v[0];
                cell[1] += v[1];
            }
        }
        hist
    }

    fn best_split(&self, hist: &[[f64; 2]], g: f64, h: f64) -> Option<(usize, usize)> {
        let lambda = self.params.lambda;
        let mcw = self.params.min_child_weight;
        let parent_score = g * g / (h + lambda);
        let mut best: Option<(f64, usize, usize)> = None; // (gain, feature, bin)
        for f in 0..self.binned.n_cols() {
            let bins = &hist[self.offsets[f]..self.offsets[f + 1]];
            if bins.len() < 2 {
                continue;
            }
            let (mut gl, mut hl) = (0.0, 0.0);
            for (b, cell) in bins[..bins.len() - 1].iter().enumerate() {
                gl += cell[0];
                hl += cell[1];
                let (gr, hr) = (g - gl, h - hl);
                if hl < mcw || hr < mcw {
                    continue;
                }
                let gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent_score;
                if gain > 1e-12 && best.is_none_or(|(bg, _, _)| gain > bg) {
                    best = Some((gain, f, b));
                }
            }
        }
        best.map(|(_, f, b)| (f, b))
    }

    /// Grows the subtree over `rows`; `hist` is their histogram when the
    /// node may split.
    fn grow(&mut self, rows: &mut [u32], depth: usize, hist: Option<Vec<[f64; 2]>>) -> usize {
        let (g, h) = rows.iter().fold((0.0, 0.0), |(g, h), &r| {
            let v = self.gh[r as usize];
            (g + v[0], h + v[1])
        });
        let id = self.nodes.len();
        self.nodes.push(RegNode::Leaf(self.leaf_value(g, h)));
        let Some(hist) = hist else {
            return id;
        };
        let split = if rows.len() < 2 { None } else { self.best_split(&hist, g, h) };
        let Some((feature, bin)) = split else {
            self.spare.push(hist);
            return id;
        };
        let codes = self.binned.column(feature);
        let mut n_left = 0;
        for i in 0..rows.len() {
            if codes[rows[i] as usize] as usize <= bin {
                rows.swap(i, n_left);
                n_left += 1;
            }
        }
        if n_left == 0 || n_left == rows.len() {
            self.spare.push(hist);
            return id;
        }
        let (left_rows, right_rows) = rows.split_at_mut(n_left);
        let (left_hist, right_hist) = if depth + 1 >= self.params.max_depth {
            self.spare.push(hist);
            (None, None)
        } else {
            // build the smaller child, derive the larger by subtraction
            let left_small = left_rows.len() <= right_rows.len();
            let small = self.build_hist(if left_small { left_rows } else { right_rows });
            let mut large = hist;
            large.iter_mut().zip(&small).for_each(|(a, b)| {
                a[0] -= b[0];
                a[1] -= b[1];
            });
            if left_small {
                (Some(small), Some(large))
            } else {
                (Some(large), Some(small))
            }
        };
        let left = self.grow(left_rows, depth + 1, left_hist);
        let right = self.grow(right_rows, depth + 1, right_hist);
        self.nodes[id] = RegNode::Split {
            feature,
            threshold: self.binned.thresholds[feature][bin],
            left,
            right,
        };
        id
    }
}

fn fit_tree(binned: &BinnedMatrix, gh: &[[f64; 2]], params: &GbdtParams) -> RegTree {
    let mut offsets = vec![0];
    for f in 0..binned.n_cols() {
        offsets.push(offsets[f] + binned.n_bins(f));
    }
    let mut grower = Grower {
        binned,
        gh,
        params,
        offsets,
        nodes: Vec::new(),
        spare: Vec::new(),
    };
    let mut rows: Vec<u32> = (0..binned.n_rows as u32).collect();
    let hist = (params.max_depth > 0).then(|| grower.build_hist(&rows));
    grower.grow(&mut rows, 0, hist);
    RegTree {
        nodes: grower.nodes,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub n_classes: usize,
    pub params: GbdtParams,
    /// One raw score per output (1 for binary, `n_classes` otherwise).
    pub base_score: Vec<f64>,
    /// `rounds[i][j]`: tree for output `j` in round `i`.
    pub rounds: Vec<Vec<RegTree>>,
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    z.iter_mut().for_each(|v| *v /= sum);
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl GbdtModel {
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize, params: &GbdtParams) -> Self {
        let binned = BinnedMatrix::fit(x, MAX_BINS);
        Self::fit_binned(&binned, y, n_classes, params)
    }

    pub fn fit_binned(binned: &BinnedMatrix, y: &[usize], n_classes: usize, params: &GbdtParams) -> Self {
        let n = y.len();
        let outputs = if n_classes == 2 { 1 } else { n_classes };
        let mut counts = vec![0.0; n_classes];
        y.iter().for_each(|&c| counts[c] += 1.0);
        // smoothed class priors
        let prior: Vec<f64> = counts
            .iter()
            .map(|c| (c + 1.0) / (n as f64 + n_classes as f64))
            .collect();
        let base_score: Vec<f64> = if outputs == 1 {
            vec![(prior[1] / prior[0]).ln()]
        } else {
            prior.iter().map(|p| p.ln()).collect()
        };
        let mut raw: Vec<f64> = (0..n).flat_map(|_| base_score.iter().copied()).collect();
        let mut gh = vec![[0.0; 2]; n];
        let mut prob = vec![0.0; outputs];
        let mut rounds = Vec::with_capacity(params.n_rounds);
        let mut grads_all = vec![0.0; n * outputs];
        let mut hess_all = vec![0.0; n * outputs];
        for _ in 0..params.n_rounds {
            for i in 0..n {
                let z = &raw[i * outputs..(i + 1) * outputs];
                if outputs == 1 {
                    let p = sigmoid(z[0]);
                    let t = if y[i] == 1 { 1.0 } else { 0.0 };
                    grads_all[i] = p - t;
                    hess_all[i] = (p * (1.0 - p)).max(1e-16);
                } else {
                    prob.copy_from_slice(z);
                    softmax_in_place(&mut prob);
                    for k in 0..outputs {
                        let t = if y[i] == k { 1.0 } else { 0.0 };
                        grads_all[i * outputs + k] = prob[k] - t;
                        hess_all[i * outputs + k] = (prob[k] * (1.0 - prob[k])).max(1e-16);
                    }
                }
            }
            let mut trees = Vec::with_capacity(outputs);
            for k in 0..outputs {
                for (i, v) in gh.iter_mut().enumerate() {
                    *v = [grads_all[i * outputs + k], hess_all[i * outputs + k]];
                }
                let tree = fit_tree(binned, &gh, params);
                trees.push(tree);
            }
            // update raw scores from the binned training data
            for (k, tree) in trees.iter().enumerate() {
                for i in 0..n {
                    raw[i * outputs + k] += predict_binned(tree, binned, i);
                }
            }
            rounds.push(trees);
        }
        Self {
            n_classes,
            params: *params,
            base_score,
            rounds,
        }
    }

    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }

    /// Raw scores after the first `rounds` boosting rounds.
    pub fn raw_scores(&self, row: &[f64], rounds: usize) -> Vec<f64> {
        let mut z = self.base_score.clone();
        for trees in self.rounds.iter().take(rounds) {
            for (k, t) in trees.iter().enumerate() {
                z[k] += t.predict(row);
            }
        }
        z
    }

    pub fn proba_from_raw(&self, raw: &[f64]) -> Vec<f64> {
        if self.n_classes == 2 {
            let p = sigmoid(raw[0]);
            vec![1.0 - p, p]
        } else {
            let mut z = raw.to_vec();
            softmax_in_place(&mut z);
            z
        }
    }

    pub fn predict_proba(&self, row: &[f64]) -> Vec<f64> {
        self.proba_from_raw(&self.raw_scores(row, self.rounds.len()))
    }

    /// Class probabilities of every row after each of the requested round
    /// counts (ascending). Returns one matrix per stage.
    pub fn staged_proba(&self, x: &Matrix, stages: &[usize]) -> Vec<Matrix> {
        let mut out: Vec<Matrix> = stages.iter().map(|_| Matrix::zeros(x.rows(), self.n_classes)).collect();
        for r in 0..x.rows() {
            let row = x.row(r);
            let mut z = self.base_score.clone();
            let mut done = 0;
            for (s, &stage) in stages.iter().enumerate() {
                for trees in &self.rounds[done..stage.min(self.rounds.len())] {
                    for (k, t) in trees.iter().enumerate() {
                        z[k] += t.predict(row);
                    }
                }
                done = stage.min(self.rounds.len()).max(done);
                out[s].row_mut(r).copy_from_slice(&self.proba_from_raw(&z));
            }
        }
        out
    }
}

fn predict_binned(tree: &RegTree, binned: &BinnedMatrix, row: usize) -> f64 {
    let mut i = 0;
    loop {
        match tree.nodes[i] {
            RegNode::Leaf(v) => return v,
            RegNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let code = binned.column(feature)[row] as usize;
                let t = &binned.thresholds[feature];
                // threshold is t[bin]; code <= bin  <=>  t[code] >= threshold (or code == len)
                let goes_left = code < t.len() && t[code] <= threshold;
                i = if goes_left { left } else { right };
            }
        }
    }
}
