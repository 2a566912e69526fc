//! Stacking: out-of-fold base-learner probabilities feed a boosted-tree
//! meta-learner whose hyper-parameters are chosen by exhaustive grid search.

use serde::{Deserialize, Serialize};

use super::base::{argmax, fit_portfolio, train_base_learners, BaseLearner, PortfolioConfig};
use super::binning::{BinnedMatrix, MAX_BINS};
use super::folds::{lenient_folds, split_indices};
use super::gbdt::{GbdtModel, GbdtParams};
use super::metrics::{selection_loss, FoldMetrics};
use super::{LearnError, Matrix};
use crate::seed::{derive_seed, STREAM_STACK};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaGrid {
    pub depths: Vec<usize>,
    pub learning_rates: Vec<f64>,
    pub n_trees: Vec<usize>,
}

impl Default for MetaGrid {
    fn default() -> Self {
        Self {
            depths: vec![2, 3, 4],
            learning_rates: vec![0.05, 0.1, 0.3],
            n_trees: vec![50, 150, 300],
        }
    }
}

impl MetaGrid {
    pub fn len(&self) -> usize {
        self.depths.len() * self.learning_rates.len() * self.n_trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Where the meta-learner grid search runs inside an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScope {
    /// Every bag searches the full grid on its own internal folds.
    #[default]
    PerBag,
    /// The first bag searches; the other bags reuse its choice.
    Shared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackConfig {
    pub portfolio: PortfolioConfig,
    pub grid: MetaGrid,
    /// Internal folds used both for out-of-fold meta-features and for
    /// scoring grid points.
    pub internal_folds: usize,
    pub grid_scope: GridScope,
    /// Skips the search and uses these meta-learner settings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_meta: Option<MetaChoice>,
}

impl Default for StackConfig {
    fn default() -> Self {
        Self {
            portfolio: PortfolioConfig::default(),
            grid: MetaGrid::default(),
            internal_folds: 5,
            grid_scope: GridScope::PerBag,
            fixed_meta: None,
        }
    }
}

impl StackConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        if self.internal_folds < 2 {
            return Err(LearnError::BadConfig("internal fold count must be at least 2".into()));
        }
        if self.grid.is_empty() || self.grid.n_trees.contains(&0) || self.grid.depths.contains(&0) {
            return Err(LearnError::BadConfig("meta-learner grid is empty or has zero entries".into()));
        }
        if self.grid.learning_rates.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(LearnError::BadConfig("learning rates must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaChoice {
    pub max_depth: usize,
    pub learning_rate: f64,
    pub n_trees: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackedModel {
    pub n_classes: usize,
    pub base: Vec<BaseLearner>,
    pub meta: GbdtModel,
    pub choice: MetaChoice,
    /// Internal-fold selection score of each base learner on its own.
    pub base_scores: Vec<f64>,
}

impl StackedModel {
    pub fn meta_row(&self, row: &[f64]) -> Vec<f64> {
        self.base.iter().flat_map(|b| b.predict_proba(row)).collect()
    }

    pub fn predict_proba(&self, row: &[f64]) -> Vec<f64> {
        self.meta.predict_proba(&self.meta_row(row))
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        argmax(&self.predict_proba(row))
    }
}

/// Trains base learners and the meta-learner on one bag.
pub fn train_stacked(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    cfg: &StackConfig,
    seed: u64,
) -> Result<StackedModel, LearnError> {
    cfg.validate()?;
    let base = train_base_learners(x, y, n_classes, &cfg.portfolio, derive_seed(seed, &[STREAM_STACK]))?;
    let n = y.len();
    let k = cfg.internal_folds.min(n);
    let assignment = lenient_folds(y, k, derive_seed(seed, &[STREAM_STACK, 1]));
    let splits: Vec<_> = (0..k).map(|f| split_indices(&assignment, f)).collect();
    let n_base = base.len();

    // out-of-fold base-learner probabilities
    let mut meta_x = Matrix::zeros(n, n_base * n_classes);
    let mut base_folds: Vec<Vec<FoldMetrics>> = vec![Vec::new(); n_base];
    for (f, (train, test)) in splits.iter().enumerate() {
        if test.is_empty() {
            continue;
        }
        let xt = x.select_rows(train);
        let yt: Vec<usize> = train.iter().map(|&i| y[i]).collect();
        let learners = fit_portfolio(&xt, &yt, n_classes, &cfg.portfolio, derive_seed(seed, &[STREAM_STACK, 2, f as u64]));
        let truth: Vec<usize> = test.iter().map(|&i| y[i]).collect();
        for (b, learner) in learners.iter().enumerate() {
            let mut pred = Vec::with_capacity(test.len());
            for &i in test {
                let p = learner.predict_proba(x.row(i));
                pred.push(argmax(&p));
                meta_x.row_mut(i)[b * n_classes..(b + 1) * n_classes].copy_from_slice(&p);
            }
            base_folds[b].push(FoldMetrics::evaluate(f, &truth, &pred, n_classes));
        }
    }
    let base_scores = base_folds
        .iter()
        .map(|m| selection_loss(m))
        .collect::<Result<Vec<_>, _>>()?;

    let choice = match cfg.fixed_meta {
        Some(c) => c,
        None => grid_search(&meta_x, y, n_classes, &splits, cfg)?,
    };
    let meta = GbdtModel::fit(
        &meta_x,
        y,
        n_classes,
        &GbdtParams {
            n_rounds: choice.n_trees,
            max_depth: choice.max_depth,
            learning_rate: choice.learning_rate,
            ..cfg.portfolio.gbdt
        },
    );
    Ok(StackedModel {
        n_classes,
        base,
        meta,
        choice,
        base_scores,
    })
}

/// Scores every grid point on the internal folds; ties go to the earliest
/// point in depth, learning-rate, tree-count order.
fn grid_search(
    meta_x: &Matrix,
    y: &[usize],
    n_classes: usize,
    splits: &[(Vec<usize>, Vec<usize>)],
    cfg: &StackConfig,
) -> Result<MetaChoice, LearnError> {
    let mut trees = cfg.grid.n_trees.clone();
    trees.sort_unstable();
    trees.dedup();
    let max_trees = *trees.last().expect("validated grid");
    let mut scores: Vec<Vec<FoldMetrics>> = vec![Vec::new(); cfg.grid.len()];
    for (f, (train, test)) in splits.iter().enumerate() {
        if test.is_empty() {
            continue;
        }
        let mt = meta_x.select_rows(train);
        let yt: Vec<usize> = train.iter().map(|&i| y[i]).collect();
        let mv = meta_x.select_rows(test);
        let truth: Vec<usize> = test.iter().map(|&i| y[i]).collect();
        let binned = BinnedMatrix::fit(&mt, MAX_BINS);
        let mut slot = 0;
        for &depth in &cfg.grid.depths {
            for &lr in &cfg.grid.learning_rates {
                let params = GbdtParams {
                    n_rounds: max_trees,
                    max_depth: depth,
                    learning_rate: lr,
                    ..cfg.portfolio.gbdt
                };
                let model = GbdtModel::fit_binned(&binned, &yt, n_classes, &params);
                let staged = model.staged_proba(&mv, &trees);
                for &t in &cfg.grid.n_trees {
                    let s = trees.binary_search(&t).expect("stage present");
                    let pred: Vec<usize> = (0..mv.rows()).map(|r| argmax(staged[s].row(r))).collect();
                    scores[slot].push(FoldMetrics::evaluate(f, &truth, &pred, n_classes));
                    slot += 1;
                }
            }
        }
    }

    let mut choice: Option<MetaChoice> = None;
    let mut slot = 0;
    for &depth in &cfg.grid.depths {
        for &lr in &cfg.grid.learning_rates {
            for &t in &cfg.grid.n_trees {
                let score = selection_loss(&scores[slot])?;
                slot += 1;
                if choice.is_none_or(|c| score > c.score) {
                    choice = Some(MetaChoice {
                        max_depth: depth,
                        learning_rate: lr,
                        n_trees: t,
                        score,
                    });
                }
            }
        }
    }
    Ok(choice.expect("validated grid"))
}
