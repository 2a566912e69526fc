//! The fixed portfolio of three heterogeneous base learners.

use serde::{Deserialize, Serialize};

use super::forest::{ForestModel, ForestParams};
use super::gbdt::{GbdtModel, GbdtParams};
use super::logistic::{LogisticModel, LogisticParams};
use super::{LearnError, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PortfolioConfig {
    pub gbdt: GbdtParams,
    pub forest: ForestParams,
    pub logistic: LogisticParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseLearner {
    Gbdt(GbdtModel),
    Forest(ForestModel),
    Logistic(LogisticModel),
}

impl BaseLearner {
    pub fn name(&self) -> &'static str {
        match self {
            BaseLearner::Gbdt(_) => "gbdt",
            BaseLearner::Forest(_) => "random_forest",
            BaseLearner::Logistic(_) => "logistic",
        }
    }

    pub fn predict_proba(&self, row: &[f64]) -> Vec<f64> {
        match self {
            BaseLearner::Gbdt(m) => m.predict_proba(row),
            BaseLearner::Forest(m) => m.predict_proba(row),
            BaseLearner::Logistic(m) => m.predict_proba(row),
        }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        argmax(&self.predict_proba(row))
    }
}

/// Index of the largest value; the first one on ties.
pub(crate) fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn fit_portfolio(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    cfg: &PortfolioConfig,
    seed: u64,
) -> Vec<BaseLearner> {
    vec![
        BaseLearner::Gbdt(GbdtModel::fit(x, y, n_classes, &cfg.gbdt)),
        BaseLearner::Forest(ForestModel::fit(x, y, n_classes, &cfg.forest, seed)),
        BaseLearner::Logistic(LogisticModel::fit(x, y, n_classes, &cfg.logistic)),
    ]
}

/// Fits boosted trees, a random forest and multinomial logistic regression
/// on one bag, in that order.
pub fn train_base_learners(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    cfg: &PortfolioConfig,
    seed: u64,
) -> Result<Vec<BaseLearner>, LearnError> {
    if x.rows() != y.len() {
        return Err(LearnError::BadConfig("row and label counts differ".into()));
    }
    match y.first() {
        Some(&first) if y.iter().any(|&c| c != first) => {}
        _ => return Err(LearnError::DegenerateBag),
    }
    Ok(fit_portfolio(x, y, n_classes, cfg, seed))
}
