//! The explainable classifier: stratified folds, a portfolio of three
//! heterogeneous base learners stacked under a grid-searched boosted-tree
//! meta-learner, bagged with majority vote, plus metrics and
//! cross-validation.

pub mod bags;
mod base;
mod binning;
mod cv;
mod dataset;
mod ensemble;
pub mod folds;
pub mod forest;
pub mod gbdt;
pub mod logistic;
mod matrix;
pub mod metrics;
mod stack;

pub use bags::subsample_bags;
pub use base::{train_base_learners, BaseLearner, PortfolioConfig};
pub use cv::{cross_validate, fold_seed, holdout_evaluate, run_fold, CvReport, FoldReport, HoldoutReport, SplitScores, REPORT_SCHEMA};
pub use dataset::{Dataset, Subset, Target, TaskSpec};
pub use ensemble::{resolve_vote, train_ensemble, CvConfig, EnsembleModel, Vote, MODEL_FORMAT};
pub use folds::stratified_folds;
pub use matrix::Matrix;
pub use metrics::{selection_loss, FoldMetrics, MeanStd};
pub use stack::{train_stacked, GridScope, MetaChoice, MetaGrid, StackConfig, StackedModel};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("class {class:?} has {count} members, fewer than k = {k}")]
    ClassTooSmall { class: String, count: usize, k: usize },
    #[error("fold count k = {0} must be at least 2")]
    BadK(usize),
    #[error("cannot cover each of {n} rows {min_inclusion} times with {r} bags of {bag_size}")]
    InfeasibleCoverage {
        min_inclusion: usize,
        r: usize,
        bag_size: usize,
        n: usize,
    },
    #[error("training bag contains a single class")]
    DegenerateBag,
    #[error("no fold metrics to score")]
    EmptyMetrics,
    #[error("feature mismatch: {0}")]
    FeatureMismatch(String),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
