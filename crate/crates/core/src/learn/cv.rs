//! Stratified k-fold cross-validation of the bagged ensemble, and a single
//! stratified 80/20 hold-out split.

use serde::{Deserialize, Serialize};

use super::ensemble::{train_ensemble, CvConfig, EnsembleModel};
use super::folds::{split_indices, stratified_folds};
use super::metrics::{accuracy, confusion_matrix, macro_f1_from_confusion, MeanStd};
use super::stack::StackConfig;
use super::{Dataset, LearnError};
use crate::seed::{derive_seed, STREAM_CV_FOLD, STREAM_HOLDOUT};

pub const REPORT_SCHEMA: &str = "cowvox-cv-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitScores {
    pub accuracy: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub train: SplitScores,
    pub test: SplitScores,
    /// Rows are true classes, columns predicted classes.
    pub confusion: Vec<Vec<usize>>,
}

/// Result of a cross-validation run. The same schema is shared by every
/// model family so reports can be compared directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub schema: String,
    pub model: String,
    pub task: String,
    pub classes: Vec<String>,
    pub n_samples: usize,
    pub k: usize,
    pub seed: u64,
    /// Ensemble settings; absent for models without bagging.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<CvConfig>,
    pub fold_assignment: Vec<usize>,
    pub folds: Vec<FoldReport>,
    pub train_accuracy: MeanStd,
    pub test_accuracy: MeanStd,
    pub train_f1: MeanStd,
    pub test_f1: MeanStd,
}

impl CvReport {
    /// Assembles a report from per-fold results.
    pub fn from_folds(
        model: &str,
        task: &str,
        classes: Vec<String>,
        seed: u64,
        fold_assignment: Vec<usize>,
        folds: Vec<FoldReport>,
    ) -> Self {
        let col = |f: fn(&FoldReport) -> f64| MeanStd::of(&folds.iter().map(f).collect::<Vec<_>>());
        Self {
            schema: REPORT_SCHEMA.into(),
            model: model.into(),
            task: task.into(),
            classes,
            n_samples: fold_assignment.len(),
            k: folds.len(),
            seed,
            ensemble: None,
            train_accuracy: col(|f| f.train.accuracy),
            test_accuracy: col(|f| f.test.accuracy),
            train_f1: col(|f| f.train.f1),
            test_f1: col(|f| f.test.f1),
            fold_assignment,
            folds,
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} k={} test accuracy {:.1} ± {:.1}% (train {:.1} ± {:.1}%), macro-F1 {:.3} ± {:.3}",
            self.task,
            self.k,
            100.0 * self.test_accuracy.mean,
            100.0 * self.test_accuracy.std,
            100.0 * self.train_accuracy.mean,
            100.0 * self.train_accuracy.std,
            self.test_f1.mean,
            self.test_f1.std,
        )
    }
}

fn scores(model: &EnsembleModel, data: &Dataset, rows: &[usize]) -> Result<(SplitScores, Vec<Vec<usize>>), LearnError> {
    let part = data.subset(rows);
    let pred = model.predict_dataset(&part)?;
    let confusion = confusion_matrix(&part.y, &pred, data.n_classes());
    Ok((
        SplitScores {
            accuracy: accuracy(&part.y, &pred),
            f1: macro_f1_from_confusion(&confusion),
        },
        confusion,
    ))
}

/// Seed of the ensemble trained for fold `f`.
pub fn fold_seed(seed: u64, f: usize) -> u64 {
    derive_seed(seed, &[STREAM_CV_FOLD, f as u64])
}

/// Trains and scores the ensemble of fold `f` of `assignment`.
pub fn run_fold(
    data: &Dataset,
    assignment: &[usize],
    f: usize,
    cfg: &CvConfig,
    stack: &StackConfig,
) -> Result<(EnsembleModel, FoldReport), LearnError> {
    let (train, test) = split_indices(assignment, f);
    let fold_cfg = CvConfig {
        seed: fold_seed(cfg.seed, f),
        ..*cfg
    };
    let model = train_ensemble(&data.subset(&train), &fold_cfg, stack)?;
    let (train_scores, _) = scores(&model, data, &train)?;
    let (test_scores, confusion) = scores(&model, data, &test)?;
    Ok((
        model,
        FoldReport {
            fold: f,
            n_train: train.len(),
            n_test: test.len(),
            train: train_scores,
            test: test_scores,
            confusion,
        },
    ))
}

/// k-fold cross-validation: one ensemble per fold, trained on the other
/// k - 1 folds and scored on the held-out one.
pub fn cross_validate(
    data: &Dataset,
    task: &str,
    cfg: &CvConfig,
    stack: &StackConfig,
) -> Result<CvReport, LearnError> {
    cfg.validate()?;
    let assignment = stratified_folds(&data.y, &data.classes, cfg.k, cfg.seed)?;
    let folds = (0..cfg.k)
        .map(|f| run_fold(data, &assignment, f, cfg, stack).map(|(_, r)| r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = CvReport::from_folds(
        "explainable-stacked-ensemble",
        task,
        data.classes.clone(),
        cfg.seed,
        assignment,
        folds,
    );
    report.ensemble = Some(*cfg);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutReport {
    pub task: String,
    pub classes: Vec<String>,
    pub seed: u64,
    pub test_rows: Vec<usize>,
    pub train: SplitScores,
    pub test: SplitScores,
    pub confusion: Vec<Vec<usize>>,
}

/// Single stratified split holding out one fifth of each class.
pub fn holdout_evaluate(
    data: &Dataset,
    task: &str,
    cfg: &CvConfig,
    stack: &StackConfig,
) -> Result<HoldoutReport, LearnError> {
    cfg.validate()?;
    let assignment = stratified_folds(&data.y, &data.classes, 5, derive_seed(cfg.seed, &[STREAM_HOLDOUT]))?;
    let (train, test) = split_indices(&assignment, 0);
    let model = train_ensemble(&data.subset(&train), cfg, stack)?;
    let (train_scores, _) = scores(&model, data, &train)?;
    let (test_scores, confusion) = scores(&model, data, &test)?;
    Ok(HoldoutReport {
        task: task.into(),
        classes: data.classes.clone(),
        seed: cfg.seed,
        test_rows: test,
        train: train_scores,
        test: test_scores,
        confusion,
    })
}
