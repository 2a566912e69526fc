use serde::{Deserialize, Serialize};

use super::LearnError;

/// `confusion[true][predicted]` counts.
pub fn confusion_matrix(truth: &[usize], predicted: &[usize], n_classes: usize) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        m[t][p] += 1;
    }
    m
}

pub fn accuracy(truth: &[usize], predicted: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    truth.iter().zip(predicted).filter(|(t, p)| t == p).count() as f64 / truth.len() as f64
}

/// Macro-averaged F1 over the classes that occur in the truth or the
/// predictions. A class never predicted has precision 0.
pub fn macro_f1_from_confusion(confusion: &[Vec<usize>]) -> f64 {
    let k = confusion.len();
    let mut sum = 0.0;
    let mut present = 0;
    for c in 0..k {
        let tp = confusion[c][c] as f64;
        let actual: usize = confusion[c].iter().sum();
        let predicted: usize = confusion.iter().map(|row| row[c]).sum();
        if actual == 0 && predicted == 0 {
            continue;
        }
        present += 1;
        let denom = actual as f64 + predicted as f64;
        sum += if denom > 0.0 { 2.0 * tp / denom } else { 0.0 };
    }
    if present == 0 {
        0.0
    } else {
        sum / present as f64
    }
}

pub fn macro_f1(truth: &[usize], predicted: &[usize], n_classes: usize) -> f64 {
    macro_f1_from_confusion(&confusion_matrix(truth, predicted, n_classes))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub accuracy: f64,
    pub f1: f64,
}

impl FoldMetrics {
    pub fn evaluate(fold: usize, truth: &[usize], predicted: &[usize], n_classes: usize) -> Self {
        Self {
            fold,
            accuracy: accuracy(truth, predicted),
            f1: macro_f1(truth, predicted, n_classes),
        }
    }
}

/// Mean of `(accuracy + f1) / 2` over folds; higher is better.
pub fn selection_loss(folds: &[FoldMetrics]) -> Result<f64, LearnError> {
    if folds.is_empty() {
        return Err(LearnError::EmptyMetrics);
    }
    let k = folds.len() as f64;
    Ok(folds.iter().map(|m| m.accuracy + m.f1).sum::<f64>() / (2.0 * k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample (n - 1) standard deviation; 0 for a single value.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Self { mean: f64::NAN, std: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fm(accuracy: f64, f1: f64) -> FoldMetrics {
        FoldMetrics { fold: 0, accuracy, f1 }
    }

    #[test]
    fn selection_loss_cases() {
        assert_eq!(selection_loss(&[fm(1.0, 1.0), fm(1.0, 1.0)]).unwrap(), 1.0);
        let l = selection_loss(&[fm(0.8, 0.7), fm(0.6, 0.5)]).unwrap();
        assert!((l - 0.65).abs() < 1e-15);
        assert_eq!(selection_loss(&[fm(0.0, 0.0)]).unwrap(), 0.0);
        assert!(matches!(selection_loss(&[]), Err(LearnError::EmptyMetrics)));
    }

    #[test]
    fn f1_perfect_and_single_class() {
        let truth = [0, 0, 1, 1];
        assert_eq!(macro_f1(&truth, &truth, 2), 1.0);
        let c = vec![vec![2, 0], vec![2, 0]];
        assert_eq!(macro_f1_from_confusion(&c), 1.0 / 3.0);
        assert_eq!(macro_f1(&truth, &[0, 0, 0, 0], 2), 1.0 / 3.0);
    }

    #[test]
    fn sample_std() {
        let m = MeanStd::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(MeanStd::of(&[3.0]).std, 0.0);
    }

    proptest! {
        #[test]
        fn selection_loss_bounded_and_monotone(
            a in proptest::collection::vec(0.0f64..=1.0, 1..8),
            f in proptest::collection::vec(0.0f64..=1.0, 8),
            bump in 0.0f64..0.5,
        ) {
            let folds: Vec<FoldMetrics> = a.iter().zip(&f).map(|(&a, &f)| fm(a, f)).collect();
            let l = selection_loss(&folds).unwrap();
            prop_assert!((0.0..=1.0).contains(&l));
            let mut better = folds.clone();
            better[0].accuracy = (better[0].accuracy + bump).min(1.0);
            prop_assert!(selection_loss(&better).unwrap() >= l);
            let mut better = folds.clone();
            better[0].f1 = (better[0].f1 + bump).min(1.0);
            prop_assert!(selection_loss(&better).unwrap() >= l);
        }
    }
}
