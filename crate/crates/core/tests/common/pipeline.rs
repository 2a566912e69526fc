use cowvox::learn::bags::subsample_bags;
use cowvox::learn::metrics::{macro_f1_from_confusion, selection_loss, FoldMetrics};
use cowvox::learn::{
    cross_validate, resolve_vote, stratified_folds, train_ensemble, CvConfig, Dataset, EnsembleModel,
    Matrix, StackConfig,
};
use cowvox::synth;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Check;
use crate::ensure;

pub fn class_names(n: usize) -> Vec<String> {
    (0..n).map(|c| format!("c{c}")).collect()
}

/// Every fold holds `floor` or `ceil` of `count / k` members of each class.
pub fn check_stratified(labels: &[usize], n_classes: usize, k: usize, seed: u64) -> Check {
    let folds = stratified_folds(labels, &class_names(n_classes), k, seed).map_err(|e| e.to_string())?;
    ensure!(folds.len() == labels.len(), "assignment length {}", folds.len());
    for c in 0..n_classes {
        let total = labels.iter().filter(|&&l| l == c).count();
        for f in 0..k {
            let n = labels.iter().zip(&folds).filter(|(&l, &g)| l == c && g == f).count();
            let exact = total as f64 / k as f64;
            ensure!((n as f64 - exact).abs() < 1.0, "class {c} fold {f}: {n} of {total}");
        }
    }
    Ok(())
}

pub fn stratification() -> Check {
    let mut labels = vec![0usize; 952];
    labels.extend(vec![1usize; 192]);
    check_stratified(&labels, 2, 5, 20220711)?;
    let folds = stratified_folds(&labels, &class_names(2), 5, 20220711).map_err(|e| e.to_string())?;
    for f in 0..5 {
        let hf = (0..952).filter(|&i| folds[i] == f).count();
        let lf = (952..1144).filter(|&i| folds[i] == f).count();
        ensure!((190..=191).contains(&hf) && (38..=39).contains(&lf), "fold {f}: {hf} HF, {lf} LF");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..40 {
        let k = rng.random_range(2..8);
        let n_classes = rng.random_range(2..12);
        let mut labels = Vec::new();
        for c in 0..n_classes {
            labels.extend(std::iter::repeat_n(c, rng.random_range(k..k + 60)));
        }
        labels.shuffle(&mut rng);
        check_stratified(&labels, n_classes, k, case).map_err(|e| format!("case {case}: {e}"))?;
    }
    let mut labels = vec![0usize; 50];
    labels.extend([1, 1, 1]);
    ensure!(stratified_folds(&labels, &class_names(2), 5, 0).is_err(), "3-member class accepted at k=5");
    Ok(())
}

pub fn check_bags(n: usize, r: usize, fraction: f64, seed: u64) -> Check {
    let train: Vec<usize> = (0..n).map(|i| 3 * i + 1).collect();
    let min = r / 2;
    let bags = subsample_bags(&train, r, fraction, min, seed).map_err(|e| e.to_string())?;
    ensure!(bags.len() == r, "{} bags", bags.len());
    let size = (fraction * n as f64).round() as usize;
    let mut coverage = std::collections::HashMap::new();
    for bag in &bags {
        let mut sorted = bag.clone();
        sorted.sort_unstable();
        sorted.dedup();
        ensure!(bag.len() == size && sorted.len() == size, "bag of {} ({} distinct), want {size}", bag.len(), sorted.len());
        for &i in bag {
            ensure!(i % 3 == 1 && i < 3 * n, "index {i} not from the training set");
            *coverage.entry(i).or_insert(0usize) += 1;
        }
    }
    for &i in &train {
        let c = coverage.get(&i).copied().unwrap_or(0);
        ensure!(c >= min, "index {i} in {c} bags, need {min}");
    }
    Ok(())
}

pub fn coverage() -> Check {
    check_bags(915, 50, 0.9, 20220711)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..30 {
        let n = rng.random_range(2..400);
        let r = rng.random_range(1..40);
        let fraction = rng.random_range(0.5..0.95);
        check_bags(n, r, fraction, case).map_err(|e| format!("n={n} r={r} fraction={fraction:.3}: {e}"))?;
    }
    Ok(())
}

pub fn vote_ties() -> Check {
    ensure!(resolve_vote(&[2, 1], &[1.1, 0.9]) == 0, "(A, A, B) did not pick A");
    ensure!(resolve_vote(&[1, 1], &[1.3, 0.9]) == 0, "tie with sums 1.3/0.9 did not pick A");
    ensure!(resolve_vote(&[1, 1], &[0.9, 1.3]) == 1, "tie with sums 0.9/1.3 did not pick B");
    ensure!(resolve_vote(&[1, 1, 0], &[1.0, 1.0, 0.0]) == 0, "full tie did not pick the first class");
    ensure!(resolve_vote(&[0, 2, 2], &[0.2, 1.4, 1.4]) == 1, "full tie did not pick the lowest index");
    Ok(())
}

fn fm(accuracy: f64, f1: f64) -> FoldMetrics {
    FoldMetrics { fold: 0, accuracy, f1 }
}

pub fn selection_loss_cases() -> Check {
    let one = selection_loss(&[fm(1.0, 1.0); 5]).map_err(|e| e.to_string())?;
    ensure!(one == 1.0, "all ones gave {one}");
    let mixed = selection_loss(&[fm(0.8, 0.7), fm(0.6, 0.5)]).map_err(|e| e.to_string())?;
    ensure!((mixed - 0.65).abs() < 1e-12, "k=2 case gave {mixed}");
    let zero = selection_loss(&[fm(0.0, 0.0); 3]).map_err(|e| e.to_string())?;
    ensure!(zero == 0.0, "all zeros gave {zero}");
    ensure!(selection_loss(&[]).is_err(), "empty list accepted");
    let perfect = macro_f1_from_confusion(&[vec![5, 0], vec![0, 5]]);
    ensure!(perfect == 1.0, "perfect classifier F1 {perfect}");
    let single = macro_f1_from_confusion(&[vec![5, 0], vec![5, 0]]);
    ensure!((single - 1.0 / 3.0).abs() < 1e-15, "single-class predictor F1 {single}");
    Ok(())
}

/// 250 rows of pure noise with 83.2% majority labels, shuffled.
pub fn label_permuted(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 250;
    let mut y: Vec<usize> = (0..n).map(|i| usize::from(i >= 208)).collect();
    y.shuffle(&mut rng);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..23).map(|_| rng.sample(StandardNormal)).collect()).collect();
    let names = cowvox::FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    Dataset::new(Matrix::from_rows(&rows), y, class_names(2), names).expect("valid fixture")
}

pub fn small_cfg(r: usize) -> CvConfig {
    CvConfig { r, ..CvConfig::default() }
}

pub fn label_permutation() -> Check {
    let data = label_permuted(17);
    let report = cross_validate(&data, "noise", &small_cfg(5), &StackConfig::default()).map_err(|e| e.to_string())?;
    let ceiling = data.majority_rate() + 0.03;
    ensure!(
        report.test_accuracy.mean <= ceiling,
        "test accuracy {:.4} above majority + 3% = {ceiling:.4}",
        report.test_accuracy.mean
    );
    Ok(())
}

pub fn blobs_train() -> Dataset {
    synth::blobs(3, 40, 6, 6.0, 9)
}

pub fn reproducibility() -> Check {
    let data = blobs_train();
    let cfg = small_cfg(4);
    let stack = StackConfig::default();
    let fit = |threads: usize| -> Result<EnsembleModel, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        pool.install(|| train_ensemble(&data, &cfg, &stack)).map_err(|e| e.to_string())
    };
    let a = fit(1)?;
    let b = fit(1)?;
    let c = fit(3)?;
    let (ja, jb, jc) = (a.to_json().unwrap(), b.to_json().unwrap(), c.to_json().unwrap());
    ensure!(ja == jb, "two runs with the same seed differ");
    ensure!(ja == jc, "serial and parallel runs differ");
    let probe = synth::blobs(3, 30, 6, 2.0, 77);
    ensure!(a.predict_dataset(&probe).unwrap() == c.predict_dataset(&probe).unwrap(), "predictions differ");
    let other = train_ensemble(&data, &CvConfig { seed: 1, ..cfg }, &stack).map_err(|e| e.to_string())?;
    ensure!(other.to_json().unwrap() != ja, "a different seed gave the same model");
    let fa = stratified_folds(&data.y, &data.classes, 5, 3).unwrap();
    ensure!(fa == stratified_folds(&data.y, &data.classes, 5, 3).unwrap(), "fold assignment not reproducible");
    Ok(())
}

pub fn serialization() -> Check {
    let model = train_ensemble(&blobs_train(), &small_cfg(3), &StackConfig::default()).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("model.json");
    model.save(&path).map_err(|e| e.to_string())?;
    let loaded = EnsembleModel::load(&path).map_err(|e| e.to_string())?;
    ensure!(loaded == model, "loaded model differs structurally");
    let probe = synth::blobs(3, 50, 6, 1.5, 123);
    for i in 0..probe.len() {
        let (a, b) = (model.vote(probe.x.row(i)), loaded.vote(probe.x.row(i)));
        ensure!(a == b, "row {i}: vote {a:?} vs {b:?}");
    }
    Ok(())
}
