use cowvox::importance::{lofo_importance, normalize_fold, ImportanceReport};
use cowvox::learn::StackConfig;
use cowvox::synth;

use super::pipeline::small_cfg;
use super::Check;
use crate::ensure;

pub const PLANTED: usize = 7;

/// LOFO on 200 rows where only column `PLANTED` carries the label.
pub fn planted_report() -> Result<ImportanceReport, String> {
    let data = synth::planted_feature(200, 23, PLANTED, 4);
    lofo_importance(&data, "planted", &small_cfg(3), &StackConfig::default()).map_err(|e| e.to_string())
}

pub fn sums_and_signs(report: &ImportanceReport) -> Check {
    let total: f64 = report.features.iter().map(|f| f.mean_pct).sum();
    ensure!((total - 100.0).abs() <= 0.1, "means sum to {total}");
    for f in &report.features {
        ensure!(f.mean_pct >= 0.0 && f.std_pct >= 0.0, "{}: {} ± {}", f.feature, f.mean_pct, f.std_pct);
    }
    for (i, fold) in report.fold_pct.iter().enumerate() {
        ensure!(fold.iter().all(|&v| v >= 0.0), "fold {i} has a negative share");
        let s: f64 = fold.iter().sum();
        ensure!((s - 100.0).abs() <= 1e-9, "fold {i} sums to {s}");
    }
    Ok(())
}

pub fn planted(report: &ImportanceReport) -> Check {
    let planted = &report.features[PLANTED];
    ensure!(planted.mean_pct >= 50.0, "planted {} has {:.2}%", planted.feature, planted.mean_pct);
    for (j, f) in report.features.iter().enumerate() {
        if j != PLANTED {
            ensure!(f.mean_pct <= 5.0, "noise feature {} has {:.2}%", f.feature, f.mean_pct);
        }
    }
    Ok(())
}

pub fn normalization_cases() -> Check {
    let n = normalize_fold(&[0.1, -0.05, 0.3, 0.0]);
    let want = [25.0, 0.0, 75.0, 0.0];
    ensure!(n.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-9), "clip and scale gave {n:?}");
    let u = normalize_fold(&[-0.1; 23]);
    ensure!(u.iter().all(|&v| (v - 100.0 / 23.0).abs() < 1e-12), "all-zero fold not uniform");
    Ok(())
}
