//! Leave-one-feature-out (LOFO) importance.
//!
//! For every cross-validation fold the ensemble is retrained once per
//! feature with that column removed. The drop in test accuracy, clipped at
//! zero, is the feature's raw importance; each fold's values are scaled to
//! sum to 100 and then averaged across folds.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::learn::{
    run_fold, stratified_folds, CvConfig, Dataset, LearnError, MeanStd, StackConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature: String,
    pub mean_pct: f64,
    pub std_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub task: String,
    pub cfg: CvConfig,
    /// One entry per feature, in the input column order.
    pub features: Vec<FeatureImportance>,
    /// Test accuracy of the full model per fold.
    pub full_accuracy: Vec<f64>,
    /// `raw_deltas[fold][feature]`: full minus ablated test accuracy, unclipped.
    pub raw_deltas: Vec<Vec<f64>>,
    /// `fold_pct[fold][feature]`: clipped and normalised to sum 100.
    pub fold_pct: Vec<Vec<f64>>,
}

/// Clips negatives to zero and scales to sum 100; an all-zero fold is
/// spread uniformly.
pub fn normalize_fold(deltas: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = deltas.iter().map(|d| d.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total > 0.0 {
        clipped.iter().map(|d| 100.0 * d / total).collect()
    } else {
        vec![100.0 / deltas.len() as f64; deltas.len()]
    }
}

impl ImportanceReport {
    pub fn from_deltas(
        task: &str,
        cfg: CvConfig,
        feature_names: &[String],
        full_accuracy: Vec<f64>,
        raw_deltas: Vec<Vec<f64>>,
    ) -> Self {
        let fold_pct: Vec<Vec<f64>> = raw_deltas.iter().map(|d| normalize_fold(d)).collect();
        let features = feature_names
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let ms = MeanStd::of(&fold_pct.iter().map(|f| f[j]).collect::<Vec<_>>());
                FeatureImportance {
                    feature: name.clone(),
                    mean_pct: ms.mean,
                    std_pct: ms.std,
                }
            })
            .collect();
        Self {
            task: task.into(),
            cfg,
            features,
            full_accuracy,
            raw_deltas,
            fold_pct,
        }
    }

    /// Features sorted by descending mean importance, ties by name.
    pub fn ranked(&self) -> Vec<&FeatureImportance> {
        let mut v: Vec<&FeatureImportance> = self.features.iter().collect();
        v.sort_by(|a, b| b.mean_pct.total_cmp(&a.mean_pct).then_with(|| a.feature.cmp(&b.feature)));
        v
    }

    pub fn get(&self, feature: &str) -> Option<&FeatureImportance> {
        self.features.iter().find(|f| f.feature == feature)
    }

    /// `feature,mean_pct,std_pct`, ranked.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("feature,mean_pct,std_pct\n");
        for f in self.ranked() {
            let _ = writeln!(s, "{},{},{}", f.feature, f.mean_pct, f.std_pct);
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv_string())
    }
}

/// LOFO importance of every column of `data` under k-fold cross-validation.
/// Each ablated ensemble reuses its fold's seed, so the only difference from
/// the full model is the missing column.
pub fn lofo_importance(
    data: &Dataset,
    task: &str,
    cfg: &CvConfig,
    stack: &StackConfig,
) -> Result<ImportanceReport, LearnError> {
    cfg.validate()?;
    let m = data.feature_names.len();
    if m < 2 {
        return Err(LearnError::BadConfig("LOFO needs at least two features".into()));
    }
    let assignment = stratified_folds(&data.y, &data.classes, cfg.k, cfg.seed)?;
    let mut full_accuracy = Vec::with_capacity(cfg.k);
    let mut raw_deltas = Vec::with_capacity(cfg.k);
    for f in 0..cfg.k {
        let (_, full) = run_fold(data, &assignment, f, cfg, stack)?;
        let deltas = (0..m)
            .map(|j| {
                run_fold(&data.without_feature(j), &assignment, f, cfg, stack)
                    .map(|(_, r)| full.test.accuracy - r.test.accuracy)
            })
            .collect::<Result<Vec<_>, _>>()?;
        full_accuracy.push(full.test.accuracy);
        raw_deltas.push(deltas);
    }
    Ok(ImportanceReport::from_deltas(
        task,
        *cfg,
        &data.feature_names,
        full_accuracy,
        raw_deltas,
    ))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Horizontal bar chart, one bar per feature in ranked order, with a
/// one-standard-deviation error bar on each.
pub fn render_importance_chart(report: &ImportanceReport) -> String {
    const LABEL_W: f64 = 190.0;
    const PLOT_W: f64 = 520.0;
    const ROW_H: f64 = 22.0;
    const TOP: f64 = 40.0;
    let ranked = report.ranked();
    let max = ranked
        .iter()
        .map(|f| f.mean_pct + f.std_pct)
        .fold(0.0_f64, f64::max)
        .max(1e-9);
    let scale = PLOT_W / max;
    let height = TOP + ROW_H * ranked.len() as f64 + 40.0;
    let width = LABEL_W + PLOT_W + 60.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">Feature importance (%), {}</text>"#,
        width / 2.0,
        escape(&report.task)
    );
    for (i, f) in ranked.iter().enumerate() {
        let y = TOP + ROW_H * i as f64;
        let w = f.mean_pct * scale;
        let cy = y + ROW_H / 2.0;
        let lo = LABEL_W + (f.mean_pct - f.std_pct).max(0.0) * scale;
        let hi = LABEL_W + (f.mean_pct + f.std_pct) * scale;
        let name = escape(&f.feature);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" dominant-baseline="middle">{name}</text>"#,
            LABEL_W - 6.0,
            cy
        );
        let _ = writeln!(
            s,
            r##"<rect class="bar" data-feature="{name}" x="{LABEL_W:.1}" y="{:.1}" width="{w:.3}" height="{:.1}" fill="#4c72b0"/>"##,
            y + 3.0,
            ROW_H - 6.0
        );
        let _ = writeln!(
            s,
            r#"<line class="err" data-feature="{name}" x1="{lo:.3}" y1="{cy:.1}" x2="{hi:.3}" y2="{cy:.1}" stroke="black"/>"#
        );
    }
    let axis_y = TOP + ROW_H * ranked.len() as f64 + 4.0;
    let _ = writeln!(
        s,
        r#"<line x1="{LABEL_W:.1}" y1="{axis_y:.1}" x2="{:.1}" y2="{axis_y:.1}" stroke="black"/>"#,
        LABEL_W + PLOT_W
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{max:.1}%</text>"#,
        LABEL_W + PLOT_W,
        axis_y + 16.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(deltas: Vec<Vec<f64>>) -> ImportanceReport {
        let names: Vec<String> = (0..deltas[0].len()).map(|i| format!("f{i}")).collect();
        let acc = vec![0.9; deltas.len()];
        ImportanceReport::from_deltas("t", CvConfig::default(), &names, acc, deltas)
    }

    #[test]
    fn normalises_and_clips() {
        let p = normalize_fold(&[0.02, -0.01, 0.06]);
        assert_eq!(p, vec![25.0, 0.0, 75.0]);
        assert_eq!(normalize_fold(&[0.0, -0.1]), vec![50.0, 50.0]);
    }

    #[test]
    fn report_means_and_raw_kept() {
        let r = report(vec![vec![0.1, 0.0], vec![0.0, -0.2]]);
        assert_eq!(r.features[0].mean_pct, 75.0);
        assert_eq!(r.features[1].mean_pct, 25.0);
        assert_eq!(r.raw_deltas[1][1], -0.2);
        assert_eq!(r.ranked()[0].feature, "f0");
        assert!(r.to_csv_string().starts_with("feature,mean_pct,std_pct\nf0,75,"));
    }

    #[test]
    fn chart_structure() {
        let r = report(vec![vec![0.1; 23]]);
        let svg = render_importance_chart(&r);
        assert_eq!(svg.matches(r#"class="bar""#).count(), 23);
        assert_eq!(svg.matches(r#"class="err""#).count(), 23);
        assert_eq!(svg, render_importance_chart(&r));
    }
}
