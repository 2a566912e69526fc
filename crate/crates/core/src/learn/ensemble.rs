//! Bagged stacked models combined by majority vote.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bags::subsample_bags;
use super::stack::{train_stacked, GridScope, StackConfig, StackedModel};
use super::{Dataset, LearnError};
use crate::features::{FeatureVector, FEATURE_NAMES};
use crate::seed::{derive_seed, STREAM_BAGS, STREAM_STACK};

pub const MODEL_FORMAT: &str = "cowvox-ensemble";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub k: usize,
    pub r: usize,
    pub subsample_fraction: f64,
    /// Defaults to `r / 2` when unset.
    pub min_inclusion: Option<usize>,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            k: 5,
            r: 50,
            subsample_fraction: 0.9,
            min_inclusion: None,
            seed: 20220711,
        }
    }
}

impl CvConfig {
    pub fn min_inclusion(&self) -> usize {
        self.min_inclusion.unwrap_or(self.r / 2)
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        if self.k < 2 {
            return Err(LearnError::BadK(self.k));
        }
        if self.r == 0 {
            return Err(LearnError::BadConfig("r must be at least 1".into()));
        }
        if !(self.subsample_fraction > 0.0 && self.subsample_fraction < 1.0) {
            return Err(LearnError::BadConfig("subsample fraction must lie in (0, 1)".into()));
        }
        if self.min_inclusion() > self.r {
            return Err(LearnError::BadConfig("min_inclusion exceeds r".into()));
        }
        Ok(())
    }
}

/// Vote tally for one input.
#[derive(Debug, Clone, PartialEq)]
pub struct Vote {
    pub counts: Vec<usize>,
    pub prob_sums: Vec<f64>,
    pub winner: usize,
}

/// Most votes, then highest summed probability, then lowest class index.
pub fn resolve_vote(counts: &[usize], prob_sums: &[f64]) -> usize {
    let mut best = 0;
    for c in 1..counts.len() {
        if counts[c] > counts[best] || (counts[c] == counts[best] && prob_sums[c] > prob_sums[best]) {
            best = c;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub format: String,
    pub version: u32,
    pub classes: Vec<String>,
    /// Column names in the order the instances consume them (sorted).
    pub feature_names: Vec<String>,
    pub instances: Vec<StackedModel>,
}

/// Trains `cfg.r` stacked models on subsampled bags of `data`.
pub fn train_ensemble(
    data: &Dataset,
    cfg: &CvConfig,
    stack: &StackConfig,
) -> Result<EnsembleModel, LearnError> {
    cfg.validate()?;
    stack.validate()?;
    let data = data.canonical();
    let all: Vec<usize> = (0..data.len()).collect();
    let bags = subsample_bags(
        &all,
        cfg.r,
        cfg.subsample_fraction,
        cfg.min_inclusion(),
        derive_seed(cfg.seed, &[STREAM_BAGS]),
    )?;
    let fit = |b: usize, stack: &StackConfig| {
        let bag = &bags[b];
        let x = data.x.select_rows(bag);
        let y: Vec<usize> = bag.iter().map(|&i| data.y[i]).collect();
        train_stacked(&x, &y, data.n_classes(), stack, derive_seed(cfg.seed, &[STREAM_STACK, b as u64]))
    };
    let instances = if stack.grid_scope == GridScope::Shared && stack.fixed_meta.is_none() {
        let first = fit(0, stack)?;
        let shared = StackConfig {
            fixed_meta: Some(first.choice),
            ..stack.clone()
        };
        let rest = (1..bags.len())
            .into_par_iter()
            .map(|b| fit(b, &shared))
            .collect::<Result<Vec<_>, _>>()?;
        std::iter::once(first).chain(rest).collect()
    } else {
        (0..bags.len())
            .into_par_iter()
            .map(|b| fit(b, stack))
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(EnsembleModel {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        classes: data.classes.clone(),
        feature_names: data.feature_names.clone(),
        instances,
    })
}

impl EnsembleModel {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Tally for a row already in `feature_names` order.
    pub fn vote(&self, row: &[f64]) -> Vote {
        let k = self.n_classes();
        let mut counts = vec![0; k];
        let mut prob_sums = vec![0.0; k];
        for inst in &self.instances {
            let p = inst.predict_proba(row);
            counts[super::base::argmax(&p)] += 1;
            prob_sums.iter_mut().zip(&p).for_each(|(s, v)| *s += v);
        }
        let winner = resolve_vote(&counts, &prob_sums);
        Vote {
            counts,
            prob_sums,
            winner,
        }
    }

    /// Maps `names` onto the stored feature order. The names must be exactly
    /// the stored set.
    pub fn column_order<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, LearnError> {
        if names.len() != self.feature_names.len() {
            return Err(LearnError::FeatureMismatch(format!(
                "model expects {} features, got {}",
                self.feature_names.len(),
                names.len()
            )));
        }
        self.feature_names
            .iter()
            .map(|want| {
                let hits: Vec<usize> = names
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| n.as_ref() == want)
                    .map(|(i, _)| i)
                    .collect();
                match hits.as_slice() {
                    [i] => Ok(*i),
                    [] => Err(LearnError::FeatureMismatch(format!("missing feature {want:?}"))),
                    _ => Err(LearnError::FeatureMismatch(format!("duplicate feature {want:?}"))),
                }
            })
            .collect()
    }

    /// Class index for one row given its column names.
    pub fn predict_named<S: AsRef<str>>(&self, names: &[S], values: &[f64]) -> Result<usize, LearnError> {
        if names.len() != values.len() {
            return Err(LearnError::FeatureMismatch("names and values differ in length".into()));
        }
        let order = self.column_order(names)?;
        let row: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        Ok(self.vote(&row).winner)
    }

    /// Class indices for every row of `data`, whose columns may be in any order.
    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>, LearnError> {
        let order = self.column_order(&data.feature_names)?;
        let x = data.x.select_cols(&order);
        Ok((0..x.rows()).into_par_iter().map(|r| self.vote(x.row(r)).winner).collect())
    }

    pub fn predict(&self, fv: &FeatureVector) -> Result<&str, LearnError> {
        let c = self.predict_named(&FEATURE_NAMES, &fv.to_array())?;
        Ok(&self.classes[c])
    }

    pub fn to_json(&self) -> Result<String, LearnError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, LearnError> {
        let m: Self = serde_json::from_str(s)?;
        if m.format != MODEL_FORMAT || m.version != MODEL_VERSION {
            return Err(LearnError::ModelFormat(format!(
                "unsupported model {} v{}",
                m.format, m.version
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<(), LearnError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, LearnError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
