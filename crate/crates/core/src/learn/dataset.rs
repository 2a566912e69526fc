use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LearnError, Matrix};
use crate::features::FEATURE_NAMES;
use crate::io::{CallType, LabeledCorpus};

/// Feature matrix with integer labels indexing `classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub y: Vec<usize>,
    pub classes: Vec<String>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        x: Matrix,
        y: Vec<usize>,
        classes: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self, LearnError> {
        if x.rows() != y.len() || x.cols() != feature_names.len() {
            return Err(LearnError::BadConfig(format!(
                "{}x{} matrix with {} labels and {} feature names",
                x.rows(),
                x.cols(),
                y.len(),
                feature_names.len()
            )));
        }
        if y.iter().any(|&c| c >= classes.len()) {
            return Err(LearnError::BadConfig("label outside class list".into()));
        }
        let unique: BTreeSet<&String> = feature_names.iter().collect();
        if unique.len() != feature_names.len() {
            return Err(LearnError::BadConfig("duplicate feature names".into()));
        }
        Ok(Self {
            x,
            y,
            classes,
            feature_names,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.classes.len()];
        self.y.iter().for_each(|&k| c[k] += 1);
        c
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(rows),
            y: rows.iter().map(|&r| self.y[r]).collect(),
            classes: self.classes.clone(),
            feature_names: self.feature_names.clone(),
        }
    }

    pub fn select_features(&self, cols: &[usize]) -> Self {
        Self {
            x: self.x.select_cols(cols),
            y: self.y.clone(),
            classes: self.classes.clone(),
            feature_names: cols.iter().map(|&c| self.feature_names[c].clone()).collect(),
        }
    }

    pub fn without_feature(&self, col: usize) -> Self {
        let keep: Vec<usize> = (0..self.feature_names.len()).filter(|&c| c != col).collect();
        self.select_features(&keep)
    }

    /// Columns reordered by feature name.
    pub fn canonical(&self) -> Self {
        let mut order: Vec<usize> = (0..self.feature_names.len()).collect();
        order.sort_by(|&a, &b| self.feature_names[a].cmp(&self.feature_names[b]));
        self.select_features(&order)
    }

    pub fn majority_rate(&self) -> f64 {
        self.class_counts().into_iter().max().unwrap_or(0) as f64 / self.len().max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    CallType,
    CowId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    All,
    Hf,
    Lf,
}

impl FromStr for Target {
    type Err = LearnError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "calltype" => Ok(Target::CallType),
            "cowid" => Ok(Target::CowId),
            _ => Err(LearnError::InvalidTask(format!("unknown target {s:?}"))),
        }
    }
}

impl FromStr for Subset {
    type Err = LearnError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Subset::All),
            "hf" => Ok(Subset::Hf),
            "lf" => Ok(Subset::Lf),
            _ => Err(LearnError::InvalidTask(format!("unknown subset {s:?}"))),
        }
    }
}

/// What to predict and from which calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub target: Target,
    pub subset: Subset,
}

impl TaskSpec {
    pub fn new(target: Target, subset: Subset) -> Result<Self, LearnError> {
        if target == Target::CallType && subset != Subset::All {
            return Err(LearnError::InvalidTask(
                "call-type classification needs both HF and LF calls".into(),
            ));
        }
        Ok(Self { target, subset })
    }

    pub fn call_type() -> Self {
        Self {
            target: Target::CallType,
            subset: Subset::All,
        }
    }

    pub fn cow_id(subset: Subset) -> Self {
        Self {
            target: Target::CowId,
            subset,
        }
    }

    fn includes(&self, call_type: CallType) -> bool {
        match self.subset {
            Subset::All => true,
            Subset::Hf => call_type == CallType::Hf,
            Subset::Lf => call_type == CallType::Lf,
        }
    }

    /// Source ids of the rows [`TaskSpec::dataset`] keeps, in the same order.
    pub fn source_ids(&self, corpus: &LabeledCorpus) -> Vec<String> {
        corpus
            .rows
            .iter()
            .filter(|r| self.includes(r.label.call_type))
            .map(|r| r.source_id.clone())
            .collect()
    }

    /// Builds the labelled matrix, columns in canonical feature order.
    /// Class order: `HF, LF` for call type; sorted cow ids for identity.
    pub fn dataset(&self, corpus: &LabeledCorpus) -> Result<Dataset, LearnError> {
        let rows: Vec<_> = corpus
            .rows
            .iter()
            .filter(|r| self.includes(r.label.call_type))
            .collect();
        if rows.is_empty() {
            return Err(LearnError::InvalidTask(format!("no calls in subset {self}")));
        }
        let classes: Vec<String> = match self.target {
            Target::CallType => vec!["HF".into(), "LF".into()],
            Target::CowId => rows
                .iter()
                .map(|r| r.label.cow_id.clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        };
        let y = rows
            .iter()
            .map(|r| match self.target {
                Target::CallType => usize::from(r.label.call_type == CallType::Lf),
                Target::CowId => classes.binary_search(&r.label.cow_id).expect("class collected"),
            })
            .collect();
        let data: Vec<f64> = rows.iter().flat_map(|r| r.features.to_array()).collect();
        Dataset::new(
            Matrix::new(rows.len(), FEATURE_NAMES.len(), data),
            y,
            classes,
            FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        )
    }
}

impl fmt::Display for TaskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let target = match self.target {
            Target::CallType => "calltype",
            Target::CowId => "cowid",
        };
        let subset = match self.subset {
            Subset::All => "all",
            Subset::Hf => "hf",
            Subset::Lf => "lf",
        };
        write!(f, "{target}/{subset}")
    }
}
