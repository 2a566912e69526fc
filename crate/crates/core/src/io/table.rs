//! The feature table: `source_id`, the 23 features in canonical order, then
//! `cow_id` and `call_type`. Numbers are written with Rust's shortest
//! round-trip formatting, so a write/read cycle is exact.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::manifest::{CallLabel, CallType};
use crate::features::{FeatureVector, FEATURE_NAMES, N_FEATURES};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("header mismatch: expected {expected}, found {found}")]
    HeaderMismatch { expected: String, found: String },
    #[error("row {row}, column {column}: {value:?} is not a finite number")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error("feature table has no rows")]
    Empty,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRow {
    pub source_id: String,
    pub features: FeatureVector,
    pub label: CallLabel,
}

/// Feature matrix with labels, one row per call.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledCorpus {
    pub rows: Vec<CorpusRow>,
}

impl LabeledCorpus {
    pub fn new(rows: Vec<CorpusRow>) -> Self {
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cow_ids(&self) -> BTreeSet<&str> {
        self.rows.iter().map(|r| r.label.cow_id.as_str()).collect()
    }

    pub fn count(&self, call_type: CallType) -> usize {
        self.rows
            .iter()
            .filter(|r| r.label.call_type == call_type)
            .count()
    }
}

pub fn header() -> Vec<&'static str> {
    let mut h = Vec::with_capacity(N_FEATURES + 3);
    h.push("source_id");
    h.extend_from_slice(&FEATURE_NAMES);
    h.push("cow_id");
    h.push("call_type");
    h
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn features_csv_string(corpus: &LabeledCorpus) -> String {
    let mut out = header().join(",");
    out.push('\n');
    for row in &corpus.rows {
        out.push_str(&quote(&row.source_id));
        for v in row.features.to_array() {
            write!(out, ",{v}").unwrap();
        }
        write!(
            out,
            ",{},{}\n",
            quote(&row.label.cow_id),
            row.label.call_type
        )
        .unwrap();
    }
    out
}

pub fn write_features_csv(corpus: &LabeledCorpus, path: impl AsRef<Path>) -> Result<(), TableError> {
    std::fs::write(path, features_csv_string(corpus))?;
    Ok(())
}

pub fn parse_features_csv(text: &str) -> Result<LabeledCorpus, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let expected = header();
    if found != expected {
        return Err(TableError::HeaderMismatch {
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let mut values = [0.0; N_FEATURES];
        for (j, slot) in values.iter_mut().enumerate() {
            let cell = record[j + 1].trim();
            *slot = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| TableError::NonNumericCell {
                    row,
                    column: FEATURE_NAMES[j].to_string(),
                    value: cell.to_string(),
                })?;
        }
        let call_type = record[N_FEATURES + 2]
            .parse::<CallType>()
            .map_err(|e| TableError::BadRow {
                row,
                message: e.to_string(),
            })?;
        rows.push(CorpusRow {
            source_id: record[0].to_string(),
            features: FeatureVector::from_array(&values),
            label: CallLabel {
                cow_id: record[N_FEATURES + 1].to_string(),
                call_type,
            },
        });
    }
    if rows.is_empty() {
        return Err(TableError::Empty);
    }
    Ok(LabeledCorpus { rows })
}

pub fn read_features_csv(path: impl AsRef<Path>) -> Result<LabeledCorpus, TableError> {
    parse_features_csv(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(id: &str, seed: f64, cow: &str, ct: CallType) -> CorpusRow {
        let v: [f64; N_FEATURES] = std::array::from_fn(|i| seed * (i as f64 + 1.0) / 7.0);
        CorpusRow {
            source_id: id.into(),
            features: FeatureVector::from_array(&v),
            label: CallLabel {
                cow_id: cow.into(),
                call_type: ct,
            },
        }
    }

    #[test]
    fn three_row_roundtrip() {
        let c = LabeledCorpus::new(vec![
            row("a", 1.1, "c1", CallType::Hf),
            row("b,quoted", -3.3e-7, "c2", CallType::Lf),
            row("c", 12345.678, "c1", CallType::Hf),
        ]);
        let text = features_csv_string(&c);
        assert!(text.starts_with("source_id,F0Mean,"));
        assert!(!text.contains('\r'));
        assert_eq!(parse_features_csv(&text).unwrap(), c);
    }

    #[test]
    fn missing_column_is_header_mismatch() {
        let mut h = header();
        h.remove(5);
        let text = format!("{}\n", h.join(","));
        assert!(matches!(
            parse_features_csv(&text),
            Err(TableError::HeaderMismatch { .. })
        ));
    }

    #[test]
    fn nan_cell_rejected() {
        let c = LabeledCorpus::new(vec![row("a", 1.0, "c1", CallType::Hf)]);
        let text = features_csv_string(&c).replacen(",1,", ",NaN,", 1);
        let text = if text.contains("NaN") {
            text
        } else {
            let mut lines: Vec<String> = text.lines().map(String::from).collect();
            let mut cells: Vec<String> = lines[1].split(',').map(String::from).collect();
            cells[3] = "NaN".into();
            lines[1] = cells.join(",");
            lines.join("\n") + "\n"
        };
        assert!(matches!(
            parse_features_csv(&text),
            Err(TableError::NonNumericCell { row: 1, .. })
        ));
    }

    proptest! {
        #[test]
        fn csv_roundtrip_is_exact(vals in proptest::collection::vec(-1e9f64..1e9, N_FEATURES)) {
            let arr: [f64; N_FEATURES] = vals.try_into().unwrap();
            let c = LabeledCorpus::new(vec![CorpusRow {
                source_id: "x".into(),
                features: FeatureVector::from_array(&arr),
                label: CallLabel { cow_id: "7".into(), call_type: CallType::Lf },
            }]);
            let back = parse_features_csv(&features_csv_string(&c)).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
