//! Random Forest device identification: Gini trees, bagging, stratified
//! cross-validation, impurity-based importances and Pearson correlation.

mod correlation;
mod cv;
mod model;
mod tree;

pub use correlation::{pearson_correlation_matrix, CorrelationMatrix};
pub use cv::{cross_validate, stratified_folds, CvConfig, EvalReport, SmoothingOrder};
pub use model::{feature_importance, predict, train, ForestModel, TrainConfig, MODEL_FORMAT_VERSION};
pub use tree::{DecisionTree, Node};

use crate::error::{Error, Result};
use crate::features::{FeatureRecord, SCALAR_FEATURE_NAMES};

pub const DEFAULT_TREES: usize = 128;
pub const DEFAULT_FOLDS: usize = 5;

/// Row-major feature matrix with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatureMatrix {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub feature_names: Vec<String>,
}

impl LabeledFeatureMatrix {
    /// Validates shape and finiteness.
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<String>, feature_names: Vec<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::DegenerateTraining("feature matrix has no rows".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::InvalidConfig(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let width = feature_names.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::FeatureCount {
                    expected: width,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!("row {i} contains a non-finite value")));
            }
        }
        Ok(Self {
            rows,
            labels,
            feature_names,
        })
    }

    /// The 15-scalar matrix of a batch of feature records. Records with an
    /// undefined scalar are skipped and counted in the second return value.
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a FeatureRecord>) -> Result<(Self, usize)> {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut skipped = 0;
        for rec in records {
            match rec.scalars() {
                Some(s) if s.0.iter().all(|v| v.is_finite()) => {
                    rows.push(s.0.to_vec());
                    labels.push(rec.device_label.clone());
                }
                _ => skipped += 1,
            }
        }
        let names = SCALAR_FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
        Ok((Self::new(rows, labels, names)?, skipped))
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Distinct labels, sorted.
    pub fn classes(&self) -> Vec<String> {
        let mut c: Vec<String> = self.labels.clone();
        c.sort();
        c.dedup();
        c
    }

    pub fn column(&self, f: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[f]).collect()
    }

    /// Rows at `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            feature_names: self.feature_names.clone(),
        }
    }
}
