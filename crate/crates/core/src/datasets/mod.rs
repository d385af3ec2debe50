//! Experiment datasets: the names corpus, the planted linear-separation
//! matrix and synthetic EEG clips with their feature pipeline.

mod binarize;
mod eeg;
mod features;
mod linsep;
mod names;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use binarize::{binarize_features, BinarizeMethod, Binarized};
pub use eeg::{gen_synthetic_eeg, ClipLabel, EegConfig, TimeSeriesClip};
pub use features::{extract_features, feature_names, FeatureConfig, Filter, Stat, WindowSpec};
pub use linsep::{gen_linsep, BAIT_COLUMN, LINSEP_COLS, LINSEP_FLIPS, LINSEP_ROWS};
pub use names::{
    bundled_names, last_letter, load_names, names_from_lists, names_weak_pool, PositiveClass, LAST_LETTER_COLUMN,
};

/// Row-major observations with ±1 labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<i8>,
    pub feature_names: Vec<String>,
    /// Optional per-row identifiers, such as the raw names.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub row_ids: Vec<String>,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<i8>, feature_names: Vec<String>) -> Result<Self> {
        let d = LabeledDataset { features, labels, feature_names, row_ids: Vec::new() };
        d.validate()?;
        Ok(d)
    }

    pub fn with_row_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.len() {
            return Err(Error::Dimension { expected: self.len(), actual: ids.len() });
        }
        self.row_ids = ids;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.len() != self.labels.len() {
            return Err(Error::Dimension { expected: self.features.len(), actual: self.labels.len() });
        }
        let p = self.feature_names.len();
        if let Some(row) = self.features.iter().find(|r| r.len() != p) {
            return Err(Error::Dimension { expected: p, actual: row.len() });
        }
        if let Some(&y) = self.labels.iter().find(|&&y| y != 1 && y != -1) {
            return Err(Error::InvalidProblem(format!("label {y} is not -1 or +1")));
        }
        if !self.row_ids.is_empty() && self.row_ids.len() != self.labels.len() {
            return Err(Error::Dimension { expected: self.labels.len(), actual: self.row_ids.len() });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.features.iter().map(|r| r[j]).collect()
    }

    pub fn count_positive(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            row_ids: if self.row_ids.is_empty() {
                Vec::new()
            } else {
                indices.iter().map(|&i| self.row_ids[i].clone()).collect()
            },
        }
    }

    /// Writes a header line, then one row per observation with a trailing `label` column.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = self.feature_names.clone();
        header.push("label".into());
        w.write_record(&header)?;
        for (row, y) in self.features.iter().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(y.to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Reads a CSV with a header; `label_column` holds −1/+1 and every other
    /// column must be numeric.
    pub fn read_csv(path: &Path, label_column: &str) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.clone();
        let label_idx = header.iter().position(|h| h == label_column).ok_or_else(|| Error::Parse {
            path: path.into(),
            message: format!("no column named {label_column:?}"),
        })?;
        let feature_names: Vec<String> =
            header.iter().enumerate().filter(|&(i, _)| i != label_idx).map(|(_, h)| h.to_string()).collect();
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let bad = |message: String| Error::Parse { path: path.into(), message: format!("line {}: {message}", line + 2) };
            let mut row = Vec::with_capacity(feature_names.len());
            for (i, field) in rec.iter().enumerate() {
                if i == label_idx {
                    let y: i8 = field.trim().parse().map_err(|_| bad(format!("bad label {field:?}")))?;
                    labels.push(y);
                } else {
                    row.push(field.trim().parse::<f64>().map_err(|_| bad(format!("bad number {field:?}")))?);
                }
            }
            features.push(row);
        }
        LabeledDataset::new(features, labels, feature_names)
    }
}
