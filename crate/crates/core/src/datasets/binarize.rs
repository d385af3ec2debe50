use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::boost::WeakClassifier;
use crate::error::{Error, Result};
use crate::eval::quantile_sorted;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinarizeMethod {
    /// Threshold each feature at its training median.
    #[default]
    Median,
}

/// ±1 training matrix with the stumps that produce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Binarized {
    pub data: LabeledDataset,
    pub pool: Vec<WeakClassifier>,
    /// Stumps over constant features; their output never varies.
    pub degenerate: Vec<bool>,
}

impl Binarized {
    /// Applies the stumps to other rows with the same feature layout.
    pub fn transform(&self, other: &LabeledDataset) -> Result<LabeledDataset> {
        let p = self.pool.len();
        if other.num_features() != p {
            return Err(Error::Dimension { expected: p, actual: other.num_features() });
        }
        let features = other.features.iter().map(|r| self.pool.iter().map(|c| c.predict(r) as f64).collect()).collect();
        LabeledDataset::new(features, other.labels.clone(), self.data.feature_names.clone())
    }
}

/// Thresholds every feature on the training rows and orients each stump so
/// its output correlates non-negatively with the training labels.
pub fn binarize_features(train: &LabeledDataset, method: BinarizeMethod) -> Result<Binarized> {
    if train.is_empty() {
        return Err(Error::Empty("cannot binarize an empty training split".into()));
    }
    let BinarizeMethod::Median = method;
    let mut pool = Vec::with_capacity(train.num_features());
    let mut degenerate = Vec::with_capacity(train.num_features());
    for j in 0..train.num_features() {
        let mut col = train.column(j);
        let constant = col.iter().all(|&v| v == col[0]);
        col.sort_by(f64::total_cmp);
        let threshold = quantile_sorted(&col, 0.5);
        let agreement: i64 =
            train.features.iter().zip(&train.labels).map(|(r, &y)| if r[j] > threshold { y as i64 } else { -y as i64 }).sum();
        let polarity = if agreement < 0 { -1 } else { 1 };
        let mut stump = WeakClassifier::stump(j, threshold, polarity);
        stump.id = format!("stump_{}", train.feature_names[j]);
        pool.push(stump);
        degenerate.push(constant);
    }
    let names = pool.iter().map(|c| c.id.clone()).collect();
    let features = train.features.iter().map(|r| pool.iter().map(|c| c.predict(r) as f64).collect()).collect();
    let data = LabeledDataset::new(features, train.labels.clone(), names)?;
    Ok(Binarized { data, pool, degenerate })
}
