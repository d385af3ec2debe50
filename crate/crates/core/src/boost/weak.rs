use serde::{Deserialize, Serialize};

use crate::datasets::{LabeledDataset, LAST_LETTER_COLUMN};

/// How a weak classifier reads a row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeakKind {
    /// `polarity` when `row[feature] > threshold`, else `-polarity`.
    ThresholdStump { feature: usize, threshold: f64, polarity: i8 },
    /// `class_if_match` when the last-letter code equals `letter`, else the opposite class.
    SuffixLetter { letter: char, class_if_match: i8 },
    /// `polarity` times the sign of `row[column]`, with zero counted as positive.
    RawColumn { column: usize, polarity: i8 },
}

/// A ±1-valued base predictor with a stable identifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakClassifier {
    pub id: String,
    #[serde(flatten)]
    pub kind: WeakKind,
}

impl WeakClassifier {
    pub fn stump(feature: usize, threshold: f64, polarity: i8) -> Self {
        WeakClassifier {
            id: format!("stump_f{feature}_{}", if polarity >= 0 { "pos" } else { "neg" }),
            kind: WeakKind::ThresholdStump { feature, threshold, polarity: unit(polarity) },
        }
    }

    pub fn suffix(letter: char, class_if_match: i8) -> Self {
        let letter = letter.to_ascii_lowercase();
        WeakClassifier {
            id: format!("suffix_{letter}_{}", if class_if_match >= 0 { "pos" } else { "neg" }),
            kind: WeakKind::SuffixLetter { letter, class_if_match: unit(class_if_match) },
        }
    }

    pub fn column(column: usize, polarity: i8) -> Self {
        WeakClassifier {
            id: format!("col{}{}", column + 1, if polarity >= 0 { "" } else { "_neg" }),
            kind: WeakKind::RawColumn { column, polarity: unit(polarity) },
        }
    }

    pub fn predict(&self, row: &[f64]) -> i8 {
        match self.kind {
            WeakKind::ThresholdStump { feature, threshold, polarity } => {
                if row[feature] > threshold {
                    polarity
                } else {
                    -polarity
                }
            }
            WeakKind::SuffixLetter { letter, class_if_match } => {
                let code = (letter as u8).wrapping_sub(b'a') as f64;
                if row[LAST_LETTER_COLUMN] == code {
                    class_if_match
                } else {
                    -class_if_match
                }
            }
            WeakKind::RawColumn { column, polarity } => {
                if row[column] >= 0.0 {
                    polarity
                } else {
                    -polarity
                }
            }
        }
    }

    /// Outputs over every row of `data`.
    pub fn outputs(&self, data: &LabeledDataset) -> Vec<i8> {
        data.features.iter().map(|r| self.predict(r)).collect()
    }
}

fn unit(v: i8) -> i8 {
    if v >= 0 {
        1
    } else {
        -1
    }
}
