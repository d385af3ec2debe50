//! QBoost and RQBoost: greedy ensembles of ±1 weak classifiers whose subsets
//! are chosen by minimizing a quadratic loss with a binary optimizer.

mod oracle;
mod qboost;
mod rqboost;
mod weak;

use std::hash::{DefaultHasher, Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

pub use oracle::{HardwareOracle, OracleConfig, OracleOutcome};
pub use qboost::{qboost_train, AcceptStep, OracleCall, QBoostConfig, QBoostTrace};
pub use rqboost::{rqboost_predict_proba, rqboost_train, ProbabilityModel, RQBoostConfig, RQBoostFit, ResampleRecord};
pub use weak::{WeakClassifier, WeakKind};

/// How a zero vote sum is resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TiePolicy {
    #[default]
    FixedPositive,
    /// A coin keyed by `seed` and the row's values, so a row always gets the same answer.
    SeededCoin { seed: u64 },
}

impl TiePolicy {
    pub fn resolve(&self, row: &[f64]) -> i8 {
        match *self {
            TiePolicy::FixedPositive => 1,
            TiePolicy::SeededCoin { seed } => {
                let mut h = DefaultHasher::new();
                for v in row {
                    v.to_bits().hash(&mut h);
                }
                if crate::seed::derive(seed, &[h.finish()]) & 1 == 1 {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

/// Unweighted vote over the accepted members.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StrongClassifier {
    pub members: Vec<WeakClassifier>,
    pub tie_policy: TiePolicy,
}

impl StrongClassifier {
    pub fn new(members: Vec<WeakClassifier>, tie_policy: TiePolicy) -> Self {
        StrongClassifier { members, tie_policy }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn vote_sum(&self, row: &[f64]) -> i64 {
        self.members.iter().map(|m| m.predict(row) as i64).sum()
    }

    fn check_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Model("strong classifier has no members".into()));
        }
        Ok(())
    }

    pub fn predict(&self, row: &[f64]) -> Result<i8> {
        self.check_nonempty()?;
        Ok(match self.vote_sum(row) {
            0 => self.tie_policy.resolve(row),
            s if s > 0 => 1,
            _ => -1,
        })
    }

    /// Fraction of members voting `+1`.
    pub fn positive_fraction(&self, row: &[f64]) -> Result<f64> {
        self.check_nonempty()?;
        let pos = self.members.iter().filter(|m| m.predict(row) == 1).count();
        Ok(pos as f64 / self.len() as f64)
    }

    /// Mean vote in `[-1, 1]`, a continuous score for ranking metrics.
    pub fn score(&self, row: &[f64]) -> Result<f64> {
        self.check_nonempty()?;
        Ok(self.vote_sum(row) as f64 / self.len() as f64)
    }

    pub fn error_rate(&self, data: &LabeledDataset) -> Result<f64> {
        let mut wrong = 0;
        for (row, &y) in data.features.iter().zip(&data.labels) {
            if self.predict(row)? != y {
                wrong += 1;
            }
        }
        Ok(wrong as f64 / data.len().max(1) as f64)
    }

    pub fn member_ids(&self) -> Vec<String> {
        self.members.iter().map(|m| m.id.clone()).collect()
    }
}

/// `1 / (|T| + Q)`.
pub fn kappa(strong_len: usize, q: usize) -> f64 {
    1.0 / (strong_len + q) as f64
}

/// Targets left after the current ensemble: `y_s − κ Σ_t F_t(x_s)`.
pub fn residuals(train: &LabeledDataset, strong: &StrongClassifier, q: usize) -> Vec<f64> {
    let k = kappa(strong.len(), q);
    train.features.iter().zip(&train.labels).map(|(row, &y)| y as f64 - k * strong.vote_sum(row) as f64).collect()
}

/// Boosting loss of a batch as a QUBO plus constant.
///
/// For `w ∈ {0,1}^Q'` the loss `½ Σ_s (κ Σ_j w_j F_j(x_s) − ŷ_s)² + λ Σ_j w_j`
/// equals `energy(w) + offset`, using `w_j² = w_j` and `F_j² = 1`.
pub fn build_qboost_qubo(
    batch: &[WeakClassifier],
    train: &LabeledDataset,
    yhat: &[f64],
    kappa: f64,
    lambda: f64,
) -> Result<(QuboProblem, f64)> {
    let outputs: Vec<Vec<i8>> = batch.iter().map(|c| c.outputs(train)).collect();
    qubo_from_outputs(&outputs, yhat, kappa, lambda)
}

pub(crate) fn qubo_from_outputs(outputs: &[Vec<i8>], yhat: &[f64], kappa: f64, lambda: f64) -> Result<(QuboProblem, f64)> {
    if outputs.is_empty() {
        return Err(Error::Empty("boosting batch has no classifiers".into()));
    }
    if let Some(o) = outputs.iter().find(|o| o.len() != yhat.len()) {
        return Err(Error::Dimension { expected: yhat.len(), actual: o.len() });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("lambda must be finite and non-negative, got {lambda}")));
    }
    let s = yhat.len() as f64;
    let k2 = kappa * kappa;
    let mut q = QuboProblem::new(outputs.len());
    for (j, fj) in outputs.iter().enumerate() {
        let agree: f64 = fj.iter().zip(yhat).map(|(&f, &y)| f as f64 * y).sum();
        q.add_linear(j, 0.5 * k2 * s - kappa * agree + lambda)?;
        for (k, fk) in outputs.iter().enumerate().skip(j + 1) {
            let c: i64 = fj.iter().zip(fk).map(|(&a, &b)| (a * b) as i64).sum();
            if c != 0 {
                q.add_quadratic(j, k, k2 * c as f64)?;
            }
        }
    }
    let offset = 0.5 * yhat.iter().map(|y| y * y).sum::<f64>();
    Ok((q, offset))
}
