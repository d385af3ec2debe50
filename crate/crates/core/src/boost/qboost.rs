use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::oracle::{Oracle, OracleConfig};
use super::{kappa, qubo_from_outputs, StrongClassifier, TiePolicy, WeakClassifier};
use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};

const RANK_STREAM: u64 = 0xA11C;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QBoostConfig {
    /// Batch size, also the constant in the `1 / (|T| + Q)` normalization.
    pub q: usize,
    pub lambda_grid: Vec<f64>,
    pub max_outer_iterations: usize,
    pub oracle: OracleConfig,
    pub tie_policy: TiePolicy,
}

impl Default for QBoostConfig {
    fn default() -> Self {
        QBoostConfig {
            q: 10,
            lambda_grid: vec![0.0, 0.01, 0.1],
            max_outer_iterations: 20,
            oracle: OracleConfig::default(),
            tie_policy: TiePolicy::FixedPositive,
        }
    }
}

impl QBoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q == 0 {
            return Err(Error::InvalidConfig("Q must be at least 1".into()));
        }
        if self.lambda_grid.is_empty() || self.lambda_grid.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
            return Err(Error::InvalidConfig("lambda grid must be non-empty with finite values >= 0".into()));
        }
        if self.max_outer_iterations == 0 {
            return Err(Error::InvalidConfig("max_outer_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// One oracle call on one (batch, λ) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCall {
    pub iteration: usize,
    pub batch: usize,
    pub lambda: f64,
    pub batch_ids: Vec<String>,
    pub selected_ids: Vec<String>,
    pub loss: f64,
    /// Validation error with the selection added; absent when nothing was selected.
    pub validation_error: Option<f64>,
    pub chain_strength: Option<f64>,
    pub break_fraction: Option<f64>,
    pub sweep_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptStep {
    pub iteration: usize,
    pub batch: usize,
    pub lambda: f64,
    pub ids: Vec<String>,
    pub validation_error: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QBoostTrace {
    pub calls: Vec<OracleCall>,
    pub accepted: Vec<AcceptStep>,
    /// Set when no selection was ever accepted and the single best pool member was used.
    pub fallback: Option<String>,
    pub validation_error: f64,
}

/// Greedy QBoost.
///
/// Each pass ranks the unused pool members by agreement with the current
/// residuals, cuts the ranking into batches of `Q`, and for every batch and
/// every λ solves the boosting QUBO. The selection with the lowest
/// validation error (larger λ on ties) is added to the ensemble when it
/// strictly lowers the validation error. Training stops after a pass with no
/// acceptance or after `max_outer_iterations` passes. Members are never removed.
pub fn qboost_train(
    pool: &[WeakClassifier],
    train: &LabeledDataset,
    validation: &LabeledDataset,
    cfg: &QBoostConfig,
    seed: u64,
) -> Result<(StrongClassifier, QBoostTrace)> {
    cfg.validate()?;
    let oracle = Oracle::new(&cfg.oracle)?;
    train_with(pool, train, validation, cfg, seed, &oracle)
}

pub(crate) fn train_with(
    pool: &[WeakClassifier],
    train: &LabeledDataset,
    validation: &LabeledDataset,
    cfg: &QBoostConfig,
    seed: u64,
    oracle: &Oracle,
) -> Result<(StrongClassifier, QBoostTrace)> {
    if pool.is_empty() {
        return Err(Error::Empty("weak classifier pool is empty".into()));
    }
    if train.is_empty() || validation.is_empty() {
        return Err(Error::Empty("training and validation splits must be non-empty".into()));
    }
    let f_train: Vec<Vec<i8>> = pool.iter().map(|c| c.outputs(train)).collect();
    let f_val: Vec<Vec<i8>> = pool.iter().map(|c| c.outputs(validation)).collect();
    let ties: Vec<i8> = validation.features.iter().map(|r| cfg.tie_policy.resolve(r)).collect();
    let val_error = |votes: &[i64]| {
        let wrong = votes
            .iter()
            .zip(&ties)
            .zip(&validation.labels)
            .filter(|((&v, &t), &y)| (if v == 0 { t } else { v.signum() as i8 }) != y)
            .count();
        wrong as f64 / votes.len() as f64
    };
    let with = |votes: &[i64], extra: &[usize]| {
        let mut v = votes.to_vec();
        for &j in extra {
            for (s, &f) in f_val[j].iter().enumerate() {
                v[s] += f as i64;
            }
        }
        v
    };

    let mut tiebreak: Vec<usize> = (0..pool.len()).collect();
    tiebreak.shuffle(&mut crate::seed::child_rng(seed, &[RANK_STREAM]));

    let mut members: Vec<usize> = Vec::new();
    let mut used = vec![false; pool.len()];
    let mut train_votes = vec![0i64; train.len()];
    let mut val_votes = vec![0i64; validation.len()];
    let mut current = f64::INFINITY;
    let mut trace = QBoostTrace::default();
    let ids = |js: &[usize]| js.iter().map(|&j| pool[j].id.clone()).collect::<Vec<_>>();

    for iteration in 0..cfg.max_outer_iterations {
        let yhat = targets(train, &train_votes, kappa(members.len(), cfg.q));
        let agreement = |j: usize| f_train[j].iter().zip(&yhat).map(|(&f, &y)| f as f64 * y).sum::<f64>();
        let mut ranking: Vec<(usize, f64)> =
            tiebreak.iter().copied().filter(|&j| !used[j]).map(|j| (j, agreement(j))).collect();
        ranking.sort_by(|a, b| b.1.total_cmp(&a.1));
        let ranking: Vec<usize> = ranking.into_iter().map(|(j, _)| j).collect();

        let mut accepted_any = false;
        for (b, batch) in ranking.chunks(cfg.q).enumerate() {
            let k = kappa(members.len(), cfg.q);
            let yhat = targets(train, &train_votes, k);
            let outputs: Vec<Vec<i8>> = batch.iter().map(|&j| f_train[j].clone()).collect();
            let mut best: Option<(f64, f64, Vec<usize>)> = None;
            for (li, &lambda) in cfg.lambda_grid.iter().enumerate() {
                let (qubo, offset) = qubo_from_outputs(&outputs, &yhat, k, lambda)?;
                let call_seed = crate::seed::derive(seed, &[iteration as u64, b as u64, li as u64]);
                let out = oracle.solve(&qubo, offset, call_seed).map_err(|e| Error::Oracle {
                    context: format!("iteration {iteration}, batch {b}, lambda {lambda}"),
                    source: Box::new(e),
                })?;
                let selected: Vec<usize> = batch.iter().zip(&out.w).filter(|(_, &w)| w == 1).map(|(&j, _)| j).collect();
                let err = (!selected.is_empty()).then(|| val_error(&with(&val_votes, &selected)));
                trace.calls.push(OracleCall {
                    iteration,
                    batch: b,
                    lambda,
                    batch_ids: ids(batch),
                    selected_ids: ids(&selected),
                    loss: out.loss,
                    validation_error: err,
                    chain_strength: out.chain_strength,
                    break_fraction: out.break_fraction,
                    sweep_exhausted: out.sweep_exhausted,
                });
                if let Some(e) = err {
                    let better = match &best {
                        None => true,
                        Some((be, bl, _)) => e < *be || (e == *be && lambda > *bl),
                    };
                    if better {
                        best = Some((e, lambda, selected));
                    }
                }
            }
            if let Some((e, lambda, selected)) = best {
                if e < current {
                    for &j in &selected {
                        used[j] = true;
                        for (s, &f) in f_train[j].iter().enumerate() {
                            train_votes[s] += f as i64;
                        }
                    }
                    val_votes = with(&val_votes, &selected);
                    members.extend(&selected);
                    current = e;
                    accepted_any = true;
                    trace.accepted.push(AcceptStep { iteration, batch: b, lambda, ids: ids(&selected), validation_error: e });
                }
            }
        }
        if !accepted_any {
            break;
        }
    }

    if members.is_empty() {
        let (j, e) = (0..pool.len())
            .map(|j| (j, val_error(&with(&val_votes, &[j]))))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        members.push(j);
        current = e;
        trace.fallback = Some(pool[j].id.clone());
    }
    trace.validation_error = current;
    let strong = StrongClassifier::new(members.iter().map(|&j| pool[j].clone()).collect(), cfg.tie_policy);
    Ok((strong, trace))
}

fn targets(train: &LabeledDataset, votes: &[i64], k: f64) -> Vec<f64> {
    train.labels.iter().zip(votes).map(|(&y, &v)| y as f64 - k * v as f64).collect()
}
