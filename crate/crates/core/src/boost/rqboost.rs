use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracle::Oracle;
use super::qboost::{train_with, QBoostConfig, QBoostTrace};
use super::{StrongClassifier, WeakClassifier};
use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RQBoostConfig {
    pub resamples: usize,
    /// Train, validation and holdout shares of each shuffle.
    pub split_fractions: (f64, f64, f64),
    pub inner: QBoostConfig,
    pub seed: u64,
}

impl Default for RQBoostConfig {
    fn default() -> Self {
        RQBoostConfig { resamples: 30, split_fractions: (0.6, 0.2, 0.2), inner: QBoostConfig::default(), seed: 0 }
    }
}

impl RQBoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resamples == 0 {
            return Err(Error::InvalidConfig("at least one resample is required".into()));
        }
        let (a, b, c) = self.split_fractions;
        if !(a > 0.0 && b > 0.0 && c > 0.0) || ((a + b + c) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("split fractions must be positive and sum to 1, got ({a}, {b}, {c})")));
        }
        self.inner.validate()
    }

    /// Row counts for (train, validation); the holdout takes the rest.
    fn split_sizes(&self, n: usize) -> Result<(usize, usize)> {
        let tr = (self.split_fractions.0 * n as f64).round() as usize;
        let va = (self.split_fractions.1 * n as f64).round() as usize;
        if tr == 0 || va == 0 || tr + va >= n {
            return Err(Error::InvalidConfig(format!("{n} rows are too few for the split fractions")));
        }
        Ok((tr, va))
    }
}

/// Ensemble of strong classifiers, one per resample, in resample order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityModel {
    pub members: Vec<StrongClassifier>,
}

impl ProbabilityModel {
    /// Mean over strong classifiers of the fraction of their members voting `+1`.
    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        if self.members.is_empty() {
            return Err(Error::Model("probability model has no strong classifiers".into()));
        }
        let mut total = 0.0;
        for s in &self.members {
            total += s.positive_fraction(row)?;
        }
        Ok(total / self.members.len() as f64)
    }
}

pub fn rqboost_predict_proba(model: &ProbabilityModel, row: &[f64]) -> Result<f64> {
    model.predict_proba(row)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResampleRecord {
    pub train_rows: Vec<usize>,
    pub validation_rows: Vec<usize>,
    pub holdout_rows: Vec<usize>,
    pub trace: QBoostTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RQBoostFit {
    pub model: ProbabilityModel,
    pub resamples: Vec<ResampleRecord>,
}

/// Trains one QBoost ensemble per resample. Resample `r` shuffles the rows
/// with a seed derived from `(cfg.seed, r)` and splits them into train,
/// validation and holdout. Resamples run in parallel; results keep resample order.
pub fn rqboost_train(pool: &[WeakClassifier], data: &LabeledDataset, cfg: &RQBoostConfig) -> Result<RQBoostFit> {
    cfg.validate()?;
    let (n_train, n_val) = cfg.split_sizes(data.len())?;
    let oracle = Oracle::new(&cfg.inner.oracle)?;
    let runs: Vec<(StrongClassifier, ResampleRecord)> = (0..cfg.resamples)
        .into_par_iter()
        .map(|r| {
            let mut order: Vec<usize> = (0..data.len()).collect();
            order.shuffle(&mut crate::seed::child_rng(cfg.seed, &[r as u64, 0]));
            let train_rows = order[..n_train].to_vec();
            let validation_rows = order[n_train..n_train + n_val].to_vec();
            let holdout_rows = order[n_train + n_val..].to_vec();
            let inner_seed = crate::seed::derive(cfg.seed, &[r as u64, 1]);
            let (strong, trace) =
                train_with(pool, &data.subset(&train_rows), &data.subset(&validation_rows), &cfg.inner, inner_seed, &oracle)
                    .map_err(|e| Error::Resample { index: r, source: Box::new(e) })?;
            Ok((strong, ResampleRecord { train_rows, validation_rows, holdout_rows, trace }))
        })
        .collect::<Result<_>>()?;
    let (members, resamples) = runs.into_iter().unzip();
    Ok(RQBoostFit { model: ProbabilityModel { members }, resamples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boost::{qboost_train, OracleConfig, TiePolicy};
    use rand::Rng;

    fn data(n: usize, seed: u64) -> LabeledDataset {
        let mut rng = crate::seed::rng(seed);
        let rows: Vec<Vec<f64>> =
            (0..n).map(|_| (0..6).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()).collect();
        let labels = rows.iter().map(|r| (r[0] + r[1] + r[2]).signum() as i8).collect();
        LabeledDataset::new(rows, labels, (0..6).map(|j| format!("c{j}")).collect()).unwrap()
    }

    fn pool() -> Vec<WeakClassifier> {
        (0..6).map(|c| WeakClassifier::column(c, 1)).collect()
    }

    fn cfg(resamples: usize) -> RQBoostConfig {
        RQBoostConfig {
            resamples,
            inner: QBoostConfig { q: 6, oracle: OracleConfig::BruteForce, ..Default::default() },
            seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn single_resample_matches_qboost() {
        let d = data(100, 1);
        let fit = rqboost_train(&pool(), &d, &cfg(1)).unwrap();
        let rec = &fit.resamples[0];
        assert_eq!((rec.train_rows.len(), rec.validation_rows.len(), rec.holdout_rows.len()), (60, 20, 20));
        let inner_seed = crate::seed::derive(5, &[0, 1]);
        let (strong, trace) =
            qboost_train(&pool(), &d.subset(&rec.train_rows), &d.subset(&rec.validation_rows), &cfg(1).inner, inner_seed)
                .unwrap();
        assert_eq!(fit.model.members, vec![strong]);
        assert_eq!(rec.trace, trace);
    }

    #[test]
    fn deterministic_and_ordered() {
        let d = data(80, 2);
        let a = rqboost_train(&pool(), &d, &cfg(4)).unwrap();
        assert_eq!(a, rqboost_train(&pool(), &d, &cfg(4)).unwrap());
        assert_ne!(a.resamples[0].train_rows, a.resamples[1].train_rows);
    }

    #[test]
    fn probability_semantics() {
        let col = |c| WeakClassifier::column(c, 1);
        let half = StrongClassifier::new(vec![col(0), col(1)], TiePolicy::FixedPositive);
        let all = StrongClassifier::new(vec![col(0)], TiePolicy::FixedPositive);
        let m = ProbabilityModel { members: vec![half.clone(), all.clone()] };
        let row = [1.0, -1.0];
        assert_eq!(rqboost_predict_proba(&m, &row).unwrap(), 0.75);
        let flipped = ProbabilityModel { members: vec![all, half] };
        assert_eq!(flipped.predict_proba(&row).unwrap(), 0.75);
        assert!(ProbabilityModel::default().predict_proba(&row).is_err());
        let broken = ProbabilityModel { members: vec![StrongClassifier::default()] };
        assert!(broken.predict_proba(&row).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(RQBoostConfig { resamples: 0, ..cfg(1) }.validate().is_err());
        assert!(RQBoostConfig { split_fractions: (0.5, 0.5, 0.0), ..cfg(1) }.validate().is_err());
        assert!(RQBoostConfig { split_fractions: (0.5, 0.2, 0.2), ..cfg(1) }.validate().is_err());
        assert!(rqboost_train(&pool(), &data(3, 0), &cfg(1)).is_err());
    }

    #[test]
    fn training_partitions_cover_rows() {
        // 50 independent 60% draws leave a row uncovered with probability 0.4^50
        let d = data(500, 3);
        let c = RQBoostConfig { resamples: 50, inner: QBoostConfig { max_outer_iterations: 1, ..cfg(1).inner }, ..cfg(1) };
        let fit = rqboost_train(&pool(), &d, &c).unwrap();
        let mut seen = vec![false; d.len()];
        for r in &fit.resamples {
            for &i in &r.train_rows {
                seen[i] = true;
            }
        }
        assert!(seen.iter().filter(|&&s| s).count() as f64 > 0.99 * d.len() as f64);
    }
}
