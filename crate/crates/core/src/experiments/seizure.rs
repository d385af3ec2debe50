use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{split_validation, summaries, Manifest, OutputDir};
use crate::baselines::{forest_fit, logistic_fit, ForestConfig, LogisticOptions, Penalty};
use crate::anneal::SolverConfig;
use crate::boost::{qboost_train, rqboost_train, OracleConfig, QBoostConfig, RQBoostConfig};
use crate::datasets::{
    binarize_features, extract_features, feature_names, gen_synthetic_eeg, BinarizeMethod, ClipLabel, EegConfig,
    FeatureConfig, LabeledDataset,
};
use crate::error::Result;
use crate::eval::{auc, kfold, write_metric_csv, write_summary_csv, MetricRow, Summary};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeizureConfig {
    pub seed: u64,
    pub clips_per_class: usize,
    pub eeg: EegConfig,
    pub features: FeatureConfig,
    pub folds: usize,
    pub validation_fraction: f64,
    pub qboost: QBoostConfig,
    pub rqboost: RQBoostConfig,
    pub forest: ForestConfig,
    /// L2 strength of the logistic baseline on the binarized features.
    pub logistic_lambda: f64,
}

impl Default for SeizureConfig {
    fn default() -> Self {
        let qboost = QBoostConfig {
            oracle: OracleConfig::SimulatedAnnealing { solver: SolverConfig::default() },
            ..Default::default()
        };
        SeizureConfig {
            seed: 0,
            clips_per_class: 40,
            eeg: EegConfig::default(),
            features: FeatureConfig::default(),
            folds: 5,
            validation_fraction: 0.2,
            rqboost: RQBoostConfig { inner: qboost.clone(), ..Default::default() },
            qboost,
            forest: ForestConfig::default(),
            logistic_lambda: 0.01,
        }
    }
}

impl SeizureConfig {
    pub fn with_oracle(mut self, oracle: OracleConfig) -> Self {
        self.qboost.oracle = oracle.clone();
        self.rqboost.inner.oracle = oracle;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeizureResult {
    pub num_features: usize,
    pub rows: Vec<MetricRow>,
    pub summary: Vec<(String, Summary)>,
    /// Per fold, the smallest mean agreement `E[F(x)·y]` of a non-degenerate
    /// stump on the split it was thresholded on.
    pub min_stump_agreement: Vec<f64>,
    pub manifest: Manifest,
}

/// Alternating interictal/preictal clips turned into one feature row each.
pub fn build_seizure_dataset(cfg: &SeizureConfig) -> Result<LabeledDataset> {
    let n = 2 * cfg.clips_per_class;
    let rows: Vec<(Vec<f64>, i8)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let label = if i % 2 == 0 { ClipLabel::Interictal } else { ClipLabel::Preictal };
            let clip = gen_synthetic_eeg(&cfg.eeg, label, crate::seed::derive(cfg.seed, &[10, i as u64]))?;
            Ok((extract_features(&clip, &cfg.features)?, label.sign()))
        })
        .collect::<Result<_>>()?;
    let windows = cfg.features.num_windows(cfg.eeg.num_samples(), cfg.eeg.sample_rate)?;
    let names = feature_names(&cfg.features, cfg.eeg.channels, windows);
    let (features, labels) = rows.into_iter().unzip();
    LabeledDataset::new(features, labels, names)
}

/// K-fold comparison on synthetic EEG: QBoost and RQBoost over median
/// stumps fitted per training fold, a random forest on the raw features,
/// and L2 logistic regression on the binarized features.
pub fn run_seizure(cfg: &SeizureConfig, out: &Path) -> Result<SeizureResult> {
    let data = build_seizure_dataset(cfg)?;
    let plan = kfold(data.len(), cfg.folds, crate::seed::derive(cfg.seed, &[0]))?;
    let per_fold: Vec<(Vec<MetricRow>, f64)> = (0..cfg.folds)
        .into_par_iter()
        .map(|f| -> Result<_> {
            let train = data.subset(&plan.train_rows(f));
            let test = data.subset(&plan.test_rows(f));
            let fold_seed = |stream: u64| crate::seed::derive(cfg.seed, &[stream, f as u64]);
            let cell = format!("fold{f:02}");
            let row = |technique: &str, value: f64| MetricRow {
                technique: technique.into(),
                cell: cell.clone(),
                metric: "auc".into(),
                value,
            };

            let bin = binarize_features(&train, BinarizeMethod::Median)?;
            let min_agreement = bin
                .pool
                .iter()
                .zip(&bin.degenerate)
                .filter(|(_, &d)| !d)
                .map(|(c, _)| {
                    c.outputs(&train).iter().zip(&train.labels).map(|(&o, &y)| (o * y) as f64).sum::<f64>()
                        / train.len() as f64
                })
                .fold(f64::INFINITY, f64::min);
            let pool = bin.pool.clone();

            let (qt, qv) = split_validation(&train, cfg.validation_fraction, fold_seed(1))?;
            let (strong, _) = qboost_train(&pool, &qt, &qv, &cfg.qboost, fold_seed(2))?;
            let q_scores = test.features.iter().map(|r| strong.score(r)).collect::<Result<Vec<_>>>()?;

            let rq_cfg = RQBoostConfig { seed: fold_seed(3), ..cfg.rqboost.clone() };
            let fit = rqboost_train(&pool, &train, &rq_cfg)?;
            let rq_scores = test.features.iter().map(|r| fit.model.predict_proba(r)).collect::<Result<Vec<_>>>()?;

            let forest = forest_fit(&train.features, &train.labels, &ForestConfig { seed: fold_seed(4), ..cfg.forest })?;
            let rf_scores: Vec<f64> = test.features.iter().map(|r| forest.predict_proba(r)).collect();

            let test_bin = bin.transform(&test)?;
            let lr =
                logistic_fit(&bin.data.features, &train.labels, Penalty::L2, cfg.logistic_lambda, &LogisticOptions::default())?;
            let lr_scores: Vec<f64> = test_bin.features.iter().map(|r| lr.predict_proba(r)).collect();

            let rows = vec![
                row("qboost", auc(&q_scores, &test.labels)?),
                row("rqboost", auc(&rq_scores, &test.labels)?),
                row("random_forest", auc(&rf_scores, &test.labels)?),
                row("logistic_l2", auc(&lr_scores, &test.labels)?),
            ];
            Ok((rows, min_agreement))
        })
        .collect::<Result<_>>()?;
    let (rows, min_stump_agreement): (Vec<Vec<MetricRow>>, Vec<f64>) = per_fold.into_iter().unzip();
    let rows: Vec<MetricRow> = rows.into_iter().flatten().collect();
    let summary = summaries(&rows, "auc")?;

    let mut dir = OutputDir::create(out)?;
    dir.file("seizure_features.csv", |p| data.write_csv(p))?;
    dir.file("seizure_auc.csv", |p| write_metric_csv(p, &rows))?;
    dir.file("seizure_summary.csv", |p| write_summary_csv(p, &summary))?;
    let manifest = dir.finish("seizure", cfg.seed, cfg)?;
    Ok(SeizureResult { num_features: data.num_features(), rows, summary, min_stump_agreement, manifest })
}
