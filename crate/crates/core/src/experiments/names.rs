use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{split_validation, summaries, Manifest, OutputDir};
use crate::baselines::{forest_fit, ForestConfig};
use crate::boost::{
    qboost_train, rqboost_train, HardwareOracle, OracleConfig, QBoostConfig, RQBoostConfig, StrongClassifier,
    WeakClassifier,
};
use crate::datasets::{bundled_names, load_names, names_weak_pool, LabeledDataset, PositiveClass};
use crate::error::{Error, Result};
use crate::eval::{auc, kfold, write_metric_csv, write_summary_csv, MetricRow, Summary};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NamesConfig {
    pub seed: u64,
    pub folds: usize,
    pub positive: PositiveClass,
    pub male_file: Option<PathBuf>,
    pub female_file: Option<PathBuf>,
    /// Fall back to the bundled corpus when no files are given.
    pub use_bundled: bool,
    /// Share of each training fold QBoost holds out for validation.
    pub validation_fraction: f64,
    pub qboost: QBoostConfig,
    pub rqboost: RQBoostConfig,
    pub forest: ForestConfig,
}

impl Default for NamesConfig {
    fn default() -> Self {
        let qboost = QBoostConfig { oracle: OracleConfig::Hardware(HardwareOracle::default()), ..Default::default() };
        NamesConfig {
            seed: 0,
            folds: 10,
            positive: PositiveClass::Female,
            male_file: None,
            female_file: None,
            use_bundled: true,
            validation_fraction: 0.2,
            rqboost: RQBoostConfig { inner: qboost.clone(), ..Default::default() },
            qboost,
            forest: ForestConfig::default(),
        }
    }
}

impl NamesConfig {
    /// Uses `oracle` for both QBoost and the RQBoost inner loop.
    pub fn with_oracle(mut self, oracle: OracleConfig) -> Self {
        self.qboost.oracle = oracle.clone();
        self.rqboost.inner.oracle = oracle;
        self
    }

    pub fn load_dataset(&self) -> Result<LabeledDataset> {
        match (&self.male_file, &self.female_file) {
            (Some(m), Some(f)) => load_names(m, f, self.positive),
            (None, None) if self.use_bundled => Ok(bundled_names(self.positive)),
            (None, None) => Err(Error::InvalidConfig("no names files given and the bundled corpus is disabled".into())),
            _ => Err(Error::InvalidConfig("give both male_file and female_file, or neither".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamesFold {
    pub fold: usize,
    pub qboost_members: Vec<String>,
    pub qboost_fallback: Option<String>,
    pub rqboost_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamesResult {
    pub rows: Vec<MetricRow>,
    pub summary: Vec<(String, Summary)>,
    pub folds: Vec<NamesFold>,
    pub manifest: Manifest,
}

impl NamesResult {
    pub fn mean_auc(&self, technique: &str) -> Option<f64> {
        self.summary.iter().find(|(t, _)| t == technique).map(|(_, s)| s.mean)
    }
}

fn pool_outputs(pool: &[WeakClassifier], data: &LabeledDataset) -> Vec<Vec<f64>> {
    data.features.iter().map(|r| pool.iter().map(|c| c.predict(r) as f64).collect()).collect()
}

fn strong_scores(s: &StrongClassifier, data: &LabeledDataset) -> Result<Vec<f64>> {
    data.features.iter().map(|r| s.score(r)).collect()
}

/// K-fold comparison of a random forest on the 52 pool outputs, QBoost and
/// RQBoost, all scored by AUC on the held-out fold. Writes `names_auc.csv`,
/// `names_summary.csv`, `names_folds.json` and the manifest into `out`.
pub fn run_names(cfg: &NamesConfig, out: &Path) -> Result<NamesResult> {
    let data = cfg.load_dataset()?;
    let pool = names_weak_pool();
    let plan = kfold(data.len(), cfg.folds, crate::seed::derive(cfg.seed, &[0]))?;
    let per_fold: Vec<(Vec<MetricRow>, NamesFold)> = (0..cfg.folds)
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

            let forest_cfg = ForestConfig { seed: fold_seed(4), ..cfg.forest };
            let forest = forest_fit(&pool_outputs(&pool, &train), &train.labels, &forest_cfg)?;
            let rf_scores: Vec<f64> = pool_outputs(&pool, &test).iter().map(|r| forest.predict_proba(r)).collect();

            let (qt, qv) = split_validation(&train, cfg.validation_fraction, fold_seed(1))?;
            let (strong, trace) = qboost_train(&pool, &qt, &qv, &cfg.qboost, fold_seed(2))?;

            let rq_cfg = RQBoostConfig { seed: fold_seed(3), ..cfg.rqboost.clone() };
            let fit = rqboost_train(&pool, &train, &rq_cfg)?;
            let rq_scores = test.features.iter().map(|r| fit.model.predict_proba(r)).collect::<Result<Vec<_>>>()?;

            let rows = vec![
                row("random_forest", auc(&rf_scores, &test.labels)?),
                row("qboost", auc(&strong_scores(&strong, &test)?, &test.labels)?),
                row("rqboost", auc(&rq_scores, &test.labels)?),
            ];
            let fold = NamesFold {
                fold: f,
                qboost_members: strong.member_ids(),
                qboost_fallback: trace.fallback,
                rqboost_sizes: fit.model.members.iter().map(StrongClassifier::len).collect(),
            };
            Ok((rows, fold))
        })
        .collect::<Result<_>>()?;
    let (rows, folds): (Vec<Vec<MetricRow>>, Vec<NamesFold>) = per_fold.into_iter().unzip();
    let rows: Vec<MetricRow> = rows.into_iter().flatten().collect();
    let summary = summaries(&rows, "auc")?;

    let mut dir = OutputDir::create(out)?;
    dir.file("names_auc.csv", |p| write_metric_csv(p, &rows))?;
    dir.file("names_summary.csv", |p| write_summary_csv(p, &summary))?;
    dir.json("names_folds.json", &folds)?;
    let manifest = dir.finish("names", cfg.seed, cfg)?;
    Ok(NamesResult { rows, summary, folds, manifest })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smoke() -> NamesConfig {
        let mut cfg = NamesConfig { folds: 2, seed: 9, ..Default::default() }.with_oracle(OracleConfig::BruteForce);
        cfg.forest.trees = 20;
        cfg.rqboost.resamples = 3;
        cfg.qboost.max_outer_iterations = 2;
        cfg.rqboost.inner.max_outer_iterations = 2;
        cfg
    }

    #[test]
    fn two_fold_smoke_run() {
        let dir = tempfile::tempdir().unwrap();
        let res = run_names(&smoke(), dir.path()).unwrap();
        assert_eq!(res.rows.len(), 6);
        assert_eq!(res.summary.len(), 3);
        assert!(res.rows.iter().all(|r| r.value > 0.5 && r.value <= 1.0));
        let csv = std::fs::read_to_string(dir.path().join("names_auc.csv")).unwrap();
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn rejects_half_given_corpus() {
        let cfg = NamesConfig { male_file: Some("m.txt".into()), ..Default::default() };
        assert!(cfg.load_dataset().is_err());
        assert!(NamesConfig { use_bundled: false, ..Default::default() }.load_dataset().is_err());
    }
}
