use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Manifest, OutputDir};
use crate::baselines::{default_lambda_grid, logistic_fit, LogisticOptions, Penalty};
use crate::boost::{qboost_train, HardwareOracle, OracleConfig, QBoostConfig, WeakClassifier};
use crate::datasets::{gen_linsep, LabeledDataset, BAIT_COLUMN, LINSEP_COLS};
use crate::error::{Error, Result};
use crate::eval::{confusion, ConfusionMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinsepConfig {
    pub seed: u64,
    pub q: usize,
    pub lambda_grid: Vec<f64>,
    /// Relative to the largest Ising coefficient of each boosting problem.
    pub chain_strength_grid: Vec<f64>,
    /// Device model; its own chain strengths are replaced by each grid value.
    pub hardware: HardwareOracle,
    pub logistic_lambdas: Vec<f64>,
    pub logistic: LogisticOptions,
}

impl Default for LinsepConfig {
    fn default() -> Self {
        LinsepConfig {
            seed: 0,
            q: 13,
            lambda_grid: vec![0.0, 0.001, 0.01, 0.05, 0.1],
            chain_strength_grid: vec![0.5, 1.0, 2.0, 4.0],
            hardware: HardwareOracle::default(),
            logistic_lambdas: default_lambda_grid(),
            logistic: LogisticOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinsepCell {
    pub lambda: f64,
    pub chain_strength: f64,
    pub members: Vec<String>,
    pub bait_included: bool,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub mean_break_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticCell {
    pub penalty: Penalty,
    pub lambda: f64,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub nonzero_weights: usize,
    pub bait_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinsepResult {
    pub dataset_sha256: String,
    pub qboost: Vec<LinsepCell>,
    pub logistic: Vec<LogisticCell>,
    pub manifest: Manifest,
}

/// SHA-256 over the dataset's CSV form.
pub fn dataset_hash(data: &LabeledDataset) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(data.feature_names.iter().map(String::as_str).chain(["label"]))?;
    for (row, y) in data.features.iter().zip(&data.labels) {
        w.write_record(row.iter().map(|v| v.to_string()).chain([y.to_string()]))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidProblem(e.to_string()))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// The columns a learner may see: everything except the ground truth.
fn visible(data: &LabeledDataset) -> Vec<Vec<f64>> {
    data.features.iter().map(|r| r[1..].to_vec()).collect()
}

/// Sweeps QBoost over (λ, chain strength) on the hardware model with the
/// pool `col2..col13`, scoring training accuracy, and fits L1 and L2
/// logistic regression on the same columns over a λ grid.
pub fn run_linsep(cfg: &LinsepConfig, out: &Path) -> Result<LinsepResult> {
    let data = gen_linsep(cfg.seed);
    let pool: Vec<WeakClassifier> = (1..LINSEP_COLS).map(|c| WeakClassifier::column(c, 1)).collect();
    let bait_id = WeakClassifier::column(BAIT_COLUMN, 1).id;

    let grid: Vec<(usize, f64, f64)> = cfg
        .lambda_grid
        .iter()
        .flat_map(|&l| cfg.chain_strength_grid.iter().map(move |&c| (l, c)))
        .enumerate()
        .map(|(i, (l, c))| (i, l, c))
        .collect();
    let qboost: Vec<LinsepCell> = grid
        .par_iter()
        .map(|&(i, lambda, cs)| -> Result<LinsepCell> {
            let hw = HardwareOracle { relative_chain_strengths: vec![cs], ..cfg.hardware.clone() };
            let qcfg = QBoostConfig {
                q: cfg.q,
                lambda_grid: vec![lambda],
                oracle: OracleConfig::Hardware(hw),
                ..Default::default()
            };
            let (strong, trace) = qboost_train(&pool, &data, &data, &qcfg, crate::seed::derive(cfg.seed, &[1, i as u64]))?;
            let pred = data.features.iter().map(|r| strong.predict(r)).collect::<Result<Vec<_>>>()?;
            let m = confusion(&pred, &data.labels)?;
            let breaks: Vec<f64> = trace.calls.iter().filter_map(|c| c.break_fraction).collect();
            let members = strong.member_ids();
            Ok(LinsepCell {
                lambda,
                chain_strength: cs,
                bait_included: members.contains(&bait_id),
                members,
                accuracy: m.accuracy(),
                confusion: m,
                mean_break_fraction: breaks.iter().sum::<f64>() / breaks.len().max(1) as f64,
            })
        })
        .collect::<Result<_>>()?;

    let x = visible(&data);
    let lgrid: Vec<(Penalty, f64)> =
        [Penalty::L1, Penalty::L2].iter().flat_map(|&p| cfg.logistic_lambdas.iter().map(move |&l| (p, l))).collect();
    let logistic: Vec<LogisticCell> = lgrid
        .par_iter()
        .map(|&(penalty, lambda)| -> Result<LogisticCell> {
            let m = logistic_fit(&x, &data.labels, penalty, lambda, &cfg.logistic)?;
            let pred: Vec<i8> = x.iter().map(|r| m.predict(r)).collect();
            let c = confusion(&pred, &data.labels)?;
            Ok(LogisticCell {
                penalty,
                lambda,
                accuracy: c.accuracy(),
                confusion: c,
                nonzero_weights: m.nonzero_weights(),
                bait_weight: m.weights[BAIT_COLUMN - 1],
            })
        })
        .collect::<Result<_>>()?;

    let dataset_sha256 = dataset_hash(&data)?;
    let mut dir = OutputDir::create(out)?;
    dir.file("linsep_data.csv", |p| data.write_csv(p))?;
    dir.file("linsep_qboost.csv", |p| {
        let mut w = csv::Writer::from_path(p)?;
        w.write_record([
            "lambda",
            "chain_strength",
            "accuracy",
            "bait_included",
            "tp",
            "fn",
            "fp",
            "tn",
            "mean_break_fraction",
            "members",
        ])?;
        for c in &qboost {
            let m = c.confusion;
            w.write_record([
                c.lambda.to_string(),
                c.chain_strength.to_string(),
                c.accuracy.to_string(),
                c.bait_included.to_string(),
                m.tp.to_string(),
                m.fn_.to_string(),
                m.fp.to_string(),
                m.tn.to_string(),
                c.mean_break_fraction.to_string(),
                c.members.join(" "),
            ])?;
        }
        w.flush().map_err(|e| Error::io(p, e))
    })?;
    dir.file("linsep_logistic.csv", |p| {
        let mut w = csv::Writer::from_path(p)?;
        w.write_record(["penalty", "lambda", "accuracy", "tp", "fn", "fp", "tn", "nonzero_weights", "bait_weight"])?;
        for c in &logistic {
            let m = c.confusion;
            w.write_record([
                format!("{:?}", c.penalty).to_lowercase(),
                c.lambda.to_string(),
                c.accuracy.to_string(),
                m.tp.to_string(),
                m.fn_.to_string(),
                m.fp.to_string(),
                m.tn.to_string(),
                c.nonzero_weights.to_string(),
                c.bait_weight.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(p, e))
    })?;
    let manifest = dir.finish("linsep", cfg.seed, &(cfg, &dataset_sha256))?;
    Ok(LinsepResult { dataset_sha256, qboost, logistic, manifest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::IceModel;

    #[test]
    fn hash_is_stable_per_seed() {
        assert_eq!(dataset_hash(&gen_linsep(4)).unwrap(), dataset_hash(&gen_linsep(4)).unwrap());
        assert_ne!(dataset_hash(&gen_linsep(4)).unwrap(), dataset_hash(&gen_linsep(5)).unwrap());
    }

    #[test]
    fn small_grid_writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = LinsepConfig {
            lambda_grid: vec![0.01],
            chain_strength_grid: vec![1.0],
            hardware: HardwareOracle { ice: IceModel::disabled(), ..Default::default() },
            logistic_lambdas: vec![0.01],
            ..Default::default()
        };
        let res = run_linsep(&cfg, dir.path()).unwrap();
        assert_eq!((res.qboost.len(), res.logistic.len()), (1, 2));
        assert!(res.qboost[0].accuracy > 0.5);
        for f in ["linsep_data.csv", "linsep_qboost.csv", "linsep_logistic.csv", "manifest.json"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }
}
