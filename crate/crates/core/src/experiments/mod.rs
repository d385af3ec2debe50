//! End-to-end experiment runners. Each writes CSV/JSON artifacts plus a
//! manifest with the config echo and a SHA-256 of every output file.

mod linsep;
mod names;
mod seizure;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};
use crate::eval::{summarize, MetricRow, Summary};

pub use linsep::{dataset_hash, run_linsep, LinsepCell, LinsepConfig, LinsepResult, LogisticCell};
pub use names::{run_names, NamesConfig, NamesResult};
pub use seizure::{build_seizure_dataset, run_seizure, SeizureConfig, SeizureResult};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub version: String,
    pub config: serde_json::Value,
    pub outputs: Vec<OutputFile>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Artifact directory. Each file is written under a temporary name and
/// renamed into place once complete.
pub(crate) struct OutputDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub(crate) fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(OutputDir { dir: dir.to_path_buf(), written: Vec::new() })
    }

    /// Runs `write` against a temporary path, then renames it to `name`.
    pub(crate) fn file(&mut self, name: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        let tmp = self.dir.join(format!(".{name}.tmp"));
        write(&tmp)?;
        let dest = self.dir.join(name);
        std::fs::rename(&tmp, &dest).map_err(|e| Error::io(&dest, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub(crate) fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.file(name, |p| {
            let text = serde_json::to_string_pretty(value)?;
            std::fs::write(p, text + "\n").map_err(|e| Error::io(p, e))
        })
    }

    pub(crate) fn finish<C: Serialize>(mut self, experiment: &str, seed: u64, config: &C) -> Result<Manifest> {
        let mut outputs = Vec::new();
        for name in &self.written {
            let path = self.dir.join(name);
            let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
            outputs.push(OutputFile { name: name.clone(), sha256: sha256_hex(&bytes) });
        }
        let manifest = Manifest {
            experiment: experiment.to_string(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::to_value(config)?,
            outputs,
        };
        self.json(MANIFEST_FILE, &manifest)?;
        Ok(manifest)
    }
}

/// Summary row per technique, in the order techniques first appear.
pub(crate) fn summaries(rows: &[MetricRow], metric: &str) -> Result<Vec<(String, Summary)>> {
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if r.metric == metric && !names.contains(&r.technique.as_str()) {
            names.push(&r.technique);
        }
    }
    names
        .into_iter()
        .map(|t| {
            let values: Vec<f64> =
                rows.iter().filter(|r| r.technique == t && r.metric == metric).map(|r| r.value).collect();
            Ok((t.to_string(), summarize(&values)?))
        })
        .collect()
}

/// Splits `rows` into a shuffled (train, validation) pair with about
/// `validation_fraction` of the rows held out.
pub(crate) fn split_validation(
    data: &LabeledDataset,
    validation_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    use rand::seq::SliceRandom;
    if !(validation_fraction > 0.0 && validation_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!("validation fraction must be in (0, 1), got {validation_fraction}")));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut crate::seed::rng(seed));
    let nv = ((validation_fraction * data.len() as f64).round() as usize).clamp(1, data.len().saturating_sub(1));
    if nv == 0 || nv >= data.len() {
        return Err(Error::InvalidConfig(format!("{} rows cannot be split for validation", data.len())));
    }
    Ok((data.subset(&order[nv..]), data.subset(&order[..nv])))
}
