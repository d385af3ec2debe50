//! Optimization oracles: exhaustive search, simulated annealing and an
//! emulated annealer pipeline with control error.

mod brute;
mod hardware;
mod ice;
mod sa;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{Assignment, QuboProblem};

pub use brute::{brute_force_solve, BRUTE_FORCE_LIMIT, MAX_REPORTED_TIES};
pub use hardware::{solve_hardware_model, HardwareSolution};
pub use ice::{apply_ice, quantize_coefficients, quantize_device, IceModel};
pub use sa::simulated_anneal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    BruteForce,
    SimulatedAnnealing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleShape {
    Geometric,
    Linear,
}

/// Annealing temperatures, in units of the problem's largest absolute coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperatureSchedule {
    pub t_start: f64,
    pub t_end: f64,
    pub shape: ScheduleShape,
}

impl TemperatureSchedule {
    /// Relative temperature at sweep `k` of `sweeps`.
    pub fn at(&self, k: usize, sweeps: usize) -> f64 {
        if sweeps <= 1 {
            return self.t_end;
        }
        let frac = k as f64 / (sweeps - 1) as f64;
        match self.shape {
            ScheduleShape::Geometric => self.t_start * (self.t_end / self.t_start).powf(frac),
            ScheduleShape::Linear => self.t_start + (self.t_end - self.t_start) * frac,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub num_reads: usize,
    pub sweeps_per_read: usize,
    pub temperature_schedule: TemperatureSchedule,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kind: SolverKind::SimulatedAnnealing,
            num_reads: 16,
            sweeps_per_read: 400,
            temperature_schedule: TemperatureSchedule { t_start: 2.0, t_end: 0.02, shape: ScheduleShape::Geometric },
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn brute_force() -> Self {
        SolverConfig { kind: SolverKind::BruteForce, ..Default::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.temperature_schedule;
        if !(s.t_start.is_finite() && s.t_end > 0.0 && s.t_start > s.t_end) {
            return Err(Error::InvalidConfig(format!(
                "temperature schedule needs t_start > t_end > 0 (got {} -> {})",
                s.t_start, s.t_end
            )));
        }
        if self.num_reads == 0 || self.sweeps_per_read == 0 {
            return Err(Error::InvalidConfig("num_reads and sweeps_per_read must be at least 1".into()));
        }
        Ok(())
    }
}

/// Solves with the configured solver kind.
pub fn solve(q: &QuboProblem, cfg: &SolverConfig) -> Result<SampleSet> {
    match cfg.kind {
        SolverKind::BruteForce => brute_force_solve(q),
        SolverKind::SimulatedAnnealing => simulated_anneal(q, cfg),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub assignment: Assignment,
    pub energy: f64,
    pub multiplicity: usize,
}

/// Distinct assignments sorted by ascending energy (ties by assignment).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    samples: Vec<Sample>,
}

impl SampleSet {
    /// Aggregates raw reads, evaluating every energy exactly against `q`.
    pub fn from_reads(q: &QuboProblem, reads: impl IntoIterator<Item = Assignment>) -> Result<Self> {
        let mut counts: BTreeMap<Assignment, usize> = BTreeMap::new();
        for a in reads {
            *counts.entry(a).or_insert(0) += 1;
        }
        let samples = counts
            .into_iter()
            .map(|(assignment, multiplicity)| {
                Ok(Sample { energy: q.energy(&assignment)?, assignment, multiplicity })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_samples(samples))
    }

    pub(crate) fn from_samples(mut samples: Vec<Sample>) -> Self {
        samples.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.assignment.cmp(&b.assignment)));
        SampleSet { samples }
    }

    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_reads(&self) -> usize {
        self.samples.iter().map(|s| s.multiplicity).sum()
    }
}
