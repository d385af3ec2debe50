use std::collections::BTreeMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::anneal::{brute_force_solve, simulated_anneal, solve_hardware_model, IceModel, SolverConfig};
use crate::chimera::{
    chain_strength_sweep, clique_embed_n, heuristic_embed, ChimeraGraph, Embedding, ProblemGraph, SweepOutcome,
    DEFAULT_BREAK_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

/// Emulated annealer used as the boosting oracle.
///
/// Chain strengths are given relative to the largest absolute Ising
/// coefficient of each logical problem. With several strengths the smallest
/// one meeting `break_threshold` is used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HardwareOracle {
    pub grid_size: usize,
    /// Uniformly random dead qubits; when nonzero, embeddings come from the heuristic.
    pub defect_count: usize,
    pub defect_seed: u64,
    pub relative_chain_strengths: Vec<f64>,
    pub break_threshold: f64,
    pub ice: IceModel,
    pub solver: SolverConfig,
}

impl Default for HardwareOracle {
    fn default() -> Self {
        HardwareOracle {
            grid_size: 8,
            defect_count: 0,
            defect_seed: 0,
            relative_chain_strengths: vec![0.5, 1.0, 2.0],
            break_threshold: DEFAULT_BREAK_THRESHOLD,
            ice: IceModel::default(),
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleConfig {
    BruteForce,
    SimulatedAnnealing {
        #[serde(default)]
        solver: SolverConfig,
    },
    Hardware(HardwareOracle),
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig::SimulatedAnnealing { solver: SolverConfig::default() }
    }
}

/// Best assignment found for one boosting QUBO.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub w: Vec<u8>,
    /// QUBO energy plus offset, i.e. the boosting loss at `w`.
    pub loss: f64,
    pub chain_strength: Option<f64>,
    pub break_fraction: Option<f64>,
    /// No swept strength met the break threshold; the largest one was used.
    pub sweep_exhausted: bool,
}

/// Oracle with its hardware graph and per-size embedding cache.
pub(crate) struct Oracle {
    cfg: OracleConfig,
    graph: Option<ChimeraGraph>,
    embeddings: Mutex<BTreeMap<usize, Embedding>>,
}

impl Oracle {
    pub(crate) fn new(cfg: &OracleConfig) -> Result<Self> {
        let graph = match cfg {
            OracleConfig::Hardware(h) => {
                if h.relative_chain_strengths.is_empty()
                    || h.relative_chain_strengths.iter().any(|&c| !(c >= 0.0 && c.is_finite()))
                {
                    return Err(Error::InvalidConfig("relative chain strengths must be non-empty and >= 0".into()));
                }
                h.ice.validate()?;
                h.solver.validate()?;
                Some(ChimeraGraph::with_random_defects(h.grid_size, h.defect_count, h.defect_seed)?)
            }
            OracleConfig::SimulatedAnnealing { solver } => {
                solver.validate()?;
                None
            }
            OracleConfig::BruteForce => None,
        };
        Ok(Oracle { cfg: cfg.clone(), graph, embeddings: Mutex::new(BTreeMap::new()) })
    }

    fn embedding(&self, graph: &ChimeraGraph, n: usize, seed: u64) -> Result<Embedding> {
        let mut cache = self.embeddings.lock().expect("embedding cache poisoned");
        if let Some(e) = cache.get(&n) {
            return Ok(e.clone());
        }
        let emb = if graph.is_perfect() {
            clique_embed_n(graph, n)?
        } else {
            heuristic_embed(&ProblemGraph::complete(n), graph, seed, 10)
                .ok_or_else(|| Error::Embedding(format!("no embedding of K_{n} found on the defective graph")))?
        };
        cache.insert(n, emb.clone());
        Ok(emb)
    }

    pub(crate) fn solve(&self, q: &QuboProblem, offset: f64, seed: u64) -> Result<OracleOutcome> {
        let plain = |set: crate::anneal::SampleSet| -> Result<OracleOutcome> {
            let best = set.best().ok_or_else(|| Error::Empty("solver returned no samples".into()))?;
            Ok(OracleOutcome {
                w: best.assignment.bits().to_vec(),
                loss: best.energy + offset,
                chain_strength: None,
                break_fraction: None,
                sweep_exhausted: false,
            })
        };
        match &self.cfg {
            OracleConfig::BruteForce => plain(brute_force_solve(q)?),
            OracleConfig::SimulatedAnnealing { solver } => plain(simulated_anneal(q, &solver.clone().with_seed(seed))?),
            OracleConfig::Hardware(h) => {
                let graph = self.graph.as_ref().expect("hardware oracle has a graph");
                let emb = self.embedding(graph, q.num_vars(), h.defect_seed)?;
                let ising = q.to_ising();
                let scale = match ising.max_abs_linear().max(ising.max_abs_quadratic()) {
                    s if s > 0.0 => s,
                    _ => 1.0,
                };
                let mut grid: Vec<f64> = h.relative_chain_strengths.iter().map(|r| r * scale).collect();
                grid.sort_by(f64::total_cmp);
                grid.dedup();
                let solver = h.solver.clone().with_seed(seed);
                let (solution, strength, exhausted) = if grid.len() == 1 {
                    (solve_hardware_model(q, graph, &emb, grid[0], &h.ice, &solver)?, grid[0], false)
                } else {
                    match chain_strength_sweep(q, graph, &emb, &grid, &h.ice, &solver, h.break_threshold)? {
                        SweepOutcome::Selected { chain_strength, solution, .. } => (solution, chain_strength, false),
                        SweepOutcome::Exhausted { .. } => {
                            let top = grid[grid.len() - 1];
                            (solve_hardware_model(q, graph, &emb, top, &h.ice, &solver)?, top, true)
                        }
                    }
                };
                let best = solution.samples.best().ok_or_else(|| Error::Empty("device returned no samples".into()))?;
                Ok(OracleOutcome {
                    w: best.assignment.bits().to_vec(),
                    loss: best.energy + offset,
                    chain_strength: Some(strength),
                    break_fraction: Some(solution.best_break_fraction),
                    sweep_exhausted: exhausted,
                })
            }
        }
    }
}
