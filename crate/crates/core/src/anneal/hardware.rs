use std::collections::BTreeMap;

use serde::Serialize;

use super::{apply_ice, quantize_device, solve, IceModel, Sample, SampleSet, SolverConfig};
use crate::chimera::{embed_problem, unembed, ChimeraGraph, Embedding};
use crate::error::Result;
use crate::qubo::{Assignment, IsingProblem, QuboProblem};

const ICE_STREAM: u64 = 0x1CE;
const SOLVE_STREAM: u64 = 0x501E;
const UNEMBED_STREAM: u64 = 0xC011;

/// Logical samples from the emulated device plus chain diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardwareSolution {
    pub samples: SampleSet,
    /// Read-weighted mean break fraction of the physical reads behind each
    /// logical sample, aligned with `samples`.
    pub break_fractions: Vec<f64>,
    pub mean_break_fraction: f64,
    /// Break fraction behind the lowest-energy logical sample.
    pub best_break_fraction: f64,
    /// Factor applied to the physical Ising problem to fit the device ranges.
    pub scale_factor: f64,
    pub num_physical_qubits: usize,
}

/// Emulated annealer run.
///
/// The problem is embedded with `chain_strength`, restricted to the chain
/// qubits, converted to Ising form and scaled to fill the device ranges,
/// quantized if configured, perturbed once by control error, then solved.
/// Each physical sample is unembedded by majority vote and its logical
/// energy is recomputed on `q`.
pub fn solve_hardware_model(
    q: &QuboProblem,
    graph: &ChimeraGraph,
    emb: &Embedding,
    chain_strength: f64,
    ice: &IceModel,
    cfg: &SolverConfig,
) -> Result<HardwareSolution> {
    ice.validate()?;
    cfg.validate()?;
    let emb = emb.truncated(q.num_vars());
    let physical = embed_problem(q, graph, &emb, chain_strength)?;
    let used = emb.used_qubits();
    let compact = physical.qubo.reindexed(&used)?.to_ising();

    let scale_factor = autoscale_factor(&compact, ice);
    let programmed = quantize_device(&compact.scaled(scale_factor)?, ice)?;
    let noisy = apply_ice(&programmed, ice, crate::seed::derive(cfg.seed, &[ICE_STREAM]))?;

    let solver_cfg = cfg.clone().with_seed(crate::seed::derive(cfg.seed, &[SOLVE_STREAM]));
    let physical_set = solve(&noisy.to_qubo(), &solver_cfg)?;

    let mut full = vec![0u8; graph.num_qubits()];
    let mut logical: BTreeMap<Assignment, (usize, f64)> = BTreeMap::new();
    for (k, s) in physical_set.iter().enumerate() {
        for (&p, &b) in used.iter().zip(s.assignment.bits()) {
            full[p] = b;
        }
        let coin = crate::seed::derive(cfg.seed, &[UNEMBED_STREAM, k as u64]);
        let (a, brk) = unembed(&Assignment::new(full.clone())?, &emb, coin)?;
        let entry = logical.entry(a).or_insert((0, 0.0));
        entry.0 += s.multiplicity;
        entry.1 += brk * s.multiplicity as f64;
    }

    let mut rows = logical
        .into_iter()
        .map(|(a, (mult, brk_sum))| Ok((q.energy(&a)?, a, mult, brk_sum / mult as f64)))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));

    let total: usize = rows.iter().map(|r| r.2).sum();
    let mean_break_fraction = rows.iter().map(|r| r.3 * r.2 as f64).sum::<f64>() / total.max(1) as f64;
    let best_break_fraction = rows.first().map_or(0.0, |r| r.3);
    let break_fractions = rows.iter().map(|r| r.3).collect();
    let samples = SampleSet::from_samples(
        rows.into_iter().map(|(energy, assignment, multiplicity, _)| Sample { assignment, energy, multiplicity }).collect(),
    );
    Ok(HardwareSolution {
        samples,
        break_fractions,
        mean_break_fraction,
        best_break_fraction,
        scale_factor,
        num_physical_qubits: used.len(),
    })
}

/// Largest factor keeping every `|h|` and `|J|` inside the device ranges.
fn autoscale_factor(p: &IsingProblem, ice: &IceModel) -> f64 {
    let mut factor = f64::INFINITY;
    let h = p.max_abs_linear();
    if h > 0.0 {
        factor = factor.min(ice.h_max() / h);
    }
    let j = p.max_abs_quadratic();
    if j > 0.0 {
        factor = factor.min(ice.j_max() / j);
    }
    if factor.is_finite() {
        factor
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::brute_force_solve;
    use crate::chimera::{chain_strength_sweep, clique_embed_n, SweepOutcome};
    use crate::qubo::tests::random_qubo;

    #[test]
    fn two_variables_on_one_cell_match_brute_force() {
        let g = ChimeraGraph::perfect(1).unwrap();
        let q = QuboProblem::from_terms(2, [(0, 1.0), (1, -1.0)], [((0, 1), 2.0)], 0.0).unwrap();
        let emb = clique_embed_n(&g, 2).unwrap();
        let sol = solve_hardware_model(&q, &g, &emb, 4.0, &IceModel::disabled(), &SolverConfig::default()).unwrap();
        assert_eq!(sol.samples.best().unwrap().assignment.bits(), &[0, 1]);
        assert_eq!(sol.samples.best().unwrap().energy, -1.0);
        assert_eq!(sol.samples.total_reads(), 16);
        assert_eq!(sol.break_fractions.len(), sol.samples.len());
    }

    #[test]
    fn zero_chain_strength_breaks_chains() {
        let g = ChimeraGraph::perfect(2).unwrap();
        let emb = clique_embed_n(&g, 8).unwrap();
        let mut total = 0.0;
        for seed in 0..5 {
            let q = random_qubo(8, 1.0, 100 + seed);
            let sol = solve_hardware_model(&q, &g, &emb, 0.0, &IceModel::disabled(), &SolverConfig::default().with_seed(seed))
                .unwrap();
            total += sol.mean_break_fraction;
        }
        assert!(total > 0.0);
    }

    #[test]
    fn swept_clique_matches_brute_force() {
        let g = ChimeraGraph::perfect(2).unwrap();
        let emb = clique_embed_n(&g, 8).unwrap();
        let q = random_qubo(8, 1.0, 3);
        let exact = brute_force_solve(&q).unwrap().best().unwrap().energy;
        let out = chain_strength_sweep(&q, &g, &emb, &[0.5, 1.0, 2.0, 4.0], &IceModel::disabled(), &SolverConfig::default(), 0.05)
            .unwrap();
        match out {
            SweepOutcome::Selected { solution, .. } => {
                assert!((solution.samples.best().unwrap().energy - exact).abs() < 1e-9)
            }
            SweepOutcome::Exhausted { points } => panic!("sweep exhausted: {points:?}"),
        }
    }

    #[test]
    fn deterministic_and_energies_reevaluated() {
        let g = ChimeraGraph::perfect(2).unwrap();
        let emb = clique_embed_n(&g, 6).unwrap();
        let q = random_qubo(6, 0.8, 9);
        let cfg = SolverConfig::default().with_seed(4);
        let a = solve_hardware_model(&q, &g, &emb, 1.0, &IceModel::default(), &cfg).unwrap();
        let b = solve_hardware_model(&q, &g, &emb, 1.0, &IceModel::default(), &cfg).unwrap();
        assert_eq!(a, b);
        for s in a.samples.iter() {
            assert!((s.energy - q.energy(&s.assignment).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn autoscale_fills_tighter_range() {
        let p = IsingProblem::from_terms(2, [(0, 0.5)], [((0, 1), 4.0)], 0.0).unwrap();
        let f = autoscale_factor(&p, &IceModel::default());
        assert!((f - 0.25).abs() < 1e-12);
        assert_eq!(autoscale_factor(&IsingProblem::new(3), &IceModel::default()), 1.0);
    }
}
