//! Embedding logical problems onto hardware chains and reading them back.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{chains_coupled, ensure_valid, ChimeraGraph, Embedding};
use crate::anneal::{solve_hardware_model, HardwareSolution, IceModel, SolverConfig};
use crate::error::{Error, Result};
use crate::qubo::{Assignment, IsingProblem, QuboProblem};

/// Break fraction at or below which a chain strength qualifies in a sweep.
pub const DEFAULT_BREAK_THRESHOLD: f64 = 0.05;

/// A logical problem laid out on hardware qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalProblem {
    /// QUBO over every qubit index of the hardware graph.
    pub qubo: QuboProblem,
    /// Energy contributed by intact chains: for any chain-consistent
    /// assignment, physical energy equals logical energy plus this value.
    pub chain_offset: f64,
    pub num_chain_couplers: usize,
}

/// Places `q` on the chains of `emb`.
///
/// Linear terms are split evenly across a chain, each logical coupling sits
/// on the first coupler joining the two chains, and every hardware edge
/// inside a chain carries the Ising coupling `-alpha * s_a * s_b`.
pub fn embed_problem(q: &QuboProblem, graph: &ChimeraGraph, emb: &Embedding, alpha: f64) -> Result<PhysicalProblem> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidConfig(format!("chain strength must be finite and non-negative, got {alpha}")));
    }
    let emb = emb.truncated(q.num_vars());
    ensure_valid(&q.interaction_graph(), graph, &emb)?;

    let mut phys = QuboProblem::new(graph.num_qubits());
    phys.set_offset(q.offset())?;
    for (i, h) in q.linear_terms() {
        let chain = emb.chain(i).expect("verified");
        let share = h / chain.len() as f64;
        for &p in chain {
            phys.add_linear(p, share)?;
        }
    }
    for ((i, j), c) in q.quadratic_terms() {
        if c == 0.0 {
            continue;
        }
        let (a, b) = chains_coupled(graph, emb.chain(i).expect("verified"), emb.chain(j).expect("verified"))
            .expect("verified");
        phys.add_quadratic(a, b, c)?;
    }

    let mut chain_ising = IsingProblem::new(graph.num_qubits());
    let mut couplers = 0;
    for (_, chain) in emb.chains() {
        for (a, b) in intra_chain_edges(graph, chain) {
            chain_ising.add_quadratic(a, b, -alpha)?;
            couplers += 1;
        }
    }
    let chain_qubo = chain_ising.to_qubo();
    for (i, h) in chain_qubo.linear_terms() {
        phys.add_linear(i, h)?;
    }
    for ((i, j), c) in chain_qubo.quadratic_terms() {
        phys.add_quadratic(i, j, c)?;
    }
    phys.set_offset(phys.offset() + chain_qubo.offset())?;
    Ok(PhysicalProblem { qubo: phys, chain_offset: -alpha * couplers as f64, num_chain_couplers: couplers })
}

fn intra_chain_edges<'a>(graph: &'a ChimeraGraph, chain: &'a BTreeSet<usize>) -> impl Iterator<Item = (usize, usize)> + 'a {
    chain.iter().flat_map(move |&a| {
        graph.neighbors(a).iter().filter(move |&&b| b > a && chain.contains(&b)).map(move |&b| (a, b))
    })
}

/// Majority vote per chain. Exact ties are settled by a coin derived from
/// `seed` and the variable index, so the result is reproducible.
///
/// Returns the logical assignment (one bit per chain, chains keyed `0..n`)
/// and the fraction of chains whose qubits disagree.
pub fn unembed(physical: &Assignment, emb: &Embedding, seed: u64) -> Result<(Assignment, f64)> {
    let bits = physical.bits();
    let n = emb.num_chains();
    let mut logical = vec![0u8; n];
    let mut broken = 0usize;
    for (var, chain) in emb.chains() {
        if var >= n {
            return Err(Error::Embedding(format!("chain keys must be 0..{n}, found {var}")));
        }
        let mut ones = 0usize;
        for &p in chain {
            ones += *bits
                .get(p)
                .ok_or(Error::Dimension { expected: p + 1, actual: bits.len() })? as usize;
        }
        let zeros = chain.len() - ones;
        if ones > 0 && zeros > 0 {
            broken += 1;
        }
        logical[var] = match ones.cmp(&zeros) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => crate::seed::child_rng(seed, &[var as u64]).random_range(0..2u8),
        };
    }
    let fraction = if n == 0 { 0.0 } else { broken as f64 / n as f64 };
    Ok((Assignment::new(logical)?, fraction))
}

/// Diagnostics for one chain strength in a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub chain_strength: f64,
    pub best_energy: f64,
    pub best_break_fraction: f64,
    pub mean_break_fraction: f64,
    pub qualifies: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SweepOutcome {
    Selected { chain_strength: f64, solution: HardwareSolution, points: Vec<SweepPoint> },
    /// No grid value kept the best sample's chains intact enough.
    Exhausted { points: Vec<SweepPoint> },
}

impl SweepOutcome {
    pub fn points(&self) -> &[SweepPoint] {
        match self {
            SweepOutcome::Selected { points, .. } | SweepOutcome::Exhausted { points } => points,
        }
    }

    pub fn chain_strength(&self) -> Option<f64> {
        match self {
            SweepOutcome::Selected { chain_strength, .. } => Some(*chain_strength),
            SweepOutcome::Exhausted { .. } => None,
        }
    }

    pub fn solution(&self) -> Option<&HardwareSolution> {
        match self {
            SweepOutcome::Selected { solution, .. } => Some(solution),
            SweepOutcome::Exhausted { .. } => None,
        }
    }
}

/// Solves at every chain strength in `grid` and keeps the smallest one
/// whose best sample has at most `threshold` broken chains and whose best
/// logical energy is lowest among such strengths.
pub fn chain_strength_sweep(
    q: &QuboProblem,
    graph: &ChimeraGraph,
    emb: &Embedding,
    grid: &[f64],
    ice: &IceModel,
    cfg: &SolverConfig,
    threshold: f64,
) -> Result<SweepOutcome> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("chain strength grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig("chain strength grid must be strictly ascending".into()));
    }
    let solutions: Vec<HardwareSolution> = grid
        .par_iter()
        .map(|&alpha| solve_hardware_model(q, graph, emb, alpha, ice, cfg))
        .collect::<Result<_>>()?;

    let points: Vec<SweepPoint> = grid
        .iter()
        .zip(&solutions)
        .map(|(&alpha, s)| {
            let best = s.samples.best().expect("at least one read");
            SweepPoint {
                chain_strength: alpha,
                best_energy: best.energy,
                best_break_fraction: s.best_break_fraction,
                mean_break_fraction: s.mean_break_fraction,
                qualifies: s.best_break_fraction <= threshold,
            }
        })
        .collect();

    let min_energy = points.iter().filter(|p| p.qualifies).map(|p| p.best_energy).fold(f64::INFINITY, f64::min);
    if !min_energy.is_finite() {
        return Ok(SweepOutcome::Exhausted { points });
    }
    let tol = 1e-9 * (1.0 + min_energy.abs());
    let k = points.iter().position(|p| p.qualifies && p.best_energy <= min_energy + tol).expect("nonempty");
    let chain_strength = grid[k];
    let solution = solutions.into_iter().nth(k).expect("index in range");
    Ok(SweepOutcome::Selected { chain_strength, solution, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::brute_force_solve;
    use crate::chimera::{clique_embed_n, Shore};
    use crate::qubo::tests::random_qubo;

    fn pair_chains(graph: &ChimeraGraph, n: usize) -> Embedding {
        // variable i uses vertical qubit i and horizontal qubit i of a cell
        Embedding::new((0..n).map(|i| {
            let cell = i / 4;
            let (r, c) = (cell / graph.grid_size(), cell % graph.grid_size());
            let k = i % 4;
            (i, [graph.qubit(r, c, Shore::Vertical, k), graph.qubit(r, c, Shore::Horizontal, k)])
        }))
    }

    #[test]
    fn single_qubit_chains_reproduce_problem() {
        let g = ChimeraGraph::perfect(1).unwrap();
        // 4-cycle 0-1-2-3 on qubits 0,4,1,5
        let q = QuboProblem::from_terms(4, [(0, 0.5), (2, -1.0)], [((0, 1), 1.0), ((1, 2), -2.0), ((2, 3), 0.5), ((0, 3), 0.25)], 1.5)
            .unwrap();
        let emb = Embedding::new([(0, [0]), (1, [4]), (2, [1]), (3, [5])]);
        let phys = embed_problem(&q, &g, &emb, 3.0).unwrap();
        assert_eq!(phys.chain_offset, 0.0);
        let relabeled = phys.qubo.reindexed(&[0, 1, 4, 5]).unwrap();
        let map = [0usize, 2, 1, 3]; // physical order 0,1,4,5 holds variables 0,2,1,3
        for idx in 0..16u64 {
            let a = Assignment::from_index(idx, 4);
            let mut logical = vec![0u8; 4];
            for (k, &v) in map.iter().enumerate() {
                logical[v] = a.bits()[k];
            }
            let want = q.energy(&Assignment::new(logical).unwrap()).unwrap();
            assert!((relabeled.energy(&a).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn ferromagnetic_chain_prefers_agreement() {
        let g = ChimeraGraph::perfect(1).unwrap();
        let q = QuboProblem::from_terms(1, [(0, 1.0)], [], 0.0).unwrap();
        let emb = Embedding::new([(0, [0, 4])]);
        let phys = embed_problem(&q, &g, &emb, 5.0).unwrap().qubo.reindexed(&[0, 4]).unwrap();
        let set = brute_force_solve(&phys).unwrap();
        for s in set.iter() {
            assert_eq!(s.assignment.bits()[0], s.assignment.bits()[1]);
        }
    }

    #[test]
    fn chain_consistent_energy_is_logical_plus_offset() {
        let g = ChimeraGraph::perfect(2).unwrap();
        let q = random_qubo(6, 0.6, 17);
        // 2-qubit chains inside cells do not couple across chains in general;
        // use the clique layout, which couples every pair
        let emb = clique_embed_n(&g, 6).unwrap();
        let phys = embed_problem(&q, &g, &emb, 1.7).unwrap();
        for idx in 0..64u64 {
            let logical = Assignment::from_index(idx, 6);
            let mut bits = vec![0u8; g.num_qubits()];
            for (v, chain) in emb.chains() {
                for &p in chain {
                    bits[p] = logical.bits()[v];
                }
            }
            let pe = phys.qubo.energy_bits(&bits);
            assert!((pe - phys.chain_offset - q.energy(&logical).unwrap()).abs() < 1e-9);
            let (back, brk) = unembed(&Assignment::new(bits).unwrap(), &emb, 0).unwrap();
            assert_eq!(back, logical);
            assert_eq!(brk, 0.0);
        }
    }

    #[test]
    fn pair_chain_energy_equivalence() {
        let g = ChimeraGraph::perfect(2).unwrap();
        let emb = pair_chains(&g, 6);
        // only couple variables sharing a cell, which the pair layout supports
        let q = QuboProblem::from_terms(6, (0..6).map(|i| (i, 0.3 * i as f64 - 0.7)), [((0, 1), 1.1), ((2, 3), -0.4), ((4, 5), 0.9)], 0.2)
            .unwrap();
        let phys = embed_problem(&q, &g, &emb, 0.8).unwrap();
        assert_eq!(phys.num_chain_couplers, 6);
        for idx in 0..64u64 {
            let logical = Assignment::from_index(idx, 6);
            let mut bits = vec![0u8; g.num_qubits()];
            for (v, chain) in emb.chains() {
                for &p in chain {
                    bits[p] = logical.bits()[v];
                }
            }
            let pe = phys.qubo.energy_bits(&bits);
            assert!((pe - phys.chain_offset - q.energy(&logical).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn majority_vote_and_ties() {
        let emb = Embedding::new([(0, vec![0, 1, 2]), (1, vec![3, 4])]);
        let phys: Assignment = "11010".parse().unwrap();
        let (a, f) = unembed(&phys, &emb, 7).unwrap();
        assert_eq!(a.bits()[0], 1);
        assert_eq!(f, 1.0);
        let again = unembed(&phys, &emb, 7).unwrap();
        assert_eq!(again.0, a);
        let unanimous: Assignment = "00011".parse().unwrap();
        let (a, f) = unembed(&unanimous, &emb, 7).unwrap();
        assert_eq!(a.to_string(), "01");
        assert_eq!(f, 0.0);
    }

    #[test]
    fn tie_coin_varies_with_seed() {
        let emb = Embedding::new([(0, vec![0, 1])]);
        let phys: Assignment = "10".parse().unwrap();
        let outcomes: BTreeSet<u8> = (0..32).map(|s| unembed(&phys, &emb, s).unwrap().0.bits()[0]).collect();
        assert_eq!(outcomes.len(), 2);
    }

    #[test]
    fn negative_chain_strength_rejected() {
        let g = ChimeraGraph::perfect(1).unwrap();
        let q = QuboProblem::new(1);
        let emb = Embedding::new([(0, [0])]);
        assert!(embed_problem(&q, &g, &emb, -1.0).is_err());
    }

    #[test]
    fn invalid_embedding_rejected() {
        let g = ChimeraGraph::perfect(1).unwrap();
        let q = QuboProblem::from_terms(2, [], [((0, 1), 1.0)], 0.0).unwrap();
        // qubits 0 and 1 are on the same shore and not coupled
        let emb = Embedding::new([(0, [0]), (1, [1])]);
        assert!(matches!(embed_problem(&q, &g, &emb, 1.0), Err(Error::Embedding(_))));
    }

    #[test]
    fn sweep_on_trivial_chains_picks_grid_minimum() {
        let g = ChimeraGraph::perfect(1).unwrap();
        let q = QuboProblem::from_terms(2, [(0, 1.0), (1, -1.0)], [((0, 1), 2.0)], 0.0).unwrap();
        let emb = Embedding::new([(0, [0]), (1, [4])]);
        let out = chain_strength_sweep(&q, &g, &emb, &[0.5, 1.0, 2.0], &IceModel::disabled(), &SolverConfig::default(), 0.05)
            .unwrap();
        assert_eq!(out.chain_strength(), Some(0.5));
        assert_eq!(out.solution().unwrap().samples.best().unwrap().energy, -1.0);
        assert_eq!(out.points().len(), 3);
    }

    #[test]
    fn sweep_grid_validation() {
        let g = ChimeraGraph::perfect(1).unwrap();
        let q = QuboProblem::new(1);
        let emb = Embedding::new([(0, [0])]);
        let cfg = SolverConfig::default();
        assert!(chain_strength_sweep(&q, &g, &emb, &[], &IceModel::disabled(), &cfg, 0.05).is_err());
        assert!(chain_strength_sweep(&q, &g, &emb, &[2.0, 1.0], &IceModel::disabled(), &cfg, 0.05).is_err());
    }
}
