//! Deterministic clique embeddings for defect-free Chimera graphs.
//!
//! Two layouts are used. For `n <= 4m` the native triangle layout works in the
//! top-left `k × k` block with `k = ceil(n / 4)`: chain `4i + p` takes the
//! vertical qubits at index `p` of column `i`, rows `0..=i`, plus the
//! horizontal qubits at index `p` of row `i`, columns `i..k`. Every chain has
//! `k + 1` qubits and only upper-triangle cells of the block are touched.
//!
//! For `n = 4m + 1` the lines are used whole: chain `k < 4m - 1` is vertical
//! line `k` joined with horizontal line `k`, and the two left-over lines form
//! the last two chains on their own. Any vertical line crosses any horizontal
//! line, so every pair of chains is coupled. Chains have `2m` qubits; at
//! `m = 2` no K_9 minor with shorter chains exists.

use super::graph::{qubit_index, Shore, SHORE_SIZE};
use super::{ChimeraGraph, Embedding};
use crate::error::{Error, Result};

/// Largest clique these layouts embed in `C_m`.
pub fn max_clique_size(m: usize) -> usize {
    SHORE_SIZE * m + 1
}

/// K_{4m+1} embedding of a perfect `C_m`.
pub fn clique_embed(graph: &ChimeraGraph) -> Result<Embedding> {
    clique_embed_n(graph, max_clique_size(graph.grid_size()))
}

/// K_n embedding of a perfect `C_m`, `n <= 4m + 1`.
pub fn clique_embed_n(graph: &ChimeraGraph, n: usize) -> Result<Embedding> {
    if !graph.is_perfect() {
        return Err(Error::DefectiveGraph);
    }
    let m = graph.grid_size();
    if n > max_clique_size(m) {
        return Err(Error::InvalidConfig(format!(
            "K_{n} exceeds the K_{} clique layout of C{m}",
            max_clique_size(m)
        )));
    }
    if n <= SHORE_SIZE * m {
        Ok(triangle(m, n))
    } else {
        Ok(full_lines(m))
    }
}

fn triangle(m: usize, n: usize) -> Embedding {
    let k = n.div_ceil(SHORE_SIZE);
    Embedding::new((0..n).map(move |v| {
        let (i, p) = (v / SHORE_SIZE, v % SHORE_SIZE);
        let vertical = (0..=i).map(move |r| qubit_index(m, r, i, Shore::Vertical, p));
        let horizontal = (i..k).map(move |c| qubit_index(m, i, c, Shore::Horizontal, p));
        (v, vertical.chain(horizontal).collect::<Vec<_>>())
    }))
}

fn full_lines(m: usize) -> Embedding {
    let lines = SHORE_SIZE * m;
    let vertical = |k: usize| (0..m).map(move |r| qubit_index(m, r, k / SHORE_SIZE, Shore::Vertical, k % SHORE_SIZE));
    let horizontal = |k: usize| (0..m).map(move |c| qubit_index(m, k / SHORE_SIZE, c, Shore::Horizontal, k % SHORE_SIZE));
    let mut chains: Vec<(usize, Vec<usize>)> =
        (0..lines - 1).map(|k| (k, vertical(k).chain(horizontal(k)).collect())).collect();
    chains.push((lines - 1, vertical(lines - 1).collect()));
    chains.push((lines, horizontal(lines - 1).collect()));
    Embedding::new(chains)
}
