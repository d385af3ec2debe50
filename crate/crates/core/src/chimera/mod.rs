//! Chimera hardware graphs, minor embeddings and chain handling.

mod chain;
mod clique;
mod embedding;
mod graph;
mod heuristic;

pub use chain::{
    chain_strength_sweep, embed_problem, unembed, PhysicalProblem, SweepOutcome, SweepPoint, DEFAULT_BREAK_THRESHOLD,
};
pub use clique::{clique_embed, clique_embed_n, max_clique_size};
pub use embedding::{chains_coupled, ensure_valid, verify_embedding, Embedding, ProblemGraph, Violation};
pub use graph::{build_chimera, ChimeraGraph, QubitCoord, Shore, CELL_SIZE, SHORE_SIZE};
pub use heuristic::{heuristic_embed, heuristic_embed_with, HeuristicParams};
