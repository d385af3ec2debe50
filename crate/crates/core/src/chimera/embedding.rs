use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ChimeraGraph;
use crate::error::{Error, Result};

/// Undirected logical-variable graph with canonical `(i < j)` edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemGraph {
    num_vars: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl ProblemGraph {
    pub fn new(num_vars: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= num_vars || b >= num_vars {
                return Err(Error::InvalidProblem(format!("bad problem edge ({a},{b})")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(ProblemGraph { num_vars, edges: set })
    }

    pub fn complete(n: usize) -> Self {
        ProblemGraph {
            num_vars: n,
            edges: (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vars];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Mapping from logical variables to chains of physical qubits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    chains: BTreeMap<usize, BTreeSet<usize>>,
}

impl Embedding {
    pub fn new(chains: impl IntoIterator<Item = (usize, impl IntoIterator<Item = usize>)>) -> Self {
        Embedding {
            chains: chains.into_iter().map(|(v, c)| (v, c.into_iter().collect())).collect(),
        }
    }

    pub fn chain(&self, var: usize) -> Option<&BTreeSet<usize>> {
        self.chains.get(&var)
    }

    pub fn chains(&self) -> impl Iterator<Item = (usize, &BTreeSet<usize>)> {
        self.chains.iter().map(|(&v, c)| (v, c))
    }

    pub fn num_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn total_qubits(&self) -> usize {
        self.chains.values().map(BTreeSet::len).sum()
    }

    pub fn max_chain_length(&self) -> usize {
        self.chains.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.chains.values().all(|c| c.len() <= 1)
    }

    /// Restricts the embedding to the first `n` variables.
    pub fn truncated(&self, n: usize) -> Embedding {
        Embedding { chains: self.chains.range(..n).map(|(&v, c)| (v, c.clone())).collect() }
    }

    /// Sorted list of all qubits used by any chain.
    pub fn used_qubits(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.chains.values().flatten().copied().collect();
        set.into_iter().collect()
    }
}

/// One failed embedding invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MissingChain { var: usize },
    EmptyChain { var: usize },
    UnavailableQubit { var: usize, qubit: usize },
    SharedQubit { qubit: usize, vars: Vec<usize> },
    DisconnectedChain { var: usize },
    MissingCoupler { u: usize, v: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingChain { var } => write!(f, "variable {var} has no chain"),
            Violation::EmptyChain { var } => write!(f, "chain of variable {var} is empty"),
            Violation::UnavailableQubit { var, qubit } => {
                write!(f, "chain of variable {var} uses missing or defective qubit {qubit}")
            }
            Violation::SharedQubit { qubit, vars } => write!(f, "qubit {qubit} shared by chains {vars:?}"),
            Violation::DisconnectedChain { var } => write!(f, "chain of variable {var} is not connected"),
            Violation::MissingCoupler { u, v } => write!(f, "no coupler joins chains of {u} and {v}"),
        }
    }
}

/// Checks disjointness, chain connectivity and edge coverage, reporting every violation.
pub fn verify_embedding(problem: &ProblemGraph, hardware: &ChimeraGraph, emb: &Embedding) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut owners: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for var in 0..problem.num_vars() {
        let Some(chain) = emb.chain(var) else {
            out.push(Violation::MissingChain { var });
            continue;
        };
        if chain.is_empty() {
            out.push(Violation::EmptyChain { var });
            continue;
        }
        let mut usable = true;
        for &q in chain {
            owners.entry(q).or_default().push(var);
            if !hardware.is_active(q) {
                out.push(Violation::UnavailableQubit { var, qubit: q });
                usable = false;
            }
        }
        if usable && !hardware.is_connected(chain) {
            out.push(Violation::DisconnectedChain { var });
        }
    }
    for (qubit, vars) in owners {
        if vars.len() > 1 {
            out.push(Violation::SharedQubit { qubit, vars });
        }
    }
    for (u, v) in problem.edges() {
        let (Some(cu), Some(cv)) = (emb.chain(u), emb.chain(v)) else {
            continue;
        };
        if chains_coupled(hardware, cu, cv).is_none() {
            out.push(Violation::MissingCoupler { u, v });
        }
    }
    out
}

/// First coupler in canonical `(a, b)` order joining the two chains.
pub fn chains_coupled(
    hardware: &ChimeraGraph,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for &p in a {
        if !hardware.is_active(p) {
            continue;
        }
        for &q in hardware.neighbors(p) {
            if b.contains(&q) {
                let key = (p.min(q), p.max(q));
                if best.is_none_or(|cur| key < cur) {
                    best = Some(key);
                }
            }
        }
    }
    best
}

pub fn ensure_valid(problem: &ProblemGraph, hardware: &ChimeraGraph, emb: &Embedding) -> Result<()> {
    let violations = verify_embedding(problem, hardware, emb);
    match violations.first() {
        None => Ok(()),
        Some(first) => Err(Error::Embedding(format!("{first} ({} violation(s) total)", violations.len()))),
    }
}
