use std::collections::{BTreeSet, VecDeque};

use rand::seq::index::sample;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Which shore of a unit cell a qubit sits on.
///
/// Vertical qubits couple to the same position in the cells above and below;
/// horizontal qubits couple to the cells left and right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shore {
    Vertical,
    Horizontal,
}

/// Cell coordinates of a qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QubitCoord {
    pub row: usize,
    pub col: usize,
    pub shore: Shore,
    pub index: usize,
}

/// An `m x m` grid of K_{4,4} unit cells with optional defects.
///
/// Qubit `8 * (row * m + col) + 4 * shore + index` lives in cell `(row, col)`,
/// with shore 0 vertical and 1 horizontal.
#[derive(Clone, Debug)]
pub struct ChimeraGraph {
    m: usize,
    defective_qubits: BTreeSet<usize>,
    defective_couplers: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    active: Vec<bool>,
}

impl PartialEq for ChimeraGraph {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.defective_qubits == other.defective_qubits
            && self.defective_couplers == other.defective_couplers
    }
}

pub const SHORE_SIZE: usize = 4;
pub const CELL_SIZE: usize = 2 * SHORE_SIZE;

impl ChimeraGraph {
    pub fn perfect(m: usize) -> Result<Self> {
        Self::build(m, [], [])
    }

    pub fn build(
        m: usize,
        defective_qubits: impl IntoIterator<Item = usize>,
        defective_couplers: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig("grid size must be at least 1".into()));
        }
        let n = CELL_SIZE * m * m;
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in full_edges(m) {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let defective_qubits: BTreeSet<usize> = defective_qubits.into_iter().collect();
        if let Some(&q) = defective_qubits.iter().find(|&&q| q >= n) {
            return Err(Error::InvalidDefect(format!("qubit {q} out of range for {n} qubits")));
        }
        let mut couplers = BTreeSet::new();
        for (a, b) in defective_couplers {
            let key = (a.min(b), a.max(b));
            if key.1 >= n {
                return Err(Error::InvalidDefect(format!("coupler ({a},{b}) out of range for {n} qubits")));
            }
            if !adjacency[key.0].contains(&key.1) {
                return Err(Error::InvalidDefect(format!("({a},{b}) is not a coupler of C{m}")));
            }
            couplers.insert(key);
        }
        let active: Vec<bool> = (0..n).map(|q| !defective_qubits.contains(&q)).collect();
        for (q, nbrs) in adjacency.iter_mut().enumerate() {
            if !active[q] {
                nbrs.clear();
                continue;
            }
            nbrs.retain(|&p| active[p] && !couplers.contains(&(q.min(p), q.max(p))));
            nbrs.sort_unstable();
        }
        Ok(ChimeraGraph { m, defective_qubits, defective_couplers: couplers, adjacency, active })
    }

    /// Perfect `C_m` with `k` uniformly chosen qubits removed.
    pub fn with_random_defects(m: usize, k: usize, seed: u64) -> Result<Self> {
        let n = CELL_SIZE * m * m;
        if k > n {
            return Err(Error::InvalidDefect(format!("cannot remove {k} of {n} qubits")));
        }
        let mut rng = crate::seed::rng(seed);
        Self::build(m, sample(&mut rng, n, k), [])
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    /// Total qubit slots, including defective ones.
    pub fn num_qubits(&self) -> usize {
        self.active.len()
    }

    pub fn num_active_qubits(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_perfect(&self) -> bool {
        self.defective_qubits.is_empty() && self.defective_couplers.is_empty()
    }

    pub fn is_active(&self, q: usize) -> bool {
        self.active.get(q).copied().unwrap_or(false)
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adjacency.len() && self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, nbrs)| nbrs.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    pub fn defective_qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.defective_qubits.iter().copied()
    }

    pub fn defective_couplers(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.defective_couplers.iter().copied()
    }

    pub fn qubit(&self, row: usize, col: usize, shore: Shore, index: usize) -> usize {
        qubit_index(self.m, row, col, shore, index)
    }

    pub fn coord(&self, q: usize) -> QubitCoord {
        let cell = q / CELL_SIZE;
        let within = q % CELL_SIZE;
        QubitCoord {
            row: cell / self.m,
            col: cell % self.m,
            shore: if within < SHORE_SIZE { Shore::Vertical } else { Shore::Horizontal },
            index: within % SHORE_SIZE,
        }
    }

    /// True when the qubits in `set` induce a connected subgraph.
    pub fn is_connected(&self, set: &BTreeSet<usize>) -> bool {
        let Some(&start) = set.iter().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(q) = queue.pop_front() {
            for &p in self.neighbors(q) {
                if set.contains(&p) && seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        seen.len() == set.len()
    }
}

pub(crate) fn qubit_index(m: usize, row: usize, col: usize, shore: Shore, index: usize) -> usize {
    let k = match shore {
        Shore::Vertical => 0,
        Shore::Horizontal => 1,
    };
    CELL_SIZE * (row * m + col) + SHORE_SIZE * k + index
}

fn full_edges(m: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for row in 0..m {
        for col in 0..m {
            for i in 0..SHORE_SIZE {
                let v = qubit_index(m, row, col, Shore::Vertical, i);
                for j in 0..SHORE_SIZE {
                    edges.push((v, qubit_index(m, row, col, Shore::Horizontal, j)));
                }
                if row + 1 < m {
                    edges.push((v, qubit_index(m, row + 1, col, Shore::Vertical, i)));
                }
                if col + 1 < m {
                    let h = qubit_index(m, row, col, Shore::Horizontal, i);
                    edges.push((h, qubit_index(m, row, col + 1, Shore::Horizontal, i)));
                }
            }
        }
    }
    edges
}

pub fn build_chimera(
    m: usize,
    defective_qubits: impl IntoIterator<Item = usize>,
    defective_couplers: impl IntoIterator<Item = (usize, usize)>,
) -> Result<ChimeraGraph> {
    ChimeraGraph::build(m, defective_qubits, defective_couplers)
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    m: usize,
    #[serde(default)]
    defective_qubits: Vec<usize>,
    #[serde(default)]
    defective_couplers: Vec<(usize, usize)>,
}

impl Serialize for ChimeraGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            m: self.m,
            defective_qubits: self.defective_qubits.iter().copied().collect(),
            defective_couplers: self.defective_couplers.iter().copied().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChimeraGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let g = GraphJson::deserialize(deserializer)?;
        ChimeraGraph::build(g.m, g.defective_qubits, g.defective_couplers).map_err(serde::de::Error::custom)
    }
}
