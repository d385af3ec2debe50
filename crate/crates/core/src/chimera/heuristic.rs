//! Randomized chain-growth minor embedding.
//!
//! Chains are grown one variable at a time from a root chosen to minimise the
//! summed node-weighted distance to the chains of already placed neighbours.
//! Qubits may be shared while the search runs. A qubit already used by `k`
//! chains costs `base^k`, with the base large enough that one extra level of
//! sharing outweighs any path length. Rerouting passes may not raise the
//! worst sharing a chain sees, which pushes overlap down until it vanishes;
//! a try that stops improving restarts from scratch. Once the chains are
//! disjoint they are shortened by rebuilding each one around the nearest
//! common meeting point of its neighbours.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{verify_embedding, ChimeraGraph, Embedding, ProblemGraph};

#[derive(Clone, Debug)]
pub struct HeuristicParams {
    /// Restarts allowed before giving up.
    pub max_tries: usize,
    /// Passes without improvement before a try restarts.
    pub patience: usize,
    /// Cap on passes within a single try.
    pub max_rounds: usize,
    /// Passes without improvement before chain shortening stops.
    pub chainlength_patience: usize,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams { max_tries: 10, patience: 10, max_rounds: 1000, chainlength_patience: 2 }
    }
}

/// Searches with up to `max_tries` restarts. `None` means no embedding was found.
pub fn heuristic_embed(
    problem: &ProblemGraph,
    hardware: &ChimeraGraph,
    seed: u64,
    max_tries: usize,
) -> Option<Embedding> {
    heuristic_embed_with(problem, hardware, seed, &HeuristicParams { max_tries, ..Default::default() })
}

pub fn heuristic_embed_with(
    problem: &ProblemGraph,
    hardware: &ChimeraGraph,
    seed: u64,
    params: &HeuristicParams,
) -> Option<Embedding> {
    let n = problem.num_vars();
    if n == 0 {
        return Some(Embedding::default());
    }
    if n > hardware.num_active_qubits() || params.max_tries == 0 {
        return None;
    }
    let adj = problem.adjacency();
    let mut rng = crate::seed::rng(seed);
    let chains = Search::new(hardware, &adj).run(&mut rng, params)?;
    let emb = Embedding::new(chains.into_iter().enumerate());
    verify_embedding(problem, hardware, &emb).is_empty().then_some(emb)
}

const FAR: u64 = u64::MAX;
const NONE: usize = usize::MAX;

/// Shortest-path tree grown from one neighbour's chain.
struct Tree {
    dist: Vec<u64>,
    parent: Vec<usize>,
}

/// A freshly built chain with the path segments laid towards each neighbour.
struct Built {
    chain: Vec<usize>,
    segments: Vec<(usize, Vec<usize>)>,
    anchors: Vec<bool>,
}

/// Outcome of one pass over the variables.
#[derive(PartialEq)]
enum Pass {
    Improved,
    Stalled,
    Failed,
}

/// Quality summary, ordered so that smaller is better.
#[derive(Clone, PartialEq)]
struct Stats {
    disjoint: bool,
    histogram: Vec<usize>,
}

impl Stats {
    fn better_than(&self, other: &Stats) -> bool {
        if self.disjoint != other.disjoint {
            return self.disjoint;
        }
        if self.histogram.len() != other.histogram.len() {
            return self.histogram.len() < other.histogram.len();
        }
        for (a, b) in self.histogram.iter().rev().zip(other.histogram.iter().rev()) {
            if a != b {
                return a < b;
            }
        }
        false
    }
}

struct Search<'a> {
    hw: &'a ChimeraGraph,
    adj: &'a [Vec<usize>],
    chains: Vec<Vec<usize>>,
    member: Vec<Vec<bool>>,
    fill: Vec<u32>,
    budget: f64,
    max_bound: u32,
    rank: Vec<u32>,
    best: Option<(Stats, Vec<Vec<usize>>)>,
}

impl<'a> Search<'a> {
    fn new(hw: &'a ChimeraGraph, adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        let nq = hw.num_qubits();
        let degree = adj.iter().map(Vec::len).max().unwrap_or(0).max(1);
        // keeps every summed distance below 2^63
        let budget = 63.0 - ((degree * nq) as f64).log2();
        Search {
            hw,
            adj,
            chains: vec![Vec::new(); n],
            member: vec![vec![false; nq]; n],
            fill: vec![0; nq],
            budget,
            max_bound: (budget.floor() as u32).max(2),
            rank: (0..nq as u32).collect(),
            best: None,
        }
    }

    fn run(&mut self, rng: &mut ChaCha8Rng, params: &HeuristicParams) -> Option<Vec<Vec<usize>>> {
        let n = self.adj.len();
        if !self.initialize(rng) {
            return None;
        }
        self.best = None;
        self.note_progress();
        for trial in 0..params.max_tries {
            if self.embedded() {
                break;
            }
            let mut patience = params.patience;
            let mut pushback = 0usize;
            for _ in 0..params.max_rounds {
                if patience == 0 || self.embedded() {
                    break;
                }
                let pass = if pushback < n {
                    self.pushdown_pass(rng, &mut pushback)
                } else {
                    pushback -= 1;
                    self.reroute_pass(rng)
                };
                match pass {
                    Pass::Improved => {
                        patience = params.patience;
                        pushback = 0;
                    }
                    Pass::Stalled => patience -= 1,
                    Pass::Failed => {
                        self.restore_best();
                        patience -= 1;
                    }
                }
            }
            if !self.embedded() && trial + 1 < params.max_tries {
                self.set_chains(vec![Vec::new(); n]);
                if self.initialize(rng) {
                    self.best = None;
                    self.note_progress();
                } else {
                    self.restore_best();
                }
            }
        }
        if !self.embedded() {
            return None;
        }

        self.restore_best();
        let mut patience = params.chainlength_patience;
        while patience > 0 {
            let snapshot = self.chains.clone();
            match self.shorten_pass(rng) {
                Pass::Improved => patience = params.chainlength_patience,
                Pass::Stalled => patience -= 1,
                Pass::Failed => {
                    self.set_chains(snapshot);
                    patience -= 1;
                }
            }
        }
        self.best.take().map(|(_, chains)| chains)
    }

    fn embedded(&self) -> bool {
        self.best.as_ref().is_some_and(|(s, _)| s.disjoint)
    }

    fn initialize(&mut self, rng: &mut ChaCha8Rng) -> bool {
        for u in self.var_order(rng) {
            if !self.place(u, self.max_bound, rng) {
                return false;
            }
        }
        true
    }

    /// Reroutes every chain without letting it touch a qubit fuller than the
    /// fullest one it held; a chain with no such route is put back.
    fn pushdown_pass(&mut self, rng: &mut ChaCha8Rng, pushback: &mut usize) -> Pass {
        let mut order: Vec<usize> = (0..self.adj.len()).collect();
        order.shuffle(rng);
        let mut improved = false;
        for u in order {
            if *pushback < self.adj.len() {
                let bound = self.chains[u].iter().map(|&q| self.fill[q]).max().unwrap_or(0);
                let old = self.remove(u);
                if !self.place(u, bound, rng) {
                    *pushback += 3;
                    self.insert(u, old);
                }
            } else {
                self.remove(u);
                if !self.place(u, self.max_bound, rng) {
                    return Pass::Failed;
                }
            }
            improved |= self.note_progress();
            if self.embedded() {
                break;
            }
        }
        if improved {
            Pass::Improved
        } else {
            Pass::Stalled
        }
    }

    fn reroute_pass(&mut self, rng: &mut ChaCha8Rng) -> Pass {
        let mut improved = false;
        for u in self.var_order(rng) {
            self.remove(u);
            if !self.place(u, self.max_bound, rng) {
                return Pass::Failed;
            }
            improved |= self.note_progress();
            if self.embedded() {
                break;
            }
        }
        if improved {
            Pass::Improved
        } else {
            Pass::Stalled
        }
    }

    fn shorten_pass(&mut self, rng: &mut ChaCha8Rng) -> Pass {
        let mut improved = false;
        for u in self.var_order(rng) {
            let target = self.chains.iter().map(Vec::len).max().unwrap_or(0);
            self.shorten(u, target, rng);
            if self.fill.iter().any(|&f| f > 1) {
                return Pass::Failed;
            }
            improved |= self.note_progress();
        }
        if improved {
            Pass::Improved
        } else {
            Pass::Stalled
        }
    }

    /// Random breadth-first order over the problem graph.
    fn var_order(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let n = self.adj.len();
        let mut starts: Vec<usize> = (0..n).collect();
        starts.shuffle(rng);
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for s in starts {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                let mut nbrs = self.adj[v].clone();
                nbrs.shuffle(rng);
                for u in nbrs {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        order
    }

    fn stats(&self) -> Stats {
        let max_fill = self.fill.iter().copied().max().unwrap_or(0) as usize;
        if max_fill > 1 {
            let mut histogram = vec![0; max_fill - 1];
            for &f in &self.fill {
                if f > 1 {
                    histogram[f as usize - 2] += 1;
                }
            }
            Stats { disjoint: false, histogram }
        } else {
            let longest = self.chains.iter().map(Vec::len).max().unwrap_or(0);
            let mut histogram = vec![0; longest + 1];
            for c in &self.chains {
                histogram[c.len()] += 1;
            }
            Stats { disjoint: true, histogram }
        }
    }

    /// Records the current state if it beats the best so far.
    fn note_progress(&mut self) -> bool {
        if self.chains.iter().any(Vec::is_empty) {
            return false;
        }
        let stats = self.stats();
        let better = match &self.best {
            None => true,
            Some((b, _)) => stats.better_than(b),
        };
        if better {
            self.best = Some((stats, self.chains.clone()));
        }
        better
    }

    fn restore_best(&mut self) {
        if let Some((_, chains)) = &self.best {
            let chains = chains.clone();
            self.set_chains(chains);
        }
    }

    fn set_chains(&mut self, chains: Vec<Vec<usize>>) {
        for u in 0..self.chains.len() {
            self.remove(u);
        }
        for (u, c) in chains.into_iter().enumerate() {
            self.insert(u, c);
        }
    }

    fn insert(&mut self, u: usize, chain: Vec<usize>) {
        for &q in &chain {
            self.member[u][q] = true;
            self.fill[q] += 1;
        }
        self.chains[u] = chain;
    }

    fn remove(&mut self, u: usize) -> Vec<usize> {
        let old = std::mem::take(&mut self.chains[u]);
        for &q in &old {
            self.member[u][q] = false;
            self.fill[q] -= 1;
        }
        old
    }

    fn hand_over(&mut self, q: usize, from: usize, to: usize) {
        if let Some(i) = self.chains[from].iter().position(|&p| p == q) {
            self.chains[from].swap_remove(i);
        }
        self.member[from][q] = false;
        self.member[to][q] = true;
        self.chains[to].push(q);
    }

    /// Per-qubit cost `base^fill`, with the base chosen from the current
    /// worst fill so distances stay in range.
    fn qubit_weights(&self) -> Vec<u64> {
        let top = self.fill.iter().copied().max().unwrap_or(0).min(63) as usize;
        let log2base = if top == 0 { 1.0 } else { self.budget / top as f64 };
        let base = log2base.exp2();
        let mut table = Vec::with_capacity(top + 1);
        let mut power = 1.0f64;
        for _ in 0..=top {
            table.push(power as u64);
            power *= base;
        }
        self.fill.iter().map(|&f| table.get(f as usize).copied().unwrap_or(FAR)).collect()
    }

    fn open(&self, q: usize, bound: u32) -> bool {
        self.hw.is_active(q) && self.fill[q] < bound
    }

    fn placed_neighbors(&self, u: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut nbrs: Vec<usize> = self.adj[u].iter().copied().filter(|&v| !self.chains[v].is_empty()).collect();
        nbrs.shuffle(rng);
        nbrs
    }

    /// Node-weighted Dijkstra from the chain of `v`, avoiding qubits at or
    /// above `bound`.
    fn tree(&self, v: usize, bound: u32, weights: &[u64]) -> Tree {
        let nq = self.fill.len();
        let mut dist = vec![FAR; nq];
        let mut parent = vec![NONE; nq];
        let mut seen = vec![false; nq];
        let mut heap = BinaryHeap::new();
        for &q in &self.chains[v] {
            seen[q] = true;
            heap.push(Reverse((0u64, self.rank[q], q)));
        }
        while let Some(Reverse((d, _, q))) = heap.pop() {
            dist[q] = d;
            for &p in self.hw.neighbors(q) {
                if seen[p] {
                    continue;
                }
                seen[p] = true;
                if self.open(p, bound) {
                    parent[p] = q;
                    heap.push(Reverse((d.saturating_add(weights[p]), self.rank[p], p)));
                }
            }
        }
        Tree { dist, parent }
    }

    /// Tears nothing out: `u` must already be empty. Returns false when no
    /// root is reachable from every placed neighbour under `bound`.
    fn place(&mut self, u: usize, bound: u32, rng: &mut ChaCha8Rng) -> bool {
        self.rank.shuffle(rng);
        let weights = self.qubit_weights();
        let nbrs = self.placed_neighbors(u, rng);
        let nq = self.fill.len();
        let mut total: Vec<u64> = (0..nq).map(|q| if self.open(q, bound) { 0 } else { FAR }).collect();
        let trees: Vec<Tree> = nbrs.iter().map(|&v| self.tree(v, bound, &weights)).collect();
        if nbrs.is_empty() {
            for q in 0..nq {
                if total[q] != FAR {
                    total[q] = weights[q];
                }
            }
        }
        for (&v, t) in nbrs.iter().zip(&trees) {
            for q in 0..nq {
                if total[q] == FAR {
                    continue;
                }
                let d = if self.member[v][q] { weights[q] } else { t.dist[q] };
                total[q] = if d == FAR { FAR } else { total[q].saturating_add(d) };
            }
        }
        let Some(&lowest) = total.iter().min() else { return false };
        if lowest == FAR {
            return false;
        }
        let roots: Vec<usize> = (0..nq).filter(|&q| total[q] == lowest).collect();
        let root = roots[rng.random_range(0..roots.len())];
        let built = self.steiner(root, &nbrs, &trees);
        self.commit(u, built, 0);
        true
    }

    /// Grows a chain from `root` by following each neighbour's tree back to
    /// that neighbour, starting from whichever chain qubit is closest.
    fn steiner(&self, root: usize, nbrs: &[usize], trees: &[Tree]) -> Built {
        let nq = self.fill.len();
        let mut in_u = vec![false; nq];
        let mut anchors = vec![false; nq];
        in_u[root] = true;
        anchors[root] = true;
        let mut chain = vec![root];
        let mut segments = Vec::with_capacity(nbrs.len());
        for (&v, t) in nbrs.iter().zip(trees) {
            let start = chain.iter().copied().min_by_key(|&p| t.dist[p]).unwrap_or(root);
            if self.member[v][start] || t.dist[start] == FAR {
                continue;
            }
            let mut anchor = start;
            let mut path = Vec::new();
            let mut p = t.parent[start];
            while p != NONE && !self.member[v][p] {
                if in_u[p] {
                    path.clear();
                    anchor = p;
                } else {
                    path.push(p);
                }
                p = t.parent[p];
            }
            anchors[anchor] = true;
            for &q in &path {
                in_u[q] = true;
                chain.push(q);
            }
            segments.push((v, path));
        }
        Built { chain, segments, anchors }
    }

    /// Installs a chain for `u`, then hands the far ends of its linking
    /// paths to the neighbours they reach. A nonzero `target` stops a
    /// neighbour from growing past that length.
    fn commit(&mut self, u: usize, built: Built, target: usize) {
        self.insert(u, built.chain);
        for (v, path) in built.segments {
            for &q in path.iter().rev() {
                if built.anchors[q] || (target > 0 && self.chains[v].len() >= target) {
                    break;
                }
                self.hand_over(q, u, v);
            }
        }
    }

    /// Rebuilds the chain of `u` from free qubits around the meeting point
    /// that gives the shortest chain, keeping the old one if nothing shorter
    /// turns up.
    fn shorten(&mut self, u: usize, target: usize, rng: &mut ChaCha8Rng) {
        let nbrs = self.placed_neighbors(u, rng);
        if nbrs.is_empty() {
            return;
        }
        let old = self.remove(u);
        let last = old.len();
        let stop = last.max(target);
        let nq = self.fill.len();
        let mut trees: Vec<Tree> =
            nbrs.iter().map(|_| Tree { dist: vec![FAR; nq], parent: vec![NONE; nq] }).collect();
        let mut queues: Vec<VecDeque<usize>> = Vec::with_capacity(nbrs.len());
        for (&v, t) in nbrs.iter().zip(trees.iter_mut()) {
            let mut queue = VecDeque::new();
            for &q in &self.chains[v] {
                t.dist[q] = 0;
                queue.push_back(q);
            }
            queues.push(queue);
        }
        let mut reached = vec![0usize; nq];
        let mut best: Option<Built> = None;
        'levels: for level in 0..=last as u64 {
            for i in 0..nbrs.len() {
                while let Some(&q) = queues[i].front() {
                    if trees[i].dist[q] > level {
                        break;
                    }
                    queues[i].pop_front();
                    if self.fill[q] == 0 {
                        reached[q] += 1;
                        if reached[q] == nbrs.len() {
                            let built = self.steiner(q, &nbrs, &trees);
                            if best.as_ref().is_none_or(|b| built.chain.len() < b.chain.len()) {
                                let size = built.chain.len();
                                best = Some(built);
                                if size < stop {
                                    break 'levels;
                                }
                            }
                        }
                    }
                    for &p in self.hw.neighbors(q) {
                        let t = &mut trees[i];
                        if t.dist[p] == FAR && t.parent[p] == NONE && !self.member[nbrs[i]][p] && self.fill[p] == 0 {
                            t.dist[p] = level + 1;
                            t.parent[p] = q;
                            queues[i].push_back(p);
                        }
                    }
                }
            }
        }
        match best {
            Some(b) if b.chain.len() <= last => self.commit(u, b, target),
            _ => self.insert(u, old),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cycle_uses_single_qubits() {
        let g = ChimeraGraph::perfect(1).unwrap();
        let p = ProblemGraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let emb = heuristic_embed(&p, &g, 1, 5).expect("4-cycle fits in one cell");
        assert!(emb.is_trivial());
        assert_eq!(emb.total_qubits(), 4);
    }

    #[test]
    fn k10_into_c4() {
        let g = ChimeraGraph::perfect(4).unwrap();
        let p = ProblemGraph::complete(10);
        let emb = heuristic_embed(&p, &g, 3, 10).expect("K_10 fits in C4");
        assert!(verify_embedding(&p, &g, &emb).is_empty());
        assert!(emb.total_qubits() <= 40, "used {}", emb.total_qubits());
    }

    #[test]
    fn k30_does_not_fit_c2() {
        let g = ChimeraGraph::perfect(2).unwrap();
        assert!(heuristic_embed(&ProblemGraph::complete(30), &g, 0, 3).is_none());
    }

    #[test]
    fn deterministic_given_seed() {
        let g = ChimeraGraph::with_random_defects(4, 6, 2).unwrap();
        let p = ProblemGraph::complete(8);
        let a = heuristic_embed(&p, &g, 17, 5);
        let b = heuristic_embed(&p, &g, 17, 5);
        assert!(a.is_some());
        assert_eq!(a, b);
    }

    #[test]
    fn stats_order() {
        let s = |disjoint, histogram: Vec<usize>| Stats { disjoint, histogram };
        assert!(s(true, vec![0, 9, 9]).better_than(&s(false, vec![1])));
        assert!(s(false, vec![5]).better_than(&s(false, vec![0, 1])));
        assert!(s(false, vec![9, 1]).better_than(&s(false, vec![0, 2])));
        assert!(!s(true, vec![0, 2]).better_than(&s(true, vec![0, 2])));
    }
}
