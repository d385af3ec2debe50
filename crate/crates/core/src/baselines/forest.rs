use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub trees: usize,
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    /// Features tried per node; `None` means `floor(sqrt(p))`.
    pub features_per_split: Option<usize>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig { trees: 500, max_depth: None, features_per_split: None, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Leaf { positive: u32, negative: u32 },
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    /// Root is `nodes[0]`.
    pub nodes: Vec<Node>,
}

impl Tree {
    fn leaf(&self, row: &[f64]) -> (u32, u32) {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { positive, negative } => return (positive, negative),
                Node::Split { feature, threshold, left, right } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        let (p, n) = self.leaf(row);
        p as f64 / (p + n).max(1) as f64
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub num_features: usize,
    pub config: ForestConfig,
}

impl ForestModel {
    /// Mean over trees of the positive fraction in the reached leaf.
    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_proba(row)).sum::<f64>() / self.trees.len().max(1) as f64
    }

    pub fn predict(&self, row: &[f64]) -> i8 {
        if self.predict_proba(row) > 0.5 {
            1
        } else {
            -1
        }
    }
}

pub fn forest_predict_proba(model: &ForestModel, row: &[f64]) -> f64 {
    model.predict_proba(row)
}

/// Random forest of Gini trees, one bootstrap sample per tree. Tree `t`
/// draws from a stream derived from `(seed, t)`, so the forest does not
/// depend on thread scheduling.
pub fn forest_fit(x: &[Vec<f64>], y: &[i8], cfg: &ForestConfig) -> Result<ForestModel> {
    if x.is_empty() {
        return Err(Error::Empty("random forest needs at least one row".into()));
    }
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), actual: y.len() });
    }
    let p = x[0].len();
    if let Some(r) = x.iter().find(|r| r.len() != p) {
        return Err(Error::Dimension { expected: p, actual: r.len() });
    }
    if y.iter().any(|&v| v != 1 && v != -1) {
        return Err(Error::InvalidProblem("labels must be -1 or +1".into()));
    }
    if cfg.trees == 0 {
        return Err(Error::InvalidConfig("forest needs at least one tree".into()));
    }
    let mtry = cfg.features_per_split.unwrap_or(((p as f64).sqrt().floor() as usize).max(1)).clamp(1, p.max(1));
    let columns: Vec<Column> = (0..p).map(|j| Column::new(x, j)).collect();
    let trees = (0..cfg.trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = crate::seed::child_rng(cfg.seed, &[t as u64]);
            let rows: Vec<usize> = (0..x.len()).map(|_| rng.random_range(0..x.len())).collect();
            let mut b = Builder { columns: &columns, y, mtry, max_depth: cfg.max_depth, nodes: Vec::new(), rng };
            b.grow(rows, 0);
            Tree { nodes: b.nodes }
        })
        .collect();
    Ok(ForestModel { trees, num_features: p, config: *cfg })
}

/// One feature as ranks into its sorted distinct values.
struct Column {
    values: Vec<f64>,
    rank: Vec<u32>,
}

impl Column {
    fn new(x: &[Vec<f64>], j: usize) -> Self {
        let mut values: Vec<f64> = x.iter().map(|r| r[j]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let rank = x.iter().map(|r| values.partition_point(|v| v.total_cmp(&r[j]).is_lt()) as u32).collect();
        Column { values, rank }
    }
}

struct Builder<'a> {
    columns: &'a [Column],
    y: &'a [i8],
    mtry: usize,
    max_depth: Option<usize>,
    nodes: Vec<Node>,
    rng: rand_chacha::ChaCha8Rng,
}

fn gini(pos: f64, total: f64) -> f64 {
    if total == 0.0 {
        return 0.0;
    }
    let q = pos / total;
    2.0 * q * (1.0 - q)
}

impl Builder<'_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let positive = rows.iter().filter(|&&r| self.y[r] == 1).count() as u32;
        let negative = rows.len() as u32 - positive;
        self.nodes.push(Node::Leaf { positive, negative });
        if positive == 0 || negative == 0 || self.max_depth.is_some_and(|d| depth >= d) {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&rows, positive) else {
            return id;
        };
        let col = &self.columns[feature];
        let (l, r): (Vec<usize>, Vec<usize>) =
            rows.into_iter().partition(|&i| col.values[col.rank[i] as usize] <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }

    /// Largest Gini decrease over a random feature subset; `None` when no
    /// candidate feature separates any rows.
    fn best_split(&mut self, rows: &[usize], positive: u32) -> Option<(usize, f64)> {
        let n = rows.len() as f64;
        let parent = gini(positive as f64, n);
        let mut best: Option<(f64, usize, f64)> = None;
        // (rank, rows at rank, positives at rank), ascending by rank
        let mut groups: Vec<(u32, u32, u32)> = Vec::new();
        for feature in sample(&mut self.rng, self.columns.len(), self.mtry) {
            let col = &self.columns[feature];
            groups.clear();
            if col.values.len() <= rows.len() {
                let mut count = vec![(0u32, 0u32); col.values.len()];
                for &r in rows {
                    let c = &mut count[col.rank[r] as usize];
                    c.0 += 1;
                    c.1 += (self.y[r] == 1) as u32;
                }
                groups.extend(count.iter().enumerate().filter(|(_, c)| c.0 > 0).map(|(k, c)| (k as u32, c.0, c.1)));
            } else {
                let mut sorted: Vec<(u32, bool)> = rows.iter().map(|&r| (col.rank[r], self.y[r] == 1)).collect();
                sorted.sort_unstable();
                for (k, pos) in sorted {
                    match groups.last_mut() {
                        Some(g) if g.0 == k => {
                            g.1 += 1;
                            g.2 += pos as u32;
                        }
                        _ => groups.push((k, 1, pos as u32)),
                    }
                }
            }
            let (mut nl, mut left_pos) = (0.0, 0.0);
            for w in groups.windows(2) {
                nl += w[0].1 as f64;
                left_pos += w[0].2 as f64;
                let nr = n - nl;
                let child = (nl * gini(left_pos, nl) + nr * gini(positive as f64 - left_pos, nr)) / n;
                let gain = parent - child;
                if gain > 1e-12 && best.is_none_or(|(g, _, _)| gain > g) {
                    let threshold = 0.5 * (col.values[w[0].0 as usize] + col.values[w[1].0 as usize]);
                    best = Some((gain, feature, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(n: usize, p: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<i8>) {
        let mut rng = crate::seed::rng(seed);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let y = x.iter().map(|r| if r[0] + r[1] * r[2] > 0.0 { 1 } else { -1 }).collect();
        (x, y)
    }

    fn small(trees: usize) -> ForestConfig {
        ForestConfig { trees, seed: 3, ..Default::default() }
    }

    #[test]
    fn single_class_is_constant() {
        let (x, _) = data(30, 3, 1);
        let m = forest_fit(&x, &[1; 30], &small(20)).unwrap();
        assert!(x.iter().all(|r| m.predict_proba(r) == 1.0));
        assert!(m.trees.iter().all(|t| t.nodes.len() == 1));
        let m = forest_fit(&x, &[-1; 30], &small(5)).unwrap();
        assert_eq!(m.predict_proba(&x[0]), 0.0);
    }

    #[test]
    fn label_column_needs_one_split() {
        let (x, _) = data(200, 4, 2);
        let y: Vec<i8> = x.iter().map(|r| if r[2] > 0.1 { 1 } else { -1 }).collect();
        let cfg = ForestConfig { max_depth: Some(1), features_per_split: Some(4), ..small(10) };
        let m = forest_fit(&x, &y, &cfg).unwrap();
        assert!(m.trees.iter().all(|t| t.depth() == 1));
        let acc = x.iter().zip(&y).filter(|(r, &l)| m.predict(r) == l).count();
        assert_eq!(acc, 200);
    }

    #[test]
    fn deterministic_and_order_free() {
        let (x, y) = data(150, 5, 4);
        let a = forest_fit(&x, &y, &small(30)).unwrap();
        let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| forest_fit(&x, &y, &small(30)));
        assert_eq!(a, b.unwrap());
        let mut rev = a.clone();
        rev.trees.reverse();
        for r in &x {
            assert!((a.predict_proba(r) - rev.predict_proba(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn hand_built_average() {
        let tree = |positive, negative| Tree { nodes: vec![Node::Leaf { positive, negative }] };
        let m = ForestModel { trees: vec![tree(1, 4), tree(3, 2)], num_features: 1, config: small(2) };
        assert!((forest_predict_proba(&m, &[0.0]) - 0.4).abs() < 1e-12);
        let unanimous = ForestModel { trees: vec![tree(2, 0), tree(5, 0)], ..m };
        assert_eq!(unanimous.predict_proba(&[0.0]), 1.0);
    }

    #[test]
    fn forest_fits_training_data_and_round_trips() {
        let (x, y) = data(300, 6, 5);
        let m = forest_fit(&x, &y, &small(50)).unwrap();
        let acc = x.iter().zip(&y).filter(|(r, &l)| m.predict(r) == l).count() as f64 / 300.0;
        assert!(acc > 0.95, "{acc}");
        let back: ForestModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        for t in &m.trees {
            for node in &t.nodes {
                if let Node::Leaf { positive, negative } = node {
                    assert!(positive + negative > 0);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(forest_fit(&[], &[], &small(1)).is_err());
        assert!(forest_fit(&[vec![1.0]], &[2], &small(1)).is_err());
        assert!(forest_fit(&[vec![1.0]], &[1], &small(0)).is_err());
    }
}
