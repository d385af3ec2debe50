//! QUBO and Ising problem representations.
//!
//! A [`QuboProblem`] stores the objective
//!
//! ```text
//! E(x) = sum_{i<j} J_ij x_i x_j + sum_i h_i x_i + offset,   x_i in {0, 1}
//! ```
//!
//! as sparse maps keyed by variable index and canonical `(i, j)` pairs with
//! `i < j`. [`IsingProblem`] has the same shape over spins `s_i in {-1, +1}`;
//! the two are related by `s = 2x - 1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A 0/1 assignment to the variables of a QUBO problem.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<u8>);

impl Assignment {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidProblem(format!("assignment bit {b} is not 0 or 1")));
        }
        Ok(Assignment(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Assignment(vec![0; len])
    }

    /// Assignment whose bit `i` is bit `i` of `index` (bit 0 is the least significant).
    pub fn from_index(index: u64, len: usize) -> Self {
        Assignment((0..len).map(|i| ((index >> i) & 1) as u8).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_spins(&self) -> Vec<i8> {
        self.0.iter().map(|&b| 2 * b as i8 - 1).collect()
    }

    pub fn from_spins(spins: &[i8]) -> Self {
        Assignment(spins.iter().map(|&s| u8::from(s > 0)).collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidProblem(format!("bad assignment character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Assignment)
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shared storage for both problem forms.
#[derive(Clone, Debug, Default, PartialEq)]
struct Terms {
    num_vars: usize,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

fn canonical(i: usize, j: usize) -> Result<(usize, usize)> {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => Ok((i, j)),
        std::cmp::Ordering::Greater => Ok((j, i)),
        std::cmp::Ordering::Equal => Err(Error::InvalidProblem(format!("self-coupling ({i},{i})"))),
    }
}

fn check_finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidProblem(format!("non-finite {what} coefficient {v}")))
    }
}

impl Terms {
    fn new(num_vars: usize) -> Self {
        Terms { num_vars, ..Default::default() }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.num_vars {
            Ok(())
        } else {
            Err(Error::InvalidProblem(format!("variable {i} out of range for {} variables", self.num_vars)))
        }
    }

    fn add_linear(&mut self, i: usize, v: f64) -> Result<()> {
        self.check_index(i)?;
        check_finite(v, "linear")?;
        *self.linear.entry(i).or_insert(0.0) += v;
        Ok(())
    }

    fn add_quadratic(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        check_finite(v, "quadratic")?;
        *self.quadratic.entry(canonical(i, j)?).or_insert(0.0) += v;
        Ok(())
    }

    fn from_terms(
        num_vars: usize,
        linear: impl IntoIterator<Item = (usize, f64)>,
        quadratic: impl IntoIterator<Item = ((usize, usize), f64)>,
        offset: f64,
    ) -> Result<Self> {
        check_finite(offset, "offset")?;
        let mut t = Terms::new(num_vars);
        t.offset = offset;
        for (i, v) in linear {
            if t.linear.contains_key(&i) {
                return Err(Error::InvalidProblem(format!("duplicate linear term {i}")));
            }
            t.add_linear(i, v)?;
        }
        for ((i, j), v) in quadratic {
            let key = canonical(i, j)?;
            if t.quadratic.contains_key(&key) {
                return Err(Error::InvalidProblem(format!("duplicate coupling ({},{})", key.0, key.1)));
            }
            t.add_quadratic(i, j, v)?;
        }
        Ok(t)
    }

    fn linear(&self, i: usize) -> f64 {
        self.linear.get(&i).copied().unwrap_or(0.0)
    }

    fn quadratic(&self, i: usize, j: usize) -> f64 {
        match canonical(i, j) {
            Ok(k) => self.quadratic.get(&k).copied().unwrap_or(0.0),
            Err(_) => 0.0,
        }
    }

    fn max_abs(&self) -> f64 {
        self.linear
            .values()
            .chain(self.quadratic.values())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Evaluates with variable values supplied by `value(i)`.
    fn evaluate(&self, value: impl Fn(usize) -> f64) -> f64 {
        let lin: f64 = self.linear.iter().map(|(&i, &h)| h * value(i)).sum();
        let quad: f64 = self.quadratic.iter().map(|(&(i, j), &c)| c * value(i) * value(j)).sum();
        quad + lin + self.offset
    }
}

macro_rules! problem_accessors {
    ($ty:ident) => {
        impl $ty {
            pub fn new(num_vars: usize) -> Self {
                $ty(Terms::new(num_vars))
            }

            /// Builds a problem from explicit term lists. Duplicate keys (after
            /// canonical ordering), self-couplings, out-of-range indices and
            /// non-finite values are rejected.
            pub fn from_terms(
                num_vars: usize,
                linear: impl IntoIterator<Item = (usize, f64)>,
                quadratic: impl IntoIterator<Item = ((usize, usize), f64)>,
                offset: f64,
            ) -> Result<Self> {
                Terms::from_terms(num_vars, linear, quadratic, offset).map($ty)
            }

            pub fn num_vars(&self) -> usize {
                self.0.num_vars
            }

            /// Adds `v` to the linear coefficient of variable `i`.
            pub fn add_linear(&mut self, i: usize, v: f64) -> Result<()> {
                self.0.add_linear(i, v)
            }

            /// Adds `v` to the coupling between `i` and `j` (either order).
            pub fn add_quadratic(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
                self.0.add_quadratic(i, j, v)
            }

            pub fn linear(&self, i: usize) -> f64 {
                self.0.linear(i)
            }

            pub fn quadratic(&self, i: usize, j: usize) -> f64 {
                self.0.quadratic(i, j)
            }

            pub fn offset(&self) -> f64 {
                self.0.offset
            }

            pub fn set_offset(&mut self, offset: f64) -> Result<()> {
                check_finite(offset, "offset")?;
                self.0.offset = offset;
                Ok(())
            }

            pub fn linear_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
                self.0.linear.iter().map(|(&i, &v)| (i, v))
            }

            pub fn quadratic_terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
                self.0.quadratic.iter().map(|(&k, &v)| (k, v))
            }

            pub fn num_couplings(&self) -> usize {
                self.0.quadratic.len()
            }

            /// Largest absolute linear or quadratic coefficient (offset excluded).
            pub fn max_abs_coefficient(&self) -> f64 {
                self.0.max_abs()
            }

            /// Largest absolute linear coefficient.
            pub fn max_abs_linear(&self) -> f64 {
                self.0.linear.values().fold(0.0_f64, |m, v| m.max(v.abs()))
            }

            /// Largest absolute quadratic coefficient.
            pub fn max_abs_quadratic(&self) -> f64 {
                self.0.quadratic.values().fold(0.0_f64, |m, v| m.max(v.abs()))
            }

            /// Applies `f` to every linear and quadratic coefficient. The offset is untouched.
            pub fn map_coefficients(&self, mut f: impl FnMut(Coefficient, f64) -> f64) -> Result<Self> {
                let mut t = self.0.clone();
                for (&i, v) in t.linear.iter_mut() {
                    *v = f(Coefficient::Linear(i), *v);
                    check_finite(*v, "linear")?;
                }
                for (&(i, j), v) in t.quadratic.iter_mut() {
                    *v = f(Coefficient::Quadratic(i, j), *v);
                    check_finite(*v, "quadratic")?;
                }
                Ok($ty(t))
            }

            /// Multiplies every coefficient, offset included, by `factor`.
            pub fn scaled(&self, factor: f64) -> Result<Self> {
                let mut out = self.map_coefficients(|_, v| v * factor)?;
                out.set_offset(self.offset() * factor)?;
                Ok(out)
            }

            /// Variable-interaction graph: one edge per nonzero stored coupling.
            pub fn interaction_graph(&self) -> crate::chimera::ProblemGraph {
                crate::chimera::ProblemGraph::new(
                    self.num_vars(),
                    self.0.quadratic.iter().filter(|(_, v)| **v != 0.0).map(|(&k, _)| k),
                )
                .expect("stored couplings are canonical and in range")
            }
        }
    };
}

/// Identifies a coefficient passed to [`QuboProblem::map_coefficients`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Linear(usize),
    Quadratic(usize, usize),
}

/// Quadratic objective over binary variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuboProblem(Terms);

/// Quadratic objective over spin variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IsingProblem(Terms);

problem_accessors!(QuboProblem);
problem_accessors!(IsingProblem);

/// Coefficient-level operations shared by both problem forms.
pub trait ProblemTerms: Clone {
    fn num_vars(&self) -> usize;
    fn add_linear(&mut self, i: usize, v: f64) -> Result<()>;
    fn map_coefficients(&self, f: impl FnMut(Coefficient, f64) -> f64) -> Result<Self>;
    fn max_abs_linear(&self) -> f64;
    fn max_abs_quadratic(&self) -> f64;
    fn scaled(&self, factor: f64) -> Result<Self>;
}

macro_rules! problem_terms_impl {
    ($ty:ident) => {
        impl ProblemTerms for $ty {
            fn num_vars(&self) -> usize {
                $ty::num_vars(self)
            }
            fn add_linear(&mut self, i: usize, v: f64) -> Result<()> {
                $ty::add_linear(self, i, v)
            }
            fn map_coefficients(&self, f: impl FnMut(Coefficient, f64) -> f64) -> Result<Self> {
                $ty::map_coefficients(self, f)
            }
            fn max_abs_linear(&self) -> f64 {
                $ty::max_abs_linear(self)
            }
            fn max_abs_quadratic(&self) -> f64 {
                $ty::max_abs_quadratic(self)
            }
            fn scaled(&self, factor: f64) -> Result<Self> {
                $ty::scaled(self, factor)
            }
        }
    };
}

problem_terms_impl!(QuboProblem);
problem_terms_impl!(IsingProblem);

impl QuboProblem {
    pub fn energy(&self, a: &Assignment) -> Result<f64> {
        self.check_len(a.len())?;
        Ok(self.energy_bits(a.bits()))
    }

    /// Energy of a raw bit slice; the caller guarantees the length.
    pub fn energy_bits(&self, bits: &[u8]) -> f64 {
        debug_assert_eq!(bits.len(), self.num_vars());
        self.0.evaluate(|i| bits[i] as f64)
    }

    /// Energy change from flipping bit `k` of `bits`.
    pub fn flip_delta(&self, bits: &[u8], k: usize) -> f64 {
        let mut field = self.linear(k);
        for (&(i, j), &c) in &self.0.quadratic {
            if i == k {
                field += c * bits[j] as f64;
            } else if j == k {
                field += c * bits[i] as f64;
            }
        }
        if bits[k] == 0 {
            field
        } else {
            -field
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.num_vars() {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.num_vars(), actual: len })
        }
    }

    /// Exact conversion under `s = 2x - 1`.
    pub fn to_ising(&self) -> IsingProblem {
        // x = (s + 1) / 2
        let mut t = Terms::new(self.num_vars());
        let mut offset = self.offset();
        for (i, h) in self.linear_terms() {
            *t.linear.entry(i).or_insert(0.0) += h / 2.0;
            offset += h / 2.0;
        }
        for ((i, j), c) in self.quadratic_terms() {
            t.quadratic.insert((i, j), c / 4.0);
            *t.linear.entry(i).or_insert(0.0) += c / 4.0;
            *t.linear.entry(j).or_insert(0.0) += c / 4.0;
            offset += c / 4.0;
        }
        t.offset = offset;
        IsingProblem(t)
    }

    /// Relabels variable `vars[k]` as `k`. Every term must involve only listed variables.
    pub fn reindexed(&self, vars: &[usize]) -> Result<QuboProblem> {
        let mut position = BTreeMap::new();
        for (k, &v) in vars.iter().enumerate() {
            position.insert(v, k);
        }
        let at = |v: usize| {
            position
                .get(&v)
                .copied()
                .ok_or_else(|| Error::InvalidProblem(format!("variable {v} is not in the retained set")))
        };
        let mut out = QuboProblem::new(vars.len());
        for (i, h) in self.linear_terms() {
            if h != 0.0 {
                out.add_linear(at(i)?, h)?;
            }
        }
        for ((i, j), c) in self.quadratic_terms() {
            out.add_quadratic(at(i)?, at(j)?, c)?;
        }
        out.set_offset(self.offset())?;
        Ok(out)
    }

    /// Dense adjacency view used by the solvers' inner loops.
    pub fn dense(&self) -> DenseQubo {
        DenseQubo::from_problem(self)
    }
}

impl IsingProblem {
    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.num_vars() {
            return Err(Error::Dimension { expected: self.num_vars(), actual: spins.len() });
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidProblem("spins must be -1 or +1".into()));
        }
        Ok(self.0.evaluate(|i| spins[i] as f64))
    }

    /// Exact conversion under `x = (s + 1) / 2`.
    pub fn to_qubo(&self) -> QuboProblem {
        // s = 2x - 1
        let mut t = Terms::new(self.num_vars());
        let mut offset = self.offset();
        for (i, h) in self.linear_terms() {
            *t.linear.entry(i).or_insert(0.0) += 2.0 * h;
            offset -= h;
        }
        for ((i, j), c) in self.quadratic_terms() {
            t.quadratic.insert((i, j), 4.0 * c);
            *t.linear.entry(i).or_insert(0.0) -= 2.0 * c;
            *t.linear.entry(j).or_insert(0.0) -= 2.0 * c;
            offset += c;
        }
        t.offset = offset;
        QuboProblem(t)
    }
}

pub fn qubo_to_ising(q: &QuboProblem) -> IsingProblem {
    q.to_ising()
}

pub fn ising_to_qubo(p: &IsingProblem) -> QuboProblem {
    p.to_qubo()
}

pub fn energy(q: &QuboProblem, a: &Assignment) -> Result<f64> {
    q.energy(a)
}

/// Adjacency-list form of a QUBO for O(degree) flip deltas.
#[derive(Clone, Debug)]
pub struct DenseQubo {
    pub linear: Vec<f64>,
    pub neighbors: Vec<Vec<(usize, f64)>>,
    pub offset: f64,
}

impl DenseQubo {
    fn from_problem(q: &QuboProblem) -> Self {
        let n = q.num_vars();
        let mut linear = vec![0.0; n];
        for (i, h) in q.linear_terms() {
            linear[i] = h;
        }
        let mut neighbors = vec![Vec::new(); n];
        for ((i, j), c) in q.quadratic_terms() {
            if c != 0.0 {
                neighbors[i].push((j, c));
                neighbors[j].push((i, c));
            }
        }
        DenseQubo { linear, neighbors, offset: q.offset() }
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty()
    }

    /// Local field `h_k + sum_j J_kj x_j`.
    #[inline]
    pub fn field(&self, bits: &[u8], k: usize) -> f64 {
        let mut f = self.linear[k];
        for &(j, c) in &self.neighbors[k] {
            if bits[j] != 0 {
                f += c;
            }
        }
        f
    }

    #[inline]
    pub fn flip_delta(&self, bits: &[u8], k: usize) -> f64 {
        let f = self.field(bits, k);
        if bits[k] == 0 {
            f
        } else {
            -f
        }
    }

    pub fn energy(&self, bits: &[u8]) -> f64 {
        let mut e = self.offset;
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                e += self.linear[i];
                for &(j, c) in &self.neighbors[i] {
                    if j > i && bits[j] != 0 {
                        e += c;
                    }
                }
            }
        }
        e
    }
}

#[derive(Serialize, Deserialize)]
struct ProblemJson {
    num_vars: usize,
    linear: BTreeMap<String, f64>,
    quadratic: BTreeMap<String, f64>,
    offset: f64,
}

impl ProblemJson {
    fn from_terms(t: &Terms) -> Self {
        ProblemJson {
            num_vars: t.num_vars,
            linear: t.linear.iter().map(|(i, v)| (i.to_string(), *v)).collect(),
            quadratic: t.quadratic.iter().map(|((i, j), v)| (format!("{i},{j}"), *v)).collect(),
            offset: t.offset,
        }
    }

    fn into_terms(self) -> Result<Terms> {
        let parse_index = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidProblem(format!("bad variable index {s:?}")))
        };
        let linear = self
            .linear
            .iter()
            .map(|(k, v)| Ok((parse_index(k)?, *v)))
            .collect::<Result<Vec<_>>>()?;
        let quadratic = self
            .quadratic
            .iter()
            .map(|(k, v)| {
                let (a, b) = k
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidProblem(format!("bad coupling key {k:?}")))?;
                Ok(((parse_index(a)?, parse_index(b)?), *v))
            })
            .collect::<Result<Vec<_>>>()?;
        Terms::from_terms(self.num_vars, linear, quadratic, self.offset)
    }
}

macro_rules! problem_serde {
    ($ty:ident) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                ProblemJson::from_terms(&self.0).serialize(serializer)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
                ProblemJson::deserialize(deserializer)?
                    .into_terms()
                    .map($ty)
                    .map_err(serde::de::Error::custom)
            }
        }
    };
}

problem_serde!(QuboProblem);
problem_serde!(IsingProblem);
