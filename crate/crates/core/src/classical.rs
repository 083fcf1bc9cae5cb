//! Commutative special cases: stochastic matrices, boolean relations and
//! graphs, their embeddings as quantum objects, and enumeration oracles.
//!
//! The oracles use boolean supports only and never touch the floating-point
//! quantum path.

use crate::cpmaps::{CpMorphism, KrausFamily};
use crate::error::{Error, Result};
use crate::graphs::QuantumGraph;
use crate::linalg::{c, ComplexMatrix, Projection, Tol};
use crate::relations::QuantumRelation;
use crate::scc::{tensor_system, Source};
use crate::systems::System;

/// Column-stochastic matrix `p[j][i]` = probability of output `j` given input `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    entries: Vec<Vec<f64>>,
}

impl StochasticMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("stochastic matrix must be a nonempty rectangular grid".into()));
        }
        if entries.iter().flatten().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidInput("stochastic matrix entries must be nonnegative".into()));
        }
        for i in 0..cols {
            let s: f64 = entries.iter().map(|r| r[i]).sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!("column {} sums to {}", i, s)));
            }
        }
        Ok(StochasticMatrix { entries })
    }

    pub fn n_outputs(&self) -> usize {
        self.entries.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.entries[0].len()
    }

    /// Probability of output `j` given input `i`.
    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.entries[j][i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.entries
    }

    /// Input `i` relates to output `j` iff `p_{ji} > 0`.
    pub fn support(&self) -> ClassicalRelation {
        ClassicalRelation::new(
            (0..self.n_inputs())
                .map(|i| (0..self.n_outputs()).map(|j| self.get(j, i) > 0.0).collect())
                .collect(),
        )
    }

    pub fn matmul(&self, other: &StochasticMatrix) -> Result<StochasticMatrix> {
        if self.n_inputs() != other.n_outputs() {
            return Err(Error::DimensionMismatch("stochastic product shapes".into()));
        }
        let entries = (0..self.n_outputs())
            .map(|j| {
                (0..other.n_inputs())
                    .map(|i| (0..self.n_inputs()).map(|k| self.get(j, k) * other.get(k, i)).sum())
                    .collect()
            })
            .collect();
        Ok(StochasticMatrix { entries })
    }
}

/// Boolean relation `rel[i][j]`: input `i` relates to output `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassicalRelation {
    rel: Vec<Vec<bool>>,
}

impl ClassicalRelation {
    /// Panics on a ragged grid.
    pub fn new(rel: Vec<Vec<bool>>) -> Self {
        let m = rel.first().map_or(0, |r| r.len());
        assert!(rel.iter().all(|r| r.len() == m), "ragged relation");
        ClassicalRelation { rel }
    }

    pub fn n_inputs(&self) -> usize {
        self.rel.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.rel.first().map_or(0, |r| r.len())
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rel[i][j]
    }

    pub fn converse(&self) -> ClassicalRelation {
        ClassicalRelation::new((0..self.n_outputs()).map(|j| (0..self.n_inputs()).map(|i| self.rel[i][j]).collect()).collect())
    }

    /// All `2^(n·m)` relations between `n` inputs and `m` outputs.
    pub fn all(n: usize, m: usize) -> impl Iterator<Item = ClassicalRelation> {
        let bits = n * m;
        (0u64..(1u64 << bits)).map(move |mask| {
            ClassicalRelation::new(
                (0..n).map(|i| (0..m).map(|j| mask >> (i * m + j) & 1 == 1).collect()).collect(),
            )
        })
    }
}

/// Symmetric boolean adjacency matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassicalGraph {
    adj: Vec<Vec<bool>>,
}

impl ClassicalGraph {
    pub fn new(adj: Vec<Vec<bool>>) -> Result<Self> {
        let n = adj.len();
        if adj.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("adjacency matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if adj[i][j] != adj[j][i] {
                    return Err(Error::InvalidInput("adjacency matrix must be symmetric".into()));
                }
            }
        }
        Ok(ClassicalGraph { adj })
    }

    pub fn complete(n: usize) -> Self {
        ClassicalGraph { adj: vec![vec![true; n]; n] }
    }

    /// Loops only.
    pub fn discrete(n: usize) -> Self {
        ClassicalGraph { adj: (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect() }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn complement(&self) -> ClassicalGraph {
        ClassicalGraph { adj: self.adj.iter().map(|r| r.iter().map(|&x| !x).collect()).collect() }
    }

    pub fn is_confusability(&self) -> bool {
        (0..self.n()).all(|i| self.adj[i][i])
    }

    pub fn is_simple(&self) -> bool {
        (0..self.n()).all(|i| !self.adj[i][i])
    }

    /// All symmetric graphs on `n` vertices; loops included iff `loops`.
    pub fn all(n: usize, loops: bool) -> impl Iterator<Item = ClassicalGraph> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        (0u64..(1u64 << pairs.len())).map(move |mask| {
            let mut adj = vec![vec![false; n]; n];
            for (k, &(i, j)) in pairs.iter().enumerate() {
                let on = mask >> k & 1 == 1;
                adj[i][j] = on;
                adj[j][i] = on;
            }
            for (i, row) in adj.iter_mut().enumerate() {
                row[i] = loops;
            }
            ClassicalGraph { adj }
        })
    }
}

/// Classical source `p[s][a][b]`: probability of `(a, b)` given source symbol `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSource {
    prob: Vec<Vec<Vec<f64>>>,
}

impl ClassicalSource {
    pub fn new(prob: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let ns = prob.len();
        let na = prob.first().map_or(0, |x| x.len());
        let nb = prob.first().and_then(|x| x.first()).map_or(0, |x| x.len());
        if ns == 0 || na == 0 || nb == 0 {
            return Err(Error::InvalidInput("source needs nonempty symbol sets".into()));
        }
        for ps in &prob {
            if ps.len() != na || ps.iter().any(|r| r.len() != nb) {
                return Err(Error::InvalidInput("ragged source distribution".into()));
            }
            let total: f64 = ps.iter().flatten().sum();
            if ps.iter().flatten().any(|&x| !(x >= 0.0)) || (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput("each source symbol needs a probability distribution".into()));
            }
        }
        Ok(ClassicalSource { prob })
    }

    pub fn n_s(&self) -> usize {
        self.prob.len()
    }

    pub fn n_a(&self) -> usize {
        self.prob[0].len()
    }

    pub fn n_b(&self) -> usize {
        self.prob[0][0].len()
    }

    pub fn get(&self, s: usize, a: usize, b: usize) -> f64 {
        self.prob[s][a][b]
    }

    /// Joint channel `S → A×B` with output index `a·n_b + b`.
    pub fn joint(&self) -> StochasticMatrix {
        let (na, nb) = (self.n_a(), self.n_b());
        let entries = (0..na * nb)
            .map(|ab| (0..self.n_s()).map(|s| self.prob[s][ab / nb][ab % nb]).collect())
            .collect();
        StochasticMatrix { entries }
    }
}

pub fn embed_channel(p: &StochasticMatrix) -> CpMorphism {
    let (n, m) = (p.n_inputs(), p.n_outputs());
    let mut k = KrausFamily::new(n, m);
    for i in 0..n {
        for j in 0..m {
            if p.get(j, i) > 0.0 {
                k.push(i, j, ComplexMatrix::from_element(1, 1, c(p.get(j, i).sqrt())));
            }
        }
    }
    CpMorphism::from_kraus(&k, System::classical(n), System::classical(m)).expect("scalar blocks")
}

pub fn embed_relation(r: &ClassicalRelation) -> QuantumRelation {
    let blocks = (0..r.n_inputs())
        .flat_map(|i| (0..r.n_outputs()).map(move |j| (i, j)))
        .map(|(i, j)| if r.get(i, j) { Projection::identity(1) } else { Projection::zero(1) })
        .collect();
    QuantumRelation::new(System::classical(r.n_inputs()), System::classical(r.n_outputs()), blocks)
        .expect("scalar blocks")
}

pub fn embed_graph(g: &ClassicalGraph) -> QuantumGraph {
    let r = ClassicalRelation::new(g.adj.clone());
    QuantumGraph::new(embed_relation(&r), Tol::default()).expect("symmetric by construction")
}

/// The source as a quantum source on commutative systems; fails unless the joint channel is reversible.
pub fn embed_source(src: &ClassicalSource, tol: Tol) -> Result<Source> {
    let s = System::classical(src.n_s());
    let oa = System::classical(src.n_a());
    let ob = System::classical(src.n_b());
    let joint = tensor_system(&oa, &ob)?;
    let channel = embed_channel(&src.joint()).with_systems(s.clone(), joint.product().clone())?;
    Source::new(s, oa, ob, channel, tol)
}

fn require_commutative(sys: &System) -> Result<()> {
    if !sys.is_commutative() {
        return Err(Error::InvalidInput("system is not commutative".into()));
    }
    Ok(())
}

pub fn extract_channel(f: &CpMorphism) -> Result<StochasticMatrix> {
    require_commutative(f.source())?;
    require_commutative(f.target())?;
    let entries = (0..f.target().n_factors())
        .map(|j| (0..f.source().n_factors()).map(|i| f.choi(i, j)[(0, 0)].re).collect())
        .collect();
    StochasticMatrix::new(entries)
}

pub fn extract_relation(r: &QuantumRelation, _tol: f64) -> Result<ClassicalRelation> {
    require_commutative(r.source())?;
    require_commutative(r.target())?;
    Ok(ClassicalRelation::new(
        (0..r.source().n_factors())
            .map(|i| (0..r.target().n_factors()).map(|j| r.block(i, j).rank() > 0).collect())
            .collect(),
    ))
}

pub fn extract_graph(g: &QuantumGraph) -> Result<ClassicalGraph> {
    let r = extract_relation(g.relation(), 0.0)?;
    ClassicalGraph::new(r.rel)
}

/// `i ~ i'` iff some output is possible from both.
pub fn oracle_confusability(p: &StochasticMatrix) -> ClassicalGraph {
    let supp = p.support();
    let n = p.n_inputs();
    let adj = (0..n)
        .map(|i| (0..n).map(|k| i == k || (0..p.n_outputs()).any(|j| supp.get(i, j) && supp.get(k, j))).collect())
        .collect();
    ClassicalGraph { adj }
}

/// `s ∘ r` as a boolean matrix product.
pub fn oracle_compose(r: &ClassicalRelation, s: &ClassicalRelation) -> ClassicalRelation {
    ClassicalRelation::new(
        (0..r.n_inputs())
            .map(|i| (0..s.n_outputs()).map(|k| (0..r.n_outputs()).any(|j| r.get(i, j) && s.get(j, k))).collect())
            .collect(),
    )
}

/// Stochastic homomorphism of simple graphs: whenever `(x, y)` is possible and
/// `x ~ z`, every possible image `z̃` of `z` satisfies `y ~ z̃`.
pub fn oracle_stochastic_hom(p: &StochasticMatrix, ga: &ClassicalGraph, gb: &ClassicalGraph) -> bool {
    let r = p.support();
    for x in 0..p.n_inputs() {
        for y in 0..p.n_outputs() {
            if !r.get(x, y) {
                continue;
            }
            for z in 0..p.n_inputs() {
                if !ga.get(x, z) {
                    continue;
                }
                for zt in 0..p.n_outputs() {
                    if r.get(z, zt) && !gb.get(y, zt) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Whether some deterministic decoder recovers every input with certainty.
///
/// A stochastic decoder exists iff a deterministic one does, so enumerating
/// all `n_in^n_out` decoding functions is exhaustive.
pub fn oracle_reversible(p: &StochasticMatrix) -> bool {
    let (n, m) = (p.n_inputs(), p.n_outputs());
    let supp = p.support();
    let total = (n as u64).pow(m as u32);
    (0..total).any(|code| {
        let mut dec = vec![0usize; m];
        let mut c = code;
        for d in dec.iter_mut() {
            *d = (c % n as u64) as usize;
            c /= n as u64;
        }
        (0..n).all(|i| (0..m).all(|j| !supp.get(i, j) || dec[j] == i))
    })
}

/// `a ~ a'` iff no side-information value `b` is possible under two different
/// source symbols for `a` and `a'` respectively; loops always present.
pub fn oracle_source_graph(src: &ClassicalSource) -> ClassicalGraph {
    let n = src.n_a();
    let clash = |a: usize, a2: usize| {
        (0..src.n_b()).any(|b| {
            (0..src.n_s()).any(|s| {
                (0..src.n_s()).any(|s2| s != s2 && src.get(s, a, b) > 0.0 && src.get(s2, a2, b) > 0.0)
            })
        })
    };
    let adj = (0..n).map(|a| (0..n).map(|a2| a == a2 || !clash(a, a2)).collect()).collect();
    ClassicalGraph { adj }
}

/// Whether the joint channel of the source is reversible (disjoint supports in `A×B`).
pub fn oracle_source_reversible(src: &ClassicalSource) -> bool {
    oracle_reversible(&src.joint())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_extract_round_trip() {
        let p = StochasticMatrix::new(vec![vec![1.0], vec![0.0]]).unwrap();
        let f = embed_channel(&p);
        assert!(f.is_channel(1e-12));
        assert_eq!(extract_channel(&f).unwrap(), p);
        let id = StochasticMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(embed_channel(&id).dist(&CpMorphism::identity(&System::classical(2))) < 1e-15);
        let k3 = ClassicalGraph::complete(3);
        let g = embed_graph(&k3);
        assert!(g.relation().dist(&QuantumRelation::complete(System::classical(3), System::classical(3))) < 1e-15);
        assert_eq!(extract_graph(&g).unwrap(), k3);
        assert!(StochasticMatrix::new(vec![vec![0.5], vec![0.6]]).is_err());
    }

    #[test]
    fn confusability_oracle_examples() {
        let id = StochasticMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(oracle_confusability(&id), ClassicalGraph::discrete(2));
        let uni = StochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(oracle_confusability(&uni), ClassicalGraph::complete(2));
        let disjoint = StochasticMatrix::new(vec![vec![0.5, 0.0], vec![0.5, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(oracle_confusability(&disjoint), ClassicalGraph::discrete(2));
    }

    #[test]
    fn other_oracles() {
        let id = StochasticMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let k2 = ClassicalGraph::complete(2).complement().complement();
        assert!(oracle_stochastic_hom(&id, &k2, &k2));
        let merge = StochasticMatrix::new(vec![vec![1.0, 1.0]]).unwrap();
        assert!(oracle_reversible(&id));
        assert!(!oracle_reversible(&merge));
        let r = ClassicalRelation::new(vec![vec![true, false], vec![true, true]]);
        let s = ClassicalRelation::new(vec![vec![false, true], vec![true, false]]);
        let rs = oracle_compose(&r, &s);
        assert_eq!(rs, ClassicalRelation::new(vec![vec![false, true], vec![true, true]]));
        assert_eq!(ClassicalRelation::all(2, 2).count(), 16);
        assert_eq!(ClassicalGraph::all(3, true).count(), 8);
    }

    #[test]
    fn source_oracle_orientation() {
        // Bob holds a copy of the source symbol: nothing needs distinguishing.
        let full = ClassicalSource::new(vec![vec![vec![1.0, 0.0], vec![0.0, 0.0]], vec![vec![0.0, 0.0], vec![0.0, 1.0]]]).unwrap();
        assert_eq!(oracle_source_graph(&full), ClassicalGraph::complete(2));
        // no side information, identity source: every pair must be kept apart
        let none = ClassicalSource::new(vec![vec![vec![1.0], vec![0.0]], vec![vec![0.0], vec![1.0]]]).unwrap();
        assert_eq!(oracle_source_graph(&none), ClassicalGraph::discrete(2));
    }
}
