//! Finite groups given by multiplication tables, their actions on
//! multi-factor matrix algebras, twirling and covariance checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cpmaps::CpMorphism;
use crate::error::{Error, Result};
use crate::linalg::{c, eye, fdist, is_unitary, kron, ComplexMatrix, Projection};
use crate::relations::QuantumRelation;
use crate::systems::{Element, System};

const EXHAUSTIVE_ASSOCIATIVITY: usize = 24;
const SAMPLED_TRIPLES: usize = 20_000;

/// A finite group given by its multiplication table: `mult[g][h] = g·h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(mult_table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let n = mult_table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty multiplication table".into()));
        }
        if identity >= n {
            return Err(Error::InvalidGroup(format!("identity {} out of range", identity)));
        }
        for (g, row) in mult_table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {} has length {}", g, row.len())));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || seen[x] {
                    return Err(Error::InvalidGroup(format!("row {} is not a permutation", g)));
                }
                seen[x] = true;
            }
        }
        for h in 0..n {
            let mut seen = vec![false; n];
            for row in &mult_table {
                if seen[row[h]] {
                    return Err(Error::InvalidGroup(format!("column {} is not a permutation", h)));
                }
                seen[row[h]] = true;
            }
        }
        for g in 0..n {
            if mult_table[identity][g] != g || mult_table[g][identity] != g {
                return Err(Error::InvalidGroup(format!("{} is not a two-sided identity", identity)));
            }
        }
        let assoc = |a: usize, b: usize, c: usize| mult_table[mult_table[a][b]][c] == mult_table[a][mult_table[b][c]];
        if n <= EXHAUSTIVE_ASSOCIATIVITY {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(Error::InvalidGroup(format!("not associative on ({}, {}, {})", a, b, c)));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                if !assoc(a, b, c) {
                    return Err(Error::InvalidGroup(format!("not associative on ({}, {}, {})", a, b, c)));
                }
            }
        }
        // Latin square rows guarantee a right inverse in every row.
        let inverse = (0..n)
            .map(|g| mult_table[g].iter().position(|&x| x == identity).expect("latin row"))
            .collect();
        Ok(FiniteGroup { mult: mult_table, identity, inverse })
    }

    pub fn trivial() -> Self {
        FiniteGroup { mult: vec![vec![0]], identity: 0, inverse: vec![0] }
    }

    pub fn cyclic(n: usize) -> Self {
        let mult = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::new(mult, 0).expect("cyclic table")
    }

    /// Symmetric group on `n` letters; element `g` is `symmetric_permutations(n)[g]`.
    pub fn symmetric(n: usize) -> Self {
        let perms = symmetric_permutations(n);
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).expect("closed under composition");
        let mult = perms
            .iter()
            .map(|g| perms.iter().map(|h| index(&h.iter().map(|&i| g[i]).collect())).collect())
            .collect();
        FiniteGroup::new(mult, 0).expect("symmetric table")
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }
}

/// All permutations of `0..n` in lexicographic order (identity first).
pub fn symmetric_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Action of a finite group on `⊕ᵢ B(Hᵢ)`.
///
/// Element `g` sends block `i` of `x` to slot `perms[g][i]`, conjugated by
/// `unitaries[g][i]`. The induced automorphisms satisfy `α_g ∘ α_h = α_{g·h}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraAction {
    group: Arc<FiniteGroup>,
    perms: Vec<Vec<usize>>,
    unitaries: Vec<Vec<ComplexMatrix>>,
}

impl AlgebraAction {
    pub fn new(
        group: Arc<FiniteGroup>,
        dims: &[usize],
        perms: Vec<Vec<usize>>,
        unitaries: Vec<Vec<ComplexMatrix>>,
        tol: f64,
    ) -> Result<Self> {
        let n = group.order();
        let m = dims.len();
        if perms.len() != n || unitaries.len() != n {
            return Err(Error::ActionShapeMismatch(format!("expected data for {} group elements", n)));
        }
        for g in 0..n {
            if perms[g].len() != m || unitaries[g].len() != m {
                return Err(Error::ActionShapeMismatch(format!("element {} does not cover {} factors", g, m)));
            }
            let mut seen = vec![false; m];
            for (i, &t) in perms[g].iter().enumerate() {
                if t >= m || seen[t] {
                    return Err(Error::ActionShapeMismatch(format!("element {} does not permute the factors", g)));
                }
                seen[t] = true;
                if dims[t] != dims[i] {
                    return Err(Error::ActionShapeMismatch(format!(
                        "element {} maps factor {} (dim {}) to factor {} (dim {})",
                        g, i, dims[i], t, dims[t]
                    )));
                }
                let u = &unitaries[g][i];
                if u.nrows() != dims[i] || u.ncols() != dims[i] {
                    return Err(Error::ActionShapeMismatch(format!("unitary for ({}, {}) has wrong shape", g, i)));
                }
                if !is_unitary(u, tol) {
                    return Err(Error::InvalidAction(format!("matrix for ({}, {}) is not unitary", g, i)));
                }
            }
        }
        let action = AlgebraAction { group, perms, unitaries };
        action.check_homomorphism(dims, tol)?;
        Ok(action)
    }

    pub fn trivial(group: Arc<FiniteGroup>, dims: &[usize]) -> Self {
        let n = group.order();
        AlgebraAction {
            group,
            perms: vec![(0..dims.len()).collect(); n],
            unitaries: vec![dims.iter().map(|&d| eye(d)).collect(); n],
        }
    }

    /// Action on `ℂⁿ` permuting the points.
    pub fn permutation(group: Arc<FiniteGroup>, perms: Vec<Vec<usize>>) -> Result<Self> {
        let m = perms.first().map_or(0, |p| p.len());
        let unitaries = vec![vec![eye(1); m]; perms.len()];
        AlgebraAction::new(group, &vec![1; m], perms, unitaries, crate::linalg::TOL_PROJ)
    }

    fn check_homomorphism(&self, dims: &[usize], tol: f64) -> Result<()> {
        let n = self.group.order();
        let e = self.group.identity();
        for unit in Element::matrix_units(dims) {
            let x = unit.element;
            if self.act(e, &x)?.dist(&x) > tol {
                return Err(Error::InvalidAction("identity does not act trivially".into()));
            }
            for g in 0..n {
                let gx = self.act(g, &x)?;
                for h in 0..n {
                    let lhs = self.act(h, &gx)?;
                    let rhs = self.act(self.group.mul(h, g), &x)?;
                    if lhs.dist(&rhs) > tol {
                        return Err(Error::InvalidAction(format!("alpha_{} o alpha_{} != alpha_{}", h, g, self.group.mul(h, g))));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn perm(&self, g: usize) -> &[usize] {
        &self.perms[g]
    }

    pub fn unitary(&self, g: usize, factor: usize) -> &ComplexMatrix {
        &self.unitaries[g][factor]
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn unitaries(&self) -> &[Vec<ComplexMatrix>] {
        &self.unitaries
    }

    pub fn n_factors(&self) -> usize {
        self.perms.first().map_or(0, |p| p.len())
    }

    pub fn is_trivial(&self) -> bool {
        self.group.is_trivial()
    }

    /// `α_g(x)`: block `i` conjugated by `U_{g,i}` and moved to slot `σ_g(i)`.
    pub fn act(&self, g: usize, x: &Element) -> Result<Element> {
        if x.blocks.len() != self.n_factors() {
            return Err(Error::ShapeMismatch(format!(
                "element has {} blocks, action has {} factors",
                x.blocks.len(),
                self.n_factors()
            )));
        }
        let mut out = x.blocks.clone();
        for (i, b) in x.blocks.iter().enumerate() {
            let u = &self.unitaries[g][i];
            if b.nrows() != u.nrows() || b.ncols() != u.nrows() {
                return Err(Error::ShapeMismatch(format!("block {} has wrong shape", i)));
            }
            out[self.perms[g][i]] = u * b * u.adjoint();
        }
        Ok(Element { blocks: out })
    }
}

fn same_group(a: &System, b: &System) -> Result<()> {
    if a.action().group() != b.action().group() {
        return Err(Error::GroupMismatch);
    }
    Ok(())
}

/// Unitary on `vec(Hom(K_j, H_i))` pulling block `(σ_A(i), σ_B(j))` back to `(i, j)` under `g`.
pub fn induced_block_unitary(a: &AlgebraAction, b: &AlgebraAction, g: usize, i: usize, j: usize) -> ComplexMatrix {
    kron(&b.unitary(g, j).transpose(), &a.unitary(g, i).adjoint())
}

/// `β_g⁻¹ ∘ f ∘ α_g`, computed on Choi blocks.
pub fn transform_cp(f: &CpMorphism, g: usize) -> CpMorphism {
    let (a, b) = (f.source().action(), f.target().action());
    let (na, nb) = (f.source().n_factors(), f.target().n_factors());
    let mut blocks = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            let w = induced_block_unitary(a, b, g, i, j);
            let src = f.choi(a.perm(g)[i], b.perm(g)[j]);
            blocks.push(&w * src * w.adjoint());
        }
    }
    CpMorphism::from_blocks_unchecked(f.source().clone(), f.target().clone(), blocks)
}

/// Group average `(1/|G|) Σ_g β_g⁻¹ ∘ f ∘ α_g`.
pub fn twirl_cp(f: &CpMorphism) -> Result<CpMorphism> {
    same_group(f.source(), f.target())?;
    let group = f.source().action().group().clone();
    let n = group.order();
    if n == 1 {
        return Ok(f.clone());
    }
    let parts = crate::par::map(&(0..n).collect::<Vec<_>>(), |&g| transform_cp(f, g));
    let mut blocks: Vec<ComplexMatrix> = parts[0].choi_blocks().to_vec();
    for p in &parts[1..] {
        for (acc, b) in blocks.iter_mut().zip(p.choi_blocks()) {
            *acc += b;
        }
    }
    let scale = c(1.0 / n as f64);
    for b in blocks.iter_mut() {
        *b *= scale;
    }
    Ok(CpMorphism::from_blocks_unchecked(f.source().clone(), f.target().clone(), blocks))
}

/// `‖twirl_cp(f) − f‖ < tol` in blockwise Frobenius norm.
pub fn is_covariant_cp(f: &CpMorphism, tol: f64) -> Result<bool> {
    Ok(twirl_cp(f)?.dist(f) < tol)
}

/// Whether the block projection family is invariant under the induced action on operator spaces.
pub fn is_covariant_relation(p: &QuantumRelation, tol: f64) -> Result<bool> {
    same_group(p.source(), p.target())?;
    let (a, b) = (p.source().action(), p.target().action());
    let (na, nb) = (p.source().n_factors(), p.target().n_factors());
    for g in 0..a.group().order() {
        for i in 0..na {
            for j in 0..nb {
                let w = induced_block_unitary(a, b, g, i, j);
                let moved = &w * p.block(a.perm(g)[i], b.perm(g)[j]).matrix() * w.adjoint();
                if fdist(&moved, p.block(i, j).matrix()) >= tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Group average of a relation's projections; its support is the smallest covariant relation above `p`.
pub fn covariant_closure(p: &QuantumRelation, tol: f64) -> Result<QuantumRelation> {
    same_group(p.source(), p.target())?;
    let twirled = twirl_cp(&p.as_cp())?;
    crate::relations::support_of(&twirled, tol)
}

/// Projection family transported by `g`, for tests and diagnostics.
pub fn transform_relation(p: &QuantumRelation, g: usize) -> Result<QuantumRelation> {
    let f = transform_cp(&p.as_cp(), g);
    let blocks = f
        .choi_blocks()
        .iter()
        .map(|b| Projection::new(b.clone(), crate::linalg::TOL_PROJ))
        .collect::<Result<Vec<_>>>()?;
    QuantumRelation::new(p.source().clone(), p.target().clone(), blocks)
}
