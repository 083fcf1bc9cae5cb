//! Quantum relations between systems.
//!
//! Block `(i, j)` of a relation `A → B` is a projection on `vec(Hom(K_j, Hᵢ))`
//! whose range is the set of adjoints of the "physical" operators
//! `L_{ij} ⊆ Hom(Hᵢ, K_j)`. This matches the Choi orientation of
//! [`CpMorphism`], so the relation underlying a CP morphism is its blockwise
//! support.

use crate::cpmaps::{choi_scale, CpMorphism, KrausFamily};
use crate::error::{Error, Result};
use crate::linalg::{
    c, commutation, eye, fdist, inv_sqrt, kron, min_eigenvalue, partial_trace, span_basis, support_projection_scaled,
    unvec, vec, zeros, ComplexMatrix, ComplexVector, Projection, Tol,
};
use crate::systems::System;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRelation {
    source: System,
    target: System,
    blocks: Vec<Projection>,
}

impl QuantumRelation {
    /// Blocks are ordered `i·n_target + j`.
    pub fn new(source: System, target: System, blocks: Vec<Projection>) -> Result<Self> {
        let (na, nb) = (source.n_factors(), target.n_factors());
        if blocks.len() != na * nb {
            return Err(Error::ShapeMismatch(format!("expected {} blocks, got {}", na * nb, blocks.len())));
        }
        for i in 0..na {
            for j in 0..nb {
                if blocks[i * nb + j].dim() != source.dim(i) * target.dim(j) {
                    return Err(Error::ShapeMismatch(format!("block ({}, {}) has the wrong dimension", i, j)));
                }
            }
        }
        Ok(QuantumRelation { source, target, blocks })
    }

    /// Relation whose block `(i, j)` is spanned by the given physical operators `Hᵢ → K_j`.
    pub fn from_physical(source: System, target: System, spans: &[Vec<ComplexMatrix>], tol: f64) -> Result<Self> {
        let (na, nb) = (source.n_factors(), target.n_factors());
        if spans.len() != na * nb {
            return Err(Error::ShapeMismatch(format!("expected {} spanning sets, got {}", na * nb, spans.len())));
        }
        let mut blocks = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                let (d, e) = (source.dim(i), target.dim(j));
                let mut vs = Vec::new();
                for m in &spans[i * nb + j] {
                    if m.nrows() != e || m.ncols() != d {
                        return Err(Error::ShapeMismatch(format!("operator for ({}, {}) must be {}x{}", i, j, e, d)));
                    }
                    vs.push(vec(&m.adjoint()));
                }
                let b = span_basis(&vs, d * e, tol, 0.0)?;
                blocks.push(Projection::from_orthonormal_columns(d * e, &b));
            }
        }
        QuantumRelation::new(source, target, blocks)
    }

    pub fn zero(source: System, target: System) -> Self {
        let blocks = block_pairs(&source, &target)
            .map(|(i, j)| Projection::zero(source.dim(i) * target.dim(j)))
            .collect();
        QuantumRelation { source, target, blocks }
    }

    /// Every block the full operator space.
    pub fn complete(source: System, target: System) -> Self {
        let blocks = block_pairs(&source, &target)
            .map(|(i, j)| Projection::identity(source.dim(i) * target.dim(j)))
            .collect();
        QuantumRelation { source, target, blocks }
    }

    /// The identity relation: diagonal blocks project onto `vec(I)/√d`.
    pub fn discrete(sys: &System) -> Self {
        let n = sys.n_factors();
        let mut blocks = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (d, e) = (sys.dim(i), sys.dim(j));
                if i == j {
                    let v = vec(&eye(d)) * c(1.0 / (d as f64).sqrt());
                    blocks.push(Projection::from_orthonormal_columns(d * d, &ComplexMatrix::from_column_slice(d * d, 1, v.as_slice())));
                } else {
                    blocks.push(Projection::zero(d * e));
                }
            }
        }
        QuantumRelation { source: sys.clone(), target: sys.clone(), blocks }
    }

    pub fn source(&self) -> &System {
        &self.source
    }

    pub fn target(&self) -> &System {
        &self.target
    }

    pub fn block(&self, i: usize, j: usize) -> &Projection {
        &self.blocks[i * self.target.n_factors() + j]
    }

    pub fn blocks(&self) -> &[Projection] {
        &self.blocks
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.rank()).collect()
    }

    /// Orthonormal basis of block `(i, j)` as operators `K_j → Hᵢ` (stored orientation).
    pub fn stored_basis(&self, i: usize, j: usize) -> Vec<ComplexMatrix> {
        let (d, e) = (self.source.dim(i), self.target.dim(j));
        let b = self.block(i, j).basis();
        (0..b.ncols())
            .map(|k| unvec(&b.column(k).into_owned(), d, e).expect("block shape"))
            .collect()
    }

    /// Orthonormal basis of the physical subspace `L_{ij} ⊆ Hom(Hᵢ, K_j)`.
    pub fn physical_basis(&self, i: usize, j: usize) -> Vec<ComplexMatrix> {
        self.stored_basis(i, j).into_iter().map(|m| m.adjoint()).collect()
    }

    /// Largest blockwise Frobenius distance.
    pub fn dist(&self, other: &QuantumRelation) -> f64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.dist(b)).fold(0.0, f64::max)
    }

    /// The relation read as a CP morphism whose Choi blocks are the projections.
    pub fn as_cp(&self) -> CpMorphism {
        CpMorphism::from_blocks_unchecked(
            self.source.clone(),
            self.target.clone(),
            self.blocks.iter().map(|b| b.matrix().clone()).collect(),
        )
    }

    /// `p†`: block `(j, i)` is the image of block `(i, j)` under `L ↦ {f† : f ∈ L}`.
    pub fn converse(&self) -> QuantumRelation {
        let (na, nb) = (self.source.n_factors(), self.target.n_factors());
        let mut blocks = vec![Projection::zero(0); na * nb];
        for i in 0..na {
            for j in 0..nb {
                let k = commutation(self.source.dim(i), self.target.dim(j));
                let m = &k * self.block(i, j).matrix().map(|z| z.conj()) * k.transpose();
                blocks[j * na + i] = Projection::from_exact(m);
            }
        }
        QuantumRelation { source: self.target.clone(), target: self.source.clone(), blocks }
    }

    /// `self ≤ other` blockwise.
    pub fn leq(&self, other: &QuantumRelation, tol: f64) -> Result<bool> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::SystemMismatch("relations between different systems".into()));
        }
        Ok(self.blocks.iter().zip(&other.blocks).all(|(p, q)| p.leq(q, tol)))
    }

    /// Weighted marginal `Tᵢ = Σ_j sqrt(w_j/wᵢ)·Tr_K(P_{ij})` on each source factor.
    pub fn marginals(&self) -> Vec<ComplexMatrix> {
        (0..self.source.n_factors())
            .map(|i| {
                let d = self.source.dim(i);
                let mut t = zeros(d, d);
                for j in 0..self.target.n_factors() {
                    let e = self.target.dim(j);
                    let tr = partial_trace(self.block(i, j).matrix(), &[e, d], &[1], None).expect("block shape");
                    t += tr * c(choi_scale(&self.source, &self.target, i, j));
                }
                t
            })
            .collect()
    }

    /// Whether every weighted marginal is invertible.
    pub fn channel_exists(&self, tol: Tol) -> bool {
        self.marginals().iter().all(|t| min_eigenvalue(t) > tol.proj)
    }

    /// Channel obtained by conjugating the projections with `(I ⊗ Tᵢ^{-1/2})`.
    ///
    /// The output always satisfies the channel condition. Its support equals
    /// the relation only when each block range is stable under right
    /// multiplication by `Tᵢ^{-1/2}` (always the case for commutative sources);
    /// otherwise [`Error::RoundTripFailure`] is returned.
    pub fn channel_from_relation(&self, tol: Tol) -> Result<CpMorphism> {
        let f = self.marginal_conjugate(tol)?;
        let back = support_of(&f, tol.spec)?;
        let defect = back.dist(self);
        if defect > tol.proj.max(1e-7) {
            return Err(Error::RoundTripFailure { defect });
        }
        Ok(f)
    }

    /// The conjugated CP morphism without the support check.
    pub fn marginal_conjugate(&self, tol: Tol) -> Result<CpMorphism> {
        let marg = self.marginals();
        let (na, nb) = (self.source.n_factors(), self.target.n_factors());
        let mut blocks = Vec::with_capacity(na * nb);
        for (i, t) in marg.iter().enumerate() {
            if min_eigenvalue(t) <= tol.proj {
                return Err(Error::NoChannel { factor: i });
            }
            let a = inv_sqrt(t);
            for j in 0..nb {
                let lift = kron(&eye(self.target.dim(j)), &a);
                blocks.push(&lift * self.block(i, j).matrix() * &lift);
            }
        }
        Ok(CpMorphism::from_blocks_unchecked(self.source.clone(), self.target.clone(), blocks))
    }

    /// Canonical CP morphism of the relation with Kraus maps `sqrt(e_j·wᵢ/w_j)·N` for an
    /// orthonormal basis `N` of each physical block.
    pub fn canonical_cp(&self) -> CpMorphism {
        let (na, nb) = (self.source.n_factors(), self.target.n_factors());
        let mut blocks = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                let s = self.target.dim(j) as f64 * (self.source.weight(i) / self.target.weight(j)).sqrt();
                blocks.push(self.block(i, j).matrix() * c(s));
            }
        }
        CpMorphism::from_blocks_unchecked(self.source.clone(), self.target.clone(), blocks)
    }

    /// Kraus family of [`QuantumRelation::canonical_cp`] built from the block bases.
    pub fn canonical_kraus(&self) -> KrausFamily {
        let (na, nb) = (self.source.n_factors(), self.target.n_factors());
        let mut k = KrausFamily::new(na, nb);
        for i in 0..na {
            for j in 0..nb {
                let s = (self.target.dim(j) as f64 * self.source.weight(i) / self.target.weight(j)).sqrt();
                for n in self.physical_basis(i, j) {
                    k.push(i, j, n * c(s));
                }
            }
        }
        k
    }

    /// Evaluates the three characterizations of partial functions and of functions.
    pub fn partial_function_flags(&self, tol: Tol) -> Result<PartialFunctionFlags> {
        let src = &self.source;
        let tgt = &self.target;
        // coinjectivity p∘p† ≤ Δ_B and cosurjectivity Δ_A ≤ p†∘p
        let coinjective = compose(self, &self.converse(), tol)?.leq(&QuantumRelation::discrete(tgt), tol.proj)?;
        let cosurjective = QuantumRelation::discrete(src).leq(&compose(&self.converse(), self, tol)?, tol.proj)?;

        // Ξᵢ = [sqrt(e_j)·B_{ijk}] with B an orthonormal basis of the stored block
        let mut isometry = true;
        let mut coisometry = true;
        let mut isometry_defect = 0.0f64;
        let mut coisometry_defect = 0.0f64;
        for i in 0..src.n_factors() {
            let d = src.dim(i);
            let mut cols: Vec<ComplexMatrix> = Vec::new();
            for j in 0..tgt.n_factors() {
                let s = (tgt.dim(j) as f64).sqrt();
                for b in self.stored_basis(i, j) {
                    cols.push(b * c(s));
                }
            }
            let width: usize = cols.iter().map(|m| m.ncols()).sum();
            let mut xi = zeros(d, width);
            let mut at = 0;
            for m in &cols {
                xi.view_mut((0, at), (d, m.ncols())).copy_from(m);
                at += m.ncols();
            }
            let iso = fdist(&(xi.adjoint() * &xi), &eye(width));
            let coiso = fdist(&(&xi * xi.adjoint()), &eye(d));
            isometry_defect = isometry_defect.max(iso);
            coisometry_defect = coisometry_defect.max(coiso);
            isometry &= iso < tol.proj.max(1e-7);
            coisometry &= coiso < tol.proj.max(1e-7);
        }

        let report = self.canonical_cp().dagger().homomorphism_report(tol.proj.max(1e-7));
        let cohom_partial = report.multiplicative && report.star;
        let cohom_full = cohom_partial && report.unital;

        let flags = PartialFunctionFlags {
            coinjective,
            isometry,
            cohomomorphism: cohom_partial,
            cosurjective,
            coisometry,
            counital: cohom_full,
            isometry_defect,
            coisometry_defect,
        };
        if !(coinjective == isometry && isometry == cohom_partial) {
            return Err(Error::CharacterizationMismatch(format!("partial function tests disagree: {:?}", flags)));
        }
        if coinjective && !(cosurjective == coisometry && coisometry == cohom_full) {
            return Err(Error::CharacterizationMismatch(format!("function tests disagree: {:?}", flags)));
        }
        Ok(flags)
    }
}

impl Projection {
    /// Wraps a matrix known to be a projection by construction.
    pub(crate) fn from_exact(m: ComplexMatrix) -> Projection {
        Projection::new(m, 1e-6).expect("projection by construction")
    }
}

/// All three characterizations of partial functions and functions, with defects as witnesses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialFunctionFlags {
    /// `p∘p† ≤ Δ`.
    pub coinjective: bool,
    /// Each `Ξᵢ` is an isometry.
    pub isometry: bool,
    /// The canonical CP morphism is a possibly non-counital *-cohomomorphism.
    pub cohomomorphism: bool,
    /// `Δ ≤ p†∘p`.
    pub cosurjective: bool,
    /// Each `Ξᵢ` is also a coisometry.
    pub coisometry: bool,
    /// The canonical CP morphism is a counital *-cohomomorphism.
    pub counital: bool,
    pub isometry_defect: f64,
    pub coisometry_defect: f64,
}

impl PartialFunctionFlags {
    pub fn is_partial_function(&self) -> bool {
        self.coinjective
    }

    pub fn is_function(&self) -> bool {
        self.coinjective && self.cosurjective
    }
}

fn block_pairs(a: &System, b: &System) -> impl Iterator<Item = (usize, usize)> {
    let nb = b.n_factors();
    (0..a.n_factors()).flat_map(move |i| (0..nb).map(move |j| (i, j)))
}

/// Blockwise support of the Choi data, with one cutoff `tol·(largest eigenvalue)` for all blocks.
pub fn support_of(f: &CpMorphism, tol: f64) -> Result<QuantumRelation> {
    let scale = f.spectral_scale();
    let blocks: Vec<Result<Projection>> =
        crate::par::map(f.choi_blocks(), |b| support_projection_scaled(b, tol, scale));
    QuantumRelation::new(f.source().clone(), f.target().clone(), blocks.into_iter().collect::<Result<_>>()?)
}

/// `q ∘ p`: block `(i, k)` spans the products `a·b` of basis operators of `p_{ij}` and `q_{jk}`.
pub fn compose(q: &QuantumRelation, p: &QuantumRelation, tol: Tol) -> Result<QuantumRelation> {
    if p.target != q.source {
        return Err(Error::SystemMismatch("target of the first relation is not the source of the second".into()));
    }
    let (na, nb, nc) = (p.source.n_factors(), p.target.n_factors(), q.target.n_factors());
    let pb: Vec<Vec<ComplexMatrix>> = block_pairs(&p.source, &p.target).map(|(i, j)| p.stored_basis(i, j)).collect();
    let qb: Vec<Vec<ComplexMatrix>> = block_pairs(&q.source, &q.target).map(|(j, k)| q.stored_basis(j, k)).collect();
    let pairs: Vec<(usize, usize)> = (0..na).flat_map(|i| (0..nc).map(move |k| (i, k))).collect();
    let blocks = crate::par::map(&pairs, |&(i, k)| -> Result<Projection> {
        let n = p.source.dim(i) * q.target.dim(k);
        let mut vs: Vec<ComplexVector> = Vec::new();
        for j in 0..nb {
            for a in &pb[i * nb + j] {
                for b in &qb[j * nc + k] {
                    vs.push(vec(&(a * b)));
                }
            }
        }
        let basis = span_basis(&vs, n, tol.spec, 1.0)?;
        Ok(Projection::from_orthonormal_columns(n, &basis))
    });
    QuantumRelation::new(p.source.clone(), q.target.clone(), blocks.into_iter().collect::<Result<_>>()?)
}
