//! Zero-error source-channel coding with side information.
//!
//! A source is a reversible channel `C: S → O_A ⊠ O_B`; Alice sees `O_A`, Bob
//! sees `O_B`, and a scheme `(E, N, D)` must satisfy
//! `D ∘ ((N∘E) ⊠ id_{O_B}) ∘ C = id_S`.

use std::sync::Arc;

use crate::cpmaps::{compose as compose_cp, CpMorphism, KrausFamily};
use crate::error::{Error, Result};
use crate::graphs::{confusability_of, is_homomorphism, is_reversible, reverse_channel, QuantumGraph};
use crate::groups::{is_covariant_cp, AlgebraAction};
use crate::linalg::{
    c, commutation, eye, kron, partial_trace, spectral_radius, support_projection_scaled, zeros, ComplexMatrix,
    Projection, Tol, TOL_SPEC,
};
use crate::relations::QuantumRelation;
use crate::systems::{Element, QuantumSet, System};

/// `A ⊠ B` with factor `(a, b)` at index `a·n_B + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSystem {
    left: System,
    right: System,
    product: System,
}

impl TensorSystem {
    pub fn left(&self) -> &System {
        &self.left
    }

    pub fn right(&self) -> &System {
        &self.right
    }

    pub fn product(&self) -> &System {
        &self.product
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.right.n_factors() + b
    }

    pub fn pair(&self, idx: usize) -> (usize, usize) {
        let nb = self.right.n_factors();
        (idx / nb, idx % nb)
    }

    /// `Tr_B(x)_a = Σ_b w_b·Tr_{K_b}(x_{ab})`.
    pub fn trace_right(&self, x: &Element) -> Result<Element> {
        self.product.check(x)?;
        let mut out = self.left.zero();
        for (idx, blk) in x.blocks.iter().enumerate() {
            let (a, b) = self.pair(idx);
            let w = self.right.weight(b);
            out.blocks[a] += partial_trace(blk, &[self.left.dim(a), self.right.dim(b)], &[0], Some(&[w]))?;
        }
        Ok(out)
    }

    /// `Tr_A(x)_b = Σ_a w_a·Tr_{H_a}(x_{ab})`.
    pub fn trace_left(&self, x: &Element) -> Result<Element> {
        self.product.check(x)?;
        let mut out = self.right.zero();
        for (idx, blk) in x.blocks.iter().enumerate() {
            let (a, b) = self.pair(idx);
            let w = self.left.weight(a);
            out.blocks[b] += partial_trace(blk, &[self.left.dim(a), self.right.dim(b)], &[1], Some(&[w]))?;
        }
        Ok(out)
    }

    /// `x ⊗ y` as an element of the product.
    pub fn tensor_element(&self, x: &Element, y: &Element) -> Result<Element> {
        self.left.check(x)?;
        self.right.check(y)?;
        let blocks = (0..self.product.n_factors())
            .map(|idx| {
                let (a, b) = self.pair(idx);
                kron(&x.blocks[a], &y.blocks[b])
            })
            .collect();
        Ok(Element { blocks })
    }
}

/// Product system with the diagonal group action and multiplied weights.
pub fn tensor_system(a: &System, b: &System) -> Result<TensorSystem> {
    let group = a.group().clone();
    if &group != b.group() {
        return Err(Error::GroupMismatch);
    }
    let (na, nb) = (a.n_factors(), b.n_factors());
    let mut dims = Vec::with_capacity(na * nb);
    let mut weights = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            dims.push(a.dim(i) * b.dim(j));
            weights.push(a.weight(i) * b.weight(j));
        }
    }
    let action = if group.is_trivial() {
        AlgebraAction::trivial(group, &dims)
    } else {
        let (aa, ba) = (a.action(), b.action());
        let perms = (0..group.order())
            .map(|g| (0..na * nb).map(|idx| aa.perm(g)[idx / nb] * nb + ba.perm(g)[idx % nb]).collect())
            .collect();
        let unitaries = (0..group.order())
            .map(|g| (0..na * nb).map(|idx| kron(aa.unitary(g, idx / nb), ba.unitary(g, idx % nb))).collect())
            .collect();
        AlgebraAction::new(group, &dims, perms, unitaries, 1e-8)?
    };
    let product = System::with_weights(QuantumSet::new(dims)?, action, weights)?;
    Ok(TensorSystem { left: a.clone(), right: b.clone(), product })
}

/// `f ⊠ g` with Kraus maps `M ⊗ N`.
pub fn tensor_cp(f: &CpMorphism, g: &CpMorphism) -> Result<CpMorphism> {
    let src = tensor_system(f.source(), g.source())?;
    let tgt = tensor_system(f.target(), g.target())?;
    let kf = f.to_kraus(TOL_SPEC)?;
    let kg = g.to_kraus(TOL_SPEC)?;
    let mut k = KrausFamily::new(src.product.n_factors(), tgt.product.n_factors());
    for i in 0..f.source().n_factors() {
        for i2 in 0..g.source().n_factors() {
            for j in 0..f.target().n_factors() {
                for j2 in 0..g.target().n_factors() {
                    for m in kf.get(i, j) {
                        for n in kg.get(i2, j2) {
                            k.push(src.index(i, i2), tgt.index(j, j2), kron(m, n));
                        }
                    }
                }
            }
        }
    }
    CpMorphism::from_kraus(&k, src.product, tgt.product)
}

/// A reversible channel `S → O_A ⊠ O_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    s: System,
    oa: System,
    ob: System,
    joint: TensorSystem,
    channel: CpMorphism,
}

impl Source {
    pub fn new(s: System, oa: System, ob: System, channel: CpMorphism, tol: Tol) -> Result<Self> {
        let joint = tensor_system(&oa, &ob)?;
        if channel.source() != &s || channel.target() != joint.product() {
            return Err(Error::SourceInvalid("channel must map S into O_A ⊠ O_B".into()));
        }
        if !channel.is_channel(tol.proj.max(1e-7)) {
            return Err(Error::SourceInvalid(format!("channel defect {:e}", channel.channel_defect())));
        }
        if !is_reversible(&channel, tol)? {
            return Err(Error::SourceInvalid("source channel is not reversible".into()));
        }
        Ok(Source { s, oa, ob, joint, channel })
    }

    pub fn s_system(&self) -> &System {
        &self.s
    }

    pub fn oa_system(&self) -> &System {
        &self.oa
    }

    pub fn ob_system(&self) -> &System {
        &self.ob
    }

    pub fn joint(&self) -> &TensorSystem {
        &self.joint
    }

    pub fn channel(&self) -> &CpMorphism {
        &self.channel
    }
}

/// Confusability graph of the source on `O_A`.
///
/// For each pair of Alice's factors `a, a'` the positive map
/// `f̃ = Σ Λ†Λ` is accumulated over Bob's factors and Kraus pairs, where
/// `Λ(q) = Π(β'†(q ⊗ 1)β)` and `Π` removes the discrete-graph part on `S`.
/// The physical block `a → a'` of the graph is `ker f̃`. Traced legs carry unit
/// weights; positive weights would not change the kernel.
pub fn source_confusability_graph(src: &Source, tol: Tol) -> Result<QuantumGraph> {
    let kraus = src.channel.to_kraus(tol.spec)?;
    let (oa, ob, s) = (&src.oa, &src.ob, &src.s);
    let na = oa.n_factors();
    let pairs: Vec<(usize, usize)> = (0..na).flat_map(|a| (0..na).map(move |a2| (a, a2))).collect();
    let ftilde = crate::par::map(&pairs, |&(a, a2)| {
        let (da, da2) = (oa.dim(a), oa.dim(a2));
        let n = da2 * da;
        let mut acc = zeros(n, n);
        for b in 0..ob.n_factors() {
            let e = ob.dim(b);
            for s1 in 0..s.n_factors() {
                for s2 in 0..s.n_factors() {
                    let (z1, z2) = (s.dim(s1), s.dim(s2));
                    for beta in kraus.get(s1, src.joint.index(a, b)) {
                        for beta2 in kraus.get(s2, src.joint.index(a2, b)) {
                            let mut lam = zeros(z2 * z1, n);
                            for r in 0..da2 {
                                let b2r = beta2.rows(r * e, e);
                                for cc in 0..da {
                                    let mut x = b2r.adjoint() * beta.rows(cc * e, e);
                                    if s1 == s2 {
                                        let t = x.trace() / c(z1 as f64);
                                        x -= eye(z1) * t;
                                    }
                                    let col = r + da2 * cc;
                                    for (idx, v) in x.iter().enumerate() {
                                        lam[(idx, col)] = *v;
                                    }
                                }
                            }
                            acc += lam.adjoint() * &lam;
                        }
                    }
                }
            }
        }
        acc
    });
    let scale = ftilde.iter().map(spectral_radius).fold(0.0, f64::max);
    let mut blocks = vec![Projection::zero(0); na * na];
    for (&(a, a2), f) in pairs.iter().zip(&ftilde) {
        let ker = support_projection_scaled(f, tol.spec, scale)?.complement();
        let k = commutation(oa.dim(a2), oa.dim(a));
        let stored = &k * ker.matrix().map(|z| z.conj()) * k.transpose();
        blocks[a * na + a2] = Projection::new(stored, 1e-6)?;
    }
    let rel = QuantumRelation::new(oa.clone(), oa.clone(), blocks)?;
    let g = QuantumGraph::new(rel, tol)?;
    if !g.classify(tol).is_confusability {
        return Err(Error::TheoremViolation("source graph does not contain the discrete graph".into()));
    }
    Ok(g)
}

/// `((N∘E) ⊠ id_{O_B}) ∘ C`.
pub fn composite(e: &CpMorphism, src: &Source, n: &CpMorphism, tol: Tol) -> Result<CpMorphism> {
    if e.source() != &src.oa || e.target() != n.source() {
        return Err(Error::SystemMismatch("encoder must map O_A into the channel input".into()));
    }
    let ne = compose_cp(n, e, tol)?;
    let lifted = tensor_cp(&ne, &CpMorphism::identity(&src.ob))?;
    compose_cp(&lifted, &src.channel, tol)
}

/// Whether `E` gives a zero-error scheme over `N`.
///
/// Reversibility of the composite is the ground truth; the graph homomorphism
/// test must agree, otherwise [`Error::TheoremViolation`] is returned.
pub fn encoding_is_valid(e: &CpMorphism, src: &Source, n: &CpMorphism, tol: Tol) -> Result<bool> {
    let (hom, rev) = crate::par::join(
        || -> Result<bool> {
            let gc = source_confusability_graph(src, tol)?;
            is_homomorphism(e, &gc, &confusability_of(n, tol)?, tol)
        },
        || -> Result<bool> { is_reversible(&composite(e, src, n, tol)?, tol) },
    );
    let (hom, rev) = (hom?, rev?);
    if hom != rev {
        return Err(Error::TheoremViolation(format!(
            "homomorphism test says {}, reversibility test says {}",
            hom, rev
        )));
    }
    Ok(rev)
}

/// Decoder `B ⊠ O_B → S` for a valid encoding.
pub fn decoder_for(e: &CpMorphism, src: &Source, n: &CpMorphism, tol: Tol) -> Result<CpMorphism> {
    if !encoding_is_valid(e, src, n, tol)? {
        return Err(Error::NotValid);
    }
    reverse_channel(&composite(e, src, n, tol)?, tol)
}

/// Whether the full pipeline equals the identity on `S` within `tol.proj` (floored at `1e-7`).
pub fn verify_scheme(src: &Source, n: &CpMorphism, e: &CpMorphism, d: &CpMorphism, tol: Tol) -> Result<bool> {
    let k = composite(e, src, n, tol)?;
    if d.source() != k.target() || d.target() != &src.s {
        return Err(Error::SystemMismatch("decoder must map B ⊠ O_B to S".into()));
    }
    let pipeline = compose_cp(d, &k, tol)?;
    Ok(pipeline.dist(&CpMorphism::identity(&src.s)) < tol.proj.max(1e-7))
}

/// Block-permutation unitary on `⊕_a H_a` implementing `α_g` on the defining space.
fn defining_unitary(sys: &System, g: usize) -> ComplexMatrix {
    let offsets = offsets(sys);
    let n: usize = sys.dims().iter().sum();
    let mut p = zeros(n, n);
    for a in 0..sys.n_factors() {
        let t = sys.action().perm(g)[a];
        let d = sys.dim(a);
        p.view_mut((offsets[t], offsets[a]), (d, d)).copy_from(sys.action().unitary(g, a));
    }
    p
}

fn offsets(sys: &System) -> Vec<usize> {
    sys.dims()
        .iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect()
}

/// A source on `S = ℂ ⊕ ℂ` whose confusability graph is `g`.
///
/// With `Z = ⊕_a H_a` and Bob's space `Z ⊕ Z` (copies `φ` and `χ`), symbol 0
/// is sent to `β₀ = Σ_a Σ_i |i⟩_a ⊗ |φ_{a,i}⟩`, and symbol 1 to the Kraus maps
/// `Σ_i ξ|i⟩ ⊗ |φ_{a,i}⟩` for `ξ` in a basis of the complement graph, plus the
/// padding map `Σ_a Σ_i |i⟩_a ⊗ |χ_{a,i}⟩` that keeps the channel reversible.
/// Both symbols are normalized to unit weight. The result is rejected with
/// [`Error::RoundTripFailure`] unless its source graph reproduces `g`.
pub fn source_from_graph(g: &QuantumGraph, tol: Tol) -> Result<Source> {
    if !g.classify(tol).is_confusability {
        return Err(Error::NotConfusability);
    }
    let oa = g.system().clone();
    let group: Arc<_> = oa.group().clone();
    let na = oa.n_factors();
    let off = offsets(&oa);
    let n: usize = oa.dims().iter().sum();
    let nb = 2 * n;

    let unitaries = (0..group.order())
        .map(|h| {
            let p = defining_unitary(&oa, h).map(|z| z.conj());
            let mut w = zeros(nb, nb);
            w.view_mut((0, 0), (n, n)).copy_from(&p);
            w.view_mut((n, n), (n, n)).copy_from(&p);
            vec![w]
        })
        .collect();
    let ob_action = AlgebraAction::new(group.clone(), &[nb], vec![vec![0]; group.order()], unitaries, 1e-8)?;
    let ob = System::separable_standard(QuantumSet::new(vec![nb])?, ob_action)?;
    let s = System::separable_standard(QuantumSet::new(vec![1, 1])?, AlgebraAction::trivial(group, &[1, 1]))?;
    let joint = tensor_system(&oa, &ob)?;

    let mut kraus = KrausFamily::new(2, na);
    let comp = g.complement();
    for a in 0..na {
        let d = oa.dim(a);
        let mut v = zeros(d * nb, 1);
        let mut pad = zeros(d * nb, 1);
        for i in 0..d {
            v[(i * nb + off[a] + i, 0)] = c(1.0);
            pad[(i * nb + n + off[a] + i, 0)] = c(1.0);
        }
        kraus.push(0, a, v);
        for a0 in 0..na {
            for xi in comp.relation().physical_basis(a0, a) {
                let mut u = zeros(d * nb, 1);
                for x in 0..d {
                    for i in 0..oa.dim(a0) {
                        u[(x * nb + off[a0] + i, 0)] = xi[(x, i)];
                    }
                }
                kraus.push(1, a, u);
            }
        }
        kraus.push(1, a, pad);
    }
    for sym in 0..2 {
        let total: f64 = (0..na)
            .map(|a| joint.product().weight(a) * kraus.get(sym, a).iter().map(|m| m.norm_squared()).sum::<f64>())
            .sum();
        let sc = c(1.0 / total.sqrt());
        for a in 0..na {
            for m in kraus.get_mut(sym, a).iter_mut() {
                *m *= sc;
            }
        }
    }
    let channel = CpMorphism::from_kraus(&kraus, s.clone(), joint.product().clone())?;
    if !oa.action().is_trivial() && !is_covariant_cp(&channel, 1e-7)? {
        return Err(Error::NotCovariant("constructed source channel is not covariant".into()));
    }
    let src = Source::new(s, oa, ob, channel, tol)?;
    let defect = source_confusability_graph(&src, tol)?.dist(g);
    if defect > 1e-7 {
        return Err(Error::RoundTripFailure { defect });
    }
    Ok(src)
}
