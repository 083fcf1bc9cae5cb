//! Quantum graphs, confusability graphs of channels, graph homomorphisms and
//! zero-error reversal.

use std::sync::Arc;

use crate::cpmaps::{compose as compose_cp, CpMorphism, KrausFamily};
use crate::error::{Error, Result};
use crate::groups::{is_covariant_cp, is_covariant_relation, AlgebraAction};
use crate::linalg::{c, eigh, eye, min_eigenvalue, psd_factor, zeros, ComplexMatrix, Tol};
use crate::relations::{compose, support_of, QuantumRelation};
use crate::systems::{Element, QuantumSet, System};

/// A symmetric covariant relation on one system.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumGraph {
    relation: QuantumRelation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphClass {
    pub is_confusability: bool,
    pub is_simple: bool,
}

impl QuantumGraph {
    /// Checks that the relation is an endo-relation, symmetric and covariant.
    pub fn new(relation: QuantumRelation, tol: Tol) -> Result<Self> {
        if relation.source() != relation.target() {
            return Err(Error::SystemMismatch("a graph needs source = target".into()));
        }
        let defect = relation.converse().dist(&relation);
        if defect > tol.proj {
            return Err(Error::NotSymmetric { defect });
        }
        if !is_covariant_relation(&relation, tol.proj)? {
            return Err(Error::NotCovariant("graph relation is not invariant under the group".into()));
        }
        Ok(QuantumGraph { relation })
    }

    pub fn discrete(sys: &System) -> Self {
        QuantumGraph { relation: QuantumRelation::discrete(sys) }
    }

    pub fn complete(sys: &System) -> Self {
        QuantumGraph { relation: QuantumRelation::complete(sys.clone(), sys.clone()) }
    }

    pub fn zero(sys: &System) -> Self {
        QuantumGraph { relation: QuantumRelation::zero(sys.clone(), sys.clone()) }
    }

    pub fn system(&self) -> &System {
        self.relation.source()
    }

    pub fn relation(&self) -> &QuantumRelation {
        &self.relation
    }

    pub fn into_relation(self) -> QuantumRelation {
        self.relation
    }

    pub fn dist(&self, other: &QuantumGraph) -> f64 {
        self.relation.dist(&other.relation)
    }

    /// Confusability iff `Δ ≤ Γ`; simple iff `Δ̃·Γ̃ = 0` blockwise.
    pub fn classify(&self, tol: Tol) -> GraphClass {
        let delta = QuantumRelation::discrete(self.system());
        let is_confusability = delta.leq(&self.relation, tol.proj).expect("same system");
        let n = self.system().n_factors();
        let is_simple = (0..n).all(|i| {
            let d = delta.block(i, i).matrix();
            crate::linalg::fnorm(&(d * self.relation.block(i, i).matrix())) < tol.proj
        });
        GraphClass { is_confusability, is_simple }
    }

    /// Blockwise `1 − Γ̃`.
    pub fn complement(&self) -> QuantumGraph {
        let blocks = self.relation.blocks().iter().map(|p| p.complement()).collect();
        let sys = self.system().clone();
        QuantumGraph { relation: QuantumRelation::new(sys.clone(), sys, blocks).expect("same shapes") }
    }
}

/// `ℜ(f)† ∘ ℜ(f)`.
pub fn confusability_of(f: &CpMorphism, tol: Tol) -> Result<QuantumGraph> {
    if f.source().action().group() != f.target().action().group() {
        return Err(Error::GroupMismatch);
    }
    let r = support_of(f, tol.spec)?;
    let rel = compose(&r.converse(), &r, tol)?;
    Ok(QuantumGraph { relation: rel })
}

/// Output of [`realize_channel`].
#[derive(Debug, Clone)]
pub struct Realization {
    pub channel: CpMorphism,
    pub environment: System,
    pub tau: f64,
    /// Distance between the recomputed confusability graph and the input.
    pub round_trip_defect: f64,
}

/// Matrix `X_Q` of `Ψ_Q(Y) = Σ X_Q[l, l'] E_l† Y E_{l'}` over the matrix units `E_l`,
/// chosen so that `Ψ_Q` acts on the `(r, c)` corner as `Γ̃_{rc} − δ_{rc}·Δ̃_r`.
fn graph_kernel_matrix(g: &QuantumGraph) -> ComplexMatrix {
    let sys = g.system();
    let dims = sys.dims();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &d| {
        let o = *acc;
        *acc += d * d;
        Some(o)
    }).collect();
    let total: usize = dims.iter().map(|d| d * d).sum();
    let delta = QuantumRelation::discrete(sys);
    let mut x = zeros(total, total);
    for r in 0..dims.len() {
        for cc in 0..dims.len() {
            let (dr, dc) = (dims[r], dims[cc]);
            // physical block c → r equals the stored block (r, c) by symmetry
            let mut q = g.relation().block(r, cc).matrix().clone();
            if r == cc {
                q -= delta.block(r, r).matrix();
            }
            for a in 0..dr {
                for b in 0..dr {
                    for a2 in 0..dc {
                        for b2 in 0..dc {
                            let row = offsets[r] + a * dr + b;
                            let col = offsets[cc] + a2 * dc + b2;
                            x[(row, col)] = q[(b + dr * b2, a + dr * a2)];
                        }
                    }
                }
            }
        }
    }
    x
}

/// Builds a channel whose confusability graph is `g`.
///
/// The CP map `Ψ = Ψ_I + τ·Ψ_Q` has positive Choi matrix `X = I + τ·X_Q`;
/// factoring `X = R†R` gives operators `T_k = Σ_l R_{kl} E_l` and Kraus maps
/// into `B(ℂ^r)` with `r = rank X`. When `tau` is `None` the largest
/// `τ ≤ 0.5` with margin `0.9` to the PSD boundary is used.
pub fn realize_channel(g: &QuantumGraph, tau: Option<f64>, tol: Tol) -> Result<Realization> {
    if !g.classify(tol).is_confusability {
        return Err(Error::NotConfusability);
    }
    let xq = graph_kernel_matrix(g);
    let lam = min_eigenvalue(&xq);
    let tau = match tau {
        Some(t) if !(t > 0.0 && t <= 1.0) => return Err(Error::InvalidInput(format!("tau must lie in (0, 1], got {}", t))),
        Some(t) => t,
        None if lam >= 0.0 => 0.5,
        None => 0.5f64.min(0.9 / -lam),
    };
    let n = xq.nrows();
    let x = eye(n) + &xq * c(tau);
    let lo = min_eigenvalue(&x);
    if lo < -tol.spec {
        return Err(Error::PsdViolation { min_eigenvalue: lo });
    }
    let rmat = psd_factor(&x, tol.spec)?;
    let r = rmat.nrows();
    let sys = g.system();
    let dims = sys.dims();

    let mut ts: Vec<Element> = Vec::with_capacity(r);
    for k in 0..r {
        let mut blocks = Vec::with_capacity(dims.len());
        let mut l = 0;
        for &d in dims {
            let mut t = zeros(d, d);
            for a in 0..d {
                for b in 0..d {
                    t[(a, b)] = rmat[(k, l)];
                    l += 1;
                }
            }
            blocks.push(t);
        }
        ts.push(Element { blocks });
    }

    let env_action = environment_action(sys, &ts, tol)?;
    let env = System::separable_standard(QuantumSet::new(vec![r])?, env_action)?;

    let mut kraus = KrausFamily::new(dims.len(), 1);
    for (i, &d) in dims.iter().enumerate() {
        // Σ_k T_k†T_k = dᵢ·I, rescaled to the factor weight
        let s = (sys.weight(i) / (d as f64 * r as f64)).sqrt();
        for a in 0..d {
            let mut gm = zeros(r, d);
            for (k, t) in ts.iter().enumerate() {
                for xx in 0..d {
                    gm[(k, xx)] = t.blocks[i][(a, xx)] * c(s);
                }
            }
            kraus.push(i, 0, gm);
        }
    }
    let channel = CpMorphism::from_kraus(&kraus, sys.clone(), env.clone())?;
    if !channel.is_channel(tol.proj.max(1e-7)) {
        return Err(Error::NotAChannel(format!("realized map has channel defect {:e}", channel.channel_defect())));
    }
    if !sys.action().is_trivial() && !is_covariant_cp(&channel, 1e-7)? {
        return Err(Error::NotCovariant("realized channel is not covariant".into()));
    }
    let round_trip_defect = confusability_of(&channel, tol)?.dist(g);
    Ok(Realization { channel, environment: env, tau, round_trip_defect })
}

/// Action on `B(ℂ^r)` by `W_g = V_{g⁻¹}ᵀ`, where `α_h(T_k) = Σ_m V_h[m, k]·T_m`.
fn environment_action(sys: &System, ts: &[Element], tol: Tol) -> Result<AlgebraAction> {
    let r = ts.len();
    let group: Arc<_> = sys.action().group().clone();
    if group.is_trivial() {
        return Ok(AlgebraAction::trivial(group, &[r]));
    }
    let hs = |a: &Element, b: &Element| {
        a.blocks.iter().zip(&b.blocks).map(|(x, y)| (x.adjoint() * y).trace()).sum::<num_complex::Complex64>()
    };
    let norms: Vec<f64> = ts.iter().map(|t| hs(t, t).re).collect();
    let mut vs = Vec::with_capacity(group.order());
    for h in 0..group.order() {
        let mut v = zeros(r, r);
        for k in 0..r {
            let moved = sys.action().act(h, &ts[k])?;
            let mut rebuilt = sys.zero();
            for m in 0..r {
                v[(m, k)] = hs(&ts[m], &moved) / c(norms[m]);
                rebuilt = rebuilt.add(&ts[m].scale(v[(m, k)]));
            }
            if rebuilt.dist(&moved) > 1e-7 * moved.norm().max(1.0) {
                return Err(Error::NotCovariant("dilation span is not invariant under the group".into()));
            }
        }
        vs.push(v);
    }
    let unitaries = (0..group.order()).map(|g| vec![vs[group.inv(g)].transpose()]).collect();
    let perms = vec![vec![0]; group.order()];
    AlgebraAction::new(group, &[r], perms, unitaries, tol.proj.max(1e-7))
}

fn check_graph_systems(f: &CpMorphism, ga: &QuantumGraph, gb: &QuantumGraph) -> Result<()> {
    if f.source() != ga.system() || f.target() != gb.system() {
        return Err(Error::SystemMismatch("channel does not map the first graph's system to the second's".into()));
    }
    Ok(())
}

/// `ℜ(f)† ∘ Γ_B ∘ ℜ(f) ≤ Γ_A`.
pub fn is_homomorphism(f: &CpMorphism, ga: &QuantumGraph, gb: &QuantumGraph, tol: Tol) -> Result<bool> {
    check_graph_systems(f, ga, gb)?;
    let r = support_of(f, tol.spec)?;
    let pull = compose(&r.converse(), &compose(gb.relation(), &r, tol)?, tol)?;
    pull.leq(ga.relation(), tol.proj)
}

/// Blocks `(i, j)` where `ℜ(f)† ∘ Γ_B ∘ ℜ(f)` is not below `Γ_A`, with the
/// defect `‖Γ_A·P − P‖` of each. Empty exactly when [`is_homomorphism`] holds.
pub fn homomorphism_violations(
    f: &CpMorphism,
    ga: &QuantumGraph,
    gb: &QuantumGraph,
    tol: Tol,
) -> Result<Vec<(usize, usize, f64)>> {
    check_graph_systems(f, ga, gb)?;
    let r = support_of(f, tol.spec)?;
    let pull = compose(&r.converse(), &compose(gb.relation(), &r, tol)?, tol)?;
    let n = ga.system().n_factors();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let p = pull.block(i, j).matrix();
            let defect = crate::linalg::fdist(&(ga.relation().block(i, j).matrix() * p), p);
            if defect >= tol.proj {
                out.push((i, j, defect));
            }
        }
    }
    Ok(out)
}

/// `ℜ(f) ∘ Γ_A ∘ ℜ(f)† ≤ Γ_B`.
pub fn is_simple_homomorphism(f: &CpMorphism, ga: &QuantumGraph, gb: &QuantumGraph, tol: Tol) -> Result<bool> {
    check_graph_systems(f, ga, gb)?;
    let r = support_of(f, tol.spec)?;
    let push = compose(&r, &compose(ga.relation(), &r.converse(), tol)?, tol)?;
    push.leq(gb.relation(), tol.proj)
}

/// Whether the confusability graph of the channel is discrete.
pub fn is_reversible(f: &CpMorphism, tol: Tol) -> Result<bool> {
    if !f.is_channel(tol.proj.max(1e-7)) {
        return Err(Error::NotAChannel(format!("channel defect {:e}", f.channel_defect())));
    }
    let g = confusability_of(f, tol)?;
    Ok(g.dist(&QuantumGraph::discrete(f.source())) < tol.proj.max(1e-7))
}

/// A left inverse of a reversible channel.
///
/// With an orthonormal basis `N_{ijm}` of each physical support block
/// `Hᵢ → K_j`, the decoder has Kraus maps `sqrt(w_j/wᵢ)·sqrt(dᵢ)·N_{ijm}†` plus,
/// for every unit vector `ψ` in the range of `1 − α_j` (`α_j = Σ dᵢ·N N†`),
/// the maps `sqrt(w_j/Σ wᵢdᵢ)·|a⟩⟨ψ|` into every basis vector `a` of every `Hᵢ`.
pub fn reverse_channel(f: &CpMorphism, tol: Tol) -> Result<CpMorphism> {
    if !is_reversible(f, tol)? {
        return Err(Error::NotReversible);
    }
    let (src, tgt) = (f.source(), f.target());
    let supp = support_of(f, tol.spec)?;
    let (na, nb) = (src.n_factors(), tgt.n_factors());
    let mut kraus = KrausFamily::new(nb, na);
    let total: f64 = (0..na).map(|i| src.weight(i) * src.dim(i) as f64).sum();
    for j in 0..nb {
        let e = tgt.dim(j);
        let mut alpha = zeros(e, e);
        for i in 0..na {
            let d = src.dim(i);
            let s = (tgt.weight(j) / src.weight(i) * d as f64).sqrt();
            for nm in supp.physical_basis(i, j) {
                alpha += &nm * nm.adjoint() * c(d as f64);
                kraus.push(j, i, nm.adjoint() * c(s));
            }
        }
        let rest = eigh(&(eye(e) - &alpha));
        let cs = (tgt.weight(j) / total).sqrt();
        for (t, &lam) in rest.values.iter().enumerate() {
            if lam < 0.5 {
                break;
            }
            let psi = rest.vectors.column(t).into_owned();
            for i in 0..na {
                let d = src.dim(i);
                for a in 0..d {
                    let mut m = zeros(d, e);
                    for y in 0..e {
                        m[(a, y)] = psi[y].conj() * c(cs);
                    }
                    kraus.push(j, i, m);
                }
            }
        }
    }
    let g = CpMorphism::from_kraus(&kraus, tgt.clone(), src.clone())?;
    let loop_defect = compose_cp(&g, f, tol)?.dist(&CpMorphism::identity(src));
    if loop_defect > 1e-7 {
        return Err(Error::TheoremViolation(format!("decoder misses the identity by {:e}", loop_defect)));
    }
    let composite = support_of(&compose_cp(&g, f, tol)?, tol.spec)?;
    if composite.dist(&QuantumRelation::discrete(src)) > 1e-7 {
        return Err(Error::TheoremViolation("support of the decoded channel is not discrete".into()));
    }
    Ok(g)
}
