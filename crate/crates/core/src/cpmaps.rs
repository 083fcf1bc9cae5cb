//! Completely positive morphisms between systems.
//!
//! A CP morphism `f: A → B` with Kraus maps `M_{ijk}: Hᵢ → K_j` is stored as
//! one PSD Choi block per factor pair, acting on `vec(Hom(K_j, Hᵢ))`:
//!
//! `C_{ij} = sqrt(w_j/wᵢ) · Σ_k |vec(M_{ijk}†)⟩⟨vec(M_{ijk}†)|`
//!
//! With this scaling the identity channel has block `|vec I⟩⟨vec I|`, a
//! classical stochastic matrix `p` has scalar blocks `p_{ji}`, and the Choi
//! blocks of `f†` are plain transposes of those of `f`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    c, check_hermitian, commutation, eigh, fdist, fnorm, partial_trace, unvec, vec, zeros, ComplexMatrix, Tol,
};
use crate::systems::{Element, System};

/// Kraus maps `Hᵢ → K_j` for every factor pair `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    n_src: usize,
    n_tgt: usize,
    ops: Vec<Vec<ComplexMatrix>>,
}

impl KrausFamily {
    pub fn new(n_src: usize, n_tgt: usize) -> Self {
        KrausFamily { n_src, n_tgt, ops: vec![Vec::new(); n_src * n_tgt] }
    }

    pub fn n_src(&self) -> usize {
        self.n_src
    }

    pub fn n_tgt(&self) -> usize {
        self.n_tgt
    }

    pub fn get(&self, i: usize, j: usize) -> &[ComplexMatrix] {
        &self.ops[i * self.n_tgt + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Vec<ComplexMatrix> {
        &mut self.ops[i * self.n_tgt + j]
    }

    pub fn push(&mut self, i: usize, j: usize, m: ComplexMatrix) {
        self.ops[i * self.n_tgt + j].push(m);
    }

    pub fn count(&self) -> usize {
        self.ops.iter().map(|v| v.len()).sum()
    }

    fn check(&self, src: &System, tgt: &System) -> Result<()> {
        if self.n_src != src.n_factors() || self.n_tgt != tgt.n_factors() {
            return Err(Error::ShapeMismatch(format!(
                "Kraus family indexed {}x{}, systems have {} and {} factors",
                self.n_src,
                self.n_tgt,
                src.n_factors(),
                tgt.n_factors()
            )));
        }
        for i in 0..self.n_src {
            for j in 0..self.n_tgt {
                for m in self.get(i, j) {
                    if m.nrows() != tgt.dim(j) || m.ncols() != src.dim(i) {
                        return Err(Error::ShapeMismatch(format!(
                            "Kraus map for ({}, {}) is {}x{}, expected {}x{}",
                            i,
                            j,
                            m.nrows(),
                            m.ncols(),
                            tgt.dim(j),
                            src.dim(i)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A CP morphism between systems, stored by its Choi blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct CpMorphism {
    source: System,
    target: System,
    blocks: Vec<ComplexMatrix>,
}

/// Choi scale `sqrt(w_j/wᵢ)` for the factor pair `(i, j)`.
pub fn choi_scale(src: &System, tgt: &System, i: usize, j: usize) -> f64 {
    (tgt.weight(j) / src.weight(i)).sqrt()
}

/// Outcome of the *-homomorphism conditions checked on matrix units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomomorphismReport {
    pub multiplicative: bool,
    pub unital: bool,
    pub star: bool,
}

impl HomomorphismReport {
    pub fn all(&self) -> bool {
        self.multiplicative && self.unital && self.star
    }
}

impl CpMorphism {
    /// Validates shapes and positivity of the blocks (ordered `i·n_target + j`).
    pub fn from_choi(source: System, target: System, blocks: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let (na, nb) = (source.n_factors(), target.n_factors());
        if blocks.len() != na * nb {
            return Err(Error::ShapeMismatch(format!("expected {} Choi blocks, got {}", na * nb, blocks.len())));
        }
        let scale = blocks.iter().map(fnorm).fold(0.0, f64::max);
        let mut clean = Vec::with_capacity(blocks.len());
        for i in 0..na {
            for j in 0..nb {
                let b = &blocks[i * nb + j];
                let n = source.dim(i) * target.dim(j);
                if b.nrows() != n || b.ncols() != n {
                    return Err(Error::ShapeMismatch(format!("Choi block ({}, {}) must be {}x{}", i, j, n, n)));
                }
                let h = check_hermitian(b, tol)?;
                let lo = eigh(&h).values.last().copied().unwrap_or(0.0);
                if lo < -tol * scale {
                    return Err(Error::NegativeSpectrum { eigenvalue: lo });
                }
                clean.push(h);
            }
        }
        Ok(CpMorphism { source, target, blocks: clean })
    }

    pub(crate) fn from_blocks_unchecked(source: System, target: System, blocks: Vec<ComplexMatrix>) -> Self {
        debug_assert_eq!(blocks.len(), source.n_factors() * target.n_factors());
        CpMorphism { source, target, blocks }
    }

    pub fn from_kraus(kraus: &KrausFamily, source: System, target: System) -> Result<Self> {
        kraus.check(&source, &target)?;
        let (na, nb) = (source.n_factors(), target.n_factors());
        let mut blocks = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                let n = source.dim(i) * target.dim(j);
                let mut b = zeros(n, n);
                for m in kraus.get(i, j) {
                    let v = vec(&m.adjoint());
                    b += &v * v.adjoint();
                }
                b *= c(choi_scale(&source, &target, i, j));
                blocks.push(b);
            }
        }
        Ok(CpMorphism { source, target, blocks })
    }

    pub fn zero(source: System, target: System) -> Self {
        let blocks = (0..source.n_factors())
            .flat_map(|i| (0..target.n_factors()).map(move |j| (i, j)))
            .map(|(i, j)| {
                let n = source.dim(i) * target.dim(j);
                zeros(n, n)
            })
            .collect();
        CpMorphism { source, target, blocks }
    }

    /// Identity channel: Kraus `{I}` on every diagonal factor pair.
    pub fn identity(sys: &System) -> Self {
        let n = sys.n_factors();
        let mut k = KrausFamily::new(n, n);
        for i in 0..n {
            k.push(i, i, crate::linalg::eye(sys.dim(i)));
        }
        CpMorphism::from_kraus(&k, sys.clone(), sys.clone()).expect("identity shapes")
    }

    /// Same Choi data on different systems of identical shape.
    pub fn with_systems(&self, source: System, target: System) -> Result<Self> {
        if source.dims() != self.source.dims() || target.dims() != self.target.dims() {
            return Err(Error::SystemMismatch("replacement systems have different factor dimensions".into()));
        }
        let mut out = self.clone();
        // Choi blocks depend on the weights through the scale sqrt(w_j/w_i).
        for i in 0..source.n_factors() {
            for j in 0..target.n_factors() {
                let r = choi_scale(&source, &target, i, j) / choi_scale(&self.source, &self.target, i, j);
                out.blocks[i * target.n_factors() + j] *= c(r);
            }
        }
        out.source = source;
        out.target = target;
        Ok(out)
    }

    pub fn source(&self) -> &System {
        &self.source
    }

    pub fn target(&self) -> &System {
        &self.target
    }

    pub fn choi(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.blocks[i * self.target.n_factors() + j]
    }

    pub fn choi_blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// Largest eigenvalue over all Choi blocks; the common scale for rank cutoffs.
    pub fn spectral_scale(&self) -> f64 {
        self.blocks.iter().map(crate::linalg::spectral_radius).fold(0.0, f64::max)
    }

    /// Blockwise Frobenius distance.
    pub fn dist(&self, other: &CpMorphism) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| fdist(a, b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Minimal Kraus family: one map per Choi eigenvalue above `tol · spectral_scale`.
    pub fn to_kraus(&self, tol: f64) -> Result<KrausFamily> {
        let (na, nb) = (self.source.n_factors(), self.target.n_factors());
        let scale = self.spectral_scale();
        let pairs: Vec<(usize, usize)> = (0..na).flat_map(|i| (0..nb).map(move |j| (i, j))).collect();
        let lists = crate::par::map(&pairs, |&(i, j)| -> Result<Vec<ComplexMatrix>> {
            let (d, e) = (self.source.dim(i), self.target.dim(j));
            let eig = eigh(self.choi(i, j));
            if let Some(&lo) = eig.values.last() {
                if lo < -tol * scale.max(f64::MIN_POSITIVE) {
                    return Err(Error::NegativeSpectrum { eigenvalue: lo });
                }
            }
            let cs = choi_scale(&self.source, &self.target, i, j);
            let mut out = Vec::new();
            for (k, &lambda) in eig.values.iter().enumerate() {
                if lambda <= tol * scale || lambda <= 0.0 {
                    break;
                }
                let v = eig.vectors.column(k).into_owned() * c((lambda / cs).sqrt());
                out.push(unvec(&v, d, e)?.adjoint());
            }
            Ok(out)
        });
        let mut k = KrausFamily::new(na, nb);
        for (&(i, j), list) in pairs.iter().zip(lists) {
            *k.get_mut(i, j) = list?;
        }
        Ok(k)
    }

    /// `y_j = Σ_{i,k} M_{ijk} xᵢ M_{ijk}†`, evaluated directly from the Choi blocks.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.source.check(x)?;
        let mut y = self.target.zero();
        for i in 0..self.source.n_factors() {
            let d = self.source.dim(i);
            let xi = &x.blocks[i];
            for j in 0..self.target.n_factors() {
                let e = self.target.dim(j);
                let cb = self.choi(i, j);
                let inv = 1.0 / choi_scale(&self.source, &self.target, i, j);
                let yj = &mut y.blocks[j];
                for a in 0..e {
                    for b in 0..e {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for r in 0..d {
                            for s in 0..d {
                                acc += xi[(r, s)] * cb[(s + d * b, r + d * a)];
                            }
                        }
                        yj[(a, b)] += acc * inv;
                    }
                }
            }
        }
        Ok(y)
    }

    /// The adjoint for `⟨x, y⟩ = φ(x†y)`; Choi block `(j, i)` is `K·conj(C_{ij})·Kᵀ`.
    pub fn dagger(&self) -> CpMorphism {
        let (na, nb) = (self.source.n_factors(), self.target.n_factors());
        let mut blocks = vec![zeros(0, 0); na * nb];
        for i in 0..na {
            for j in 0..nb {
                let k = commutation(self.source.dim(i), self.target.dim(j));
                blocks[j * na + i] = &k * self.choi(i, j).map(|z| z.conj()) * k.transpose();
            }
        }
        CpMorphism { source: self.target.clone(), target: self.source.clone(), blocks }
    }

    /// Sum of two CP morphisms between the same systems.
    pub fn add(&self, other: &CpMorphism) -> Result<CpMorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::SystemMismatch("sum of morphisms between different systems".into()));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Ok(CpMorphism { source: self.source.clone(), target: self.target.clone(), blocks })
    }

    pub fn scale(&self, s: f64) -> CpMorphism {
        CpMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            blocks: self.blocks.iter().map(|b| b * c(s)).collect(),
        }
    }

    /// Defect of `Σ_{j,k} w_j M†M = wᵢ I` per source factor, from `Tr_K` of the Choi blocks.
    pub fn channel_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.source.n_factors() {
            let d = self.source.dim(i);
            let mut acc = zeros(d, d);
            for j in 0..self.target.n_factors() {
                let e = self.target.dim(j);
                let marginal = partial_trace(self.choi(i, j), &[e, d], &[1], None).expect("block shape");
                acc += marginal * c(self.target.weight(j) / choi_scale(&self.source, &self.target, i, j));
            }
            let target = crate::linalg::eye(d) * c(self.source.weight(i));
            worst = worst.max(fdist(&acc, &target) / self.source.weight(i));
        }
        worst
    }

    /// Defect of `φ_B(f(x)) = φ_A(x)` over matrix units.
    pub fn functional_defect(&self) -> f64 {
        self.source
            .matrix_units()
            .iter()
            .map(|u| {
                let lhs = self.target.functional(&self.apply(&u.element).expect("unit conforms")).expect("conforms");
                let rhs = self.source.functional(&u.element).expect("unit conforms");
                (lhs - rhs).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Functional preservation; the Kraus-sum and functional tests must agree.
    pub fn is_channel(&self, tol: f64) -> bool {
        let by_kraus = self.channel_defect() < tol;
        let by_functional = self.functional_defect() < tol;
        debug_assert!(
            by_kraus == by_functional || (self.channel_defect() - tol).abs() < tol || (self.functional_defect() - tol).abs() < tol,
            "channel tests disagree: {} vs {}",
            self.channel_defect(),
            self.functional_defect()
        );
        by_kraus
    }

    /// Multiplicativity, unitality and adjoint preservation on matrix units.
    pub fn homomorphism_report(&self, tol: f64) -> HomomorphismReport {
        let units = self.source.matrix_units();
        let images: Vec<Element> = units.iter().map(|u| self.apply(&u.element).expect("unit conforms")).collect();
        let mut multiplicative = true;
        'outer: for (p, up) in units.iter().enumerate() {
            for (q, uq) in units.iter().enumerate() {
                let prod = up.element.mul(&uq.element);
                let lhs = self.apply(&prod).expect("conforms");
                if lhs.dist(&images[p].mul(&images[q])) > tol {
                    multiplicative = false;
                    break 'outer;
                }
            }
        }
        let unital = self.apply(&self.source.unit()).expect("conforms").dist(&self.target.unit()) < tol;
        let star = units.iter().zip(&images).all(|(u, img)| {
            let adj = self.apply(&u.element.adjoint()).expect("conforms");
            adj.dist(&img.adjoint()) < tol
        });
        HomomorphismReport { multiplicative, unital, star }
    }

    pub fn is_star_homomorphism(&self, tol: f64) -> bool {
        self.homomorphism_report(tol).all()
    }

    /// The dagger is a *-homomorphism (comultiplicative, counital, adjoint preserving).
    pub fn is_star_cohomomorphism(&self, tol: f64) -> bool {
        self.dagger().is_star_homomorphism(tol)
    }
}

/// `g ∘ f` via all pairwise Kraus products summed over the middle factor.
pub fn compose(g: &CpMorphism, f: &CpMorphism, tol: Tol) -> Result<CpMorphism> {
    if f.target != g.source {
        return Err(Error::SystemMismatch("target of the first morphism is not the source of the second".into()));
    }
    let kf = f.to_kraus(tol.spec)?;
    let kg = g.to_kraus(tol.spec)?;
    let (na, nb, nc) = (f.source.n_factors(), f.target.n_factors(), g.target.n_factors());
    let mut k = KrausFamily::new(na, nc);
    for i in 0..na {
        for j in 0..nb {
            for m in kf.get(i, j) {
                for l in 0..nc {
                    for n in kg.get(j, l) {
                        k.push(i, l, n * m);
                    }
                }
            }
        }
    }
    CpMorphism::from_kraus(&k, f.source.clone(), g.target.clone())
}
