//! Finite quantum sets, their algebras `⊕ᵢ B(Hᵢ)` with a group action, and the
//! separable standard functional `φ(x) = Σᵢ wᵢ·Tr(xᵢ)` with `wᵢ = dᵢ`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::{AlgebraAction, FiniteGroup};
use crate::linalg::{c, eye, fdist, fnorm, kron, zeros, ComplexMatrix};

/// Factor dimensions `(d_1, …, d_m)` of a finite quantum set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumSet {
    dims: Vec<usize>,
}

impl QuantumSet {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidInput("a quantum set needs at least one factor".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidInput("factor dimensions must be positive".into()));
        }
        Ok(QuantumSet { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
}

/// An element of `⊕ᵢ B(Hᵢ)`, one square block per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub blocks: Vec<ComplexMatrix>,
}

/// Matrix unit `|row⟩⟨col|` in one factor, embedded as an algebra element.
#[derive(Debug, Clone)]
pub struct MatrixUnit {
    pub factor: usize,
    pub row: usize,
    pub col: usize,
    pub element: Element,
}

impl Element {
    pub fn zero(dims: &[usize]) -> Self {
        Element { blocks: dims.iter().map(|&d| zeros(d, d)).collect() }
    }

    pub fn unit(dims: &[usize]) -> Self {
        Element { blocks: dims.iter().map(|&d| eye(d)).collect() }
    }

    /// All matrix units, ordered by factor, then row, then column.
    pub fn matrix_units(dims: &[usize]) -> Vec<MatrixUnit> {
        let mut out = Vec::new();
        for (i, &d) in dims.iter().enumerate() {
            for row in 0..d {
                for col in 0..d {
                    let mut e = Element::zero(dims);
                    e.blocks[i][(row, col)] = c(1.0);
                    out.push(MatrixUnit { factor: i, row, col, element: e });
                }
            }
        }
        out
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn conforms(&self, dims: &[usize]) -> bool {
        self.blocks.len() == dims.len() && self.blocks.iter().zip(dims).all(|(b, &d)| b.nrows() == d && b.ncols() == d)
    }

    pub fn mul(&self, other: &Element) -> Element {
        Element { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect() }
    }

    pub fn adjoint(&self) -> Element {
        Element { blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    pub fn add(&self, other: &Element) -> Element {
        Element { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Element {
        Element { blocks: self.blocks.iter().map(|b| b * s).collect() }
    }

    /// Blockwise Frobenius distance.
    pub fn dist(&self, other: &Element) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| fdist(a, b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| fnorm(b).powi(2)).sum::<f64>().sqrt()
    }
}

/// A finite-dimensional C*-algebra with a group action and a faithful invariant functional.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    qset: QuantumSet,
    action: AlgebraAction,
    weights: Vec<f64>,
}

impl System {
    /// The separable standard functional: weights equal factor dimensions.
    pub fn separable_standard(qset: QuantumSet, action: AlgebraAction) -> Result<Self> {
        let weights = qset.dims.iter().map(|&d| d as f64).collect();
        System::with_weights(qset, action, weights)
    }

    /// A system with explicit weights, which must be positive and constant on orbits.
    pub fn with_weights(qset: QuantumSet, action: AlgebraAction, weights: Vec<f64>) -> Result<Self> {
        let m = qset.dims.len();
        if action.n_factors() != m {
            return Err(Error::ActionShapeMismatch(format!(
                "action covers {} factors, quantum set has {}",
                action.n_factors(),
                m
            )));
        }
        for g in 0..action.group().order() {
            for i in 0..m {
                let t = action.perm(g)[i];
                if qset.dims[t] != qset.dims[i] || action.unitary(g, i).nrows() != qset.dims[i] {
                    return Err(Error::ActionShapeMismatch(format!("element {} does not preserve factor {}", g, i)));
                }
            }
        }
        if weights.len() != m || weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput("weights must be one positive number per factor".into()));
        }
        for g in 0..action.group().order() {
            for i in 0..m {
                if weights[action.perm(g)[i]] != weights[i] {
                    return Err(Error::InvalidInput(format!("weights are not constant on the orbit of factor {}", i)));
                }
            }
        }
        Ok(System { qset, action, weights })
    }

    /// `⊕ B(ℂ^{d_i})` with the trivial group.
    pub fn from_dims(dims: &[usize]) -> Result<Self> {
        let qset = QuantumSet::new(dims.to_vec())?;
        let action = AlgebraAction::trivial(Arc::new(FiniteGroup::trivial()), dims);
        System::separable_standard(qset, action)
    }

    /// `ℂⁿ` with the trivial group.
    pub fn classical(n: usize) -> Self {
        System::from_dims(&vec![1; n]).expect("n > 0")
    }

    /// `B(ℂᵈ)` with the trivial group.
    pub fn matrix(d: usize) -> Self {
        System::from_dims(&[d]).expect("d > 0")
    }

    /// The one-dimensional system `ℂ` carrying the trivial action of `group`.
    pub fn unit_of(group: Arc<FiniteGroup>) -> Self {
        let action = AlgebraAction::trivial(group, &[1]);
        System::separable_standard(QuantumSet { dims: vec![1] }, action).expect("unit system")
    }

    pub fn qset(&self) -> &QuantumSet {
        &self.qset
    }

    pub fn dims(&self) -> &[usize] {
        &self.qset.dims
    }

    pub fn dim(&self, i: usize) -> usize {
        self.qset.dims[i]
    }

    pub fn n_factors(&self) -> usize {
        self.qset.dims.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn action(&self) -> &AlgebraAction {
        &self.action
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.action.group()
    }

    /// Dimension of the algebra, `Σ dᵢ²`.
    pub fn algebra_dim(&self) -> usize {
        self.qset.dims.iter().map(|d| d * d).sum()
    }

    /// Dimension of `⊕ Hᵢ`.
    pub fn hilbert_dim(&self) -> usize {
        self.qset.dims.iter().sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.qset.dims.iter().all(|&d| d == 1)
    }

    pub fn unit(&self) -> Element {
        Element::unit(self.dims())
    }

    pub fn zero(&self) -> Element {
        Element::zero(self.dims())
    }

    pub fn matrix_units(&self) -> Vec<MatrixUnit> {
        Element::matrix_units(self.dims())
    }

    pub(crate) fn check(&self, x: &Element) -> Result<()> {
        if !x.conforms(self.dims()) {
            return Err(Error::ShapeMismatch(format!(
                "element with block dims {:?} does not fit system {:?}",
                x.dims(),
                self.dims()
            )));
        }
        Ok(())
    }

    /// `φ(x) = Σᵢ wᵢ·Tr(xᵢ)`.
    pub fn functional(&self, x: &Element) -> Result<Complex64> {
        self.check(x)?;
        Ok(x.blocks.iter().zip(&self.weights).map(|(b, &w)| b.trace() * w).sum())
    }

    /// Categorical trace of an endomorphism, realized by the functional.
    pub fn trace_end(&self, x: &Element) -> Result<Complex64> {
        self.functional(x)
    }

    /// `trace_end` of the unit.
    pub fn system_dimension(&self) -> f64 {
        self.trace_end(&self.unit()).expect("unit conforms").re
    }

    /// Numerical defects of the Frobenius algebra axioms for the chosen functional.
    ///
    /// Works in the basis of matrix units with inner product `⟨x, y⟩ = φ(x†y)`.
    /// Dense, so intended for algebras of dimension up to about 20.
    pub fn ssfa_report(&self) -> SsfaReport {
        let units = self.matrix_units();
        let n = units.len();
        let offsets: Vec<usize> = self
            .dims()
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d * d;
                Some(o)
            })
            .collect();
        let index = |i: usize, r: usize, col: usize| offsets[i] + r * self.dim(i) + col;
        // multiplication m: A ⊗ A → A with the left factor as most significant index
        let mut m = zeros(n, n * n);
        for (p, up) in units.iter().enumerate() {
            for (q, uq) in units.iter().enumerate() {
                if up.factor == uq.factor && up.col == uq.row {
                    m[(index(up.factor, up.row, uq.col), p * n + q)] = c(1.0);
                }
            }
        }
        let gram: Vec<f64> = units.iter().map(|u| self.weights[u.factor]).collect();
        let mut m_adj = m.adjoint();
        for p in 0..n {
            for q in 0..n {
                let s = 1.0 / (gram[p] * gram[q]);
                for r in 0..n {
                    m_adj[(p * n + q, r)] *= s * gram[r];
                }
            }
        }
        let mut unit = zeros(n, 1);
        for (i, &d) in self.dims().iter().enumerate() {
            for a in 0..d {
                unit[(index(i, a, a), 0)] = c(1.0);
            }
        }
        let id = eye(n);
        let m_left = kron(&m, &id);
        let m_right = kron(&id, &m);
        let associativity = fdist(&(&m * &m_left), &(&m * &m_right));
        let unitality = fdist(&(&m * kron(&unit, &id)), &id).max(fdist(&(&m * kron(&id, &unit)), &id));
        let mm = &m_adj * &m;
        let frobenius = fdist(&(&m_left * kron(&id, &m_adj)), &mm).max(fdist(&(&m_right * kron(&m_adj, &id)), &mm));
        let separability = fdist(&(&m * &m_adj), &id);
        let mut standardness = 0.0f64;
        for (p, u) in units.iter().enumerate() {
            let left_mult_trace: Complex64 = (0..n).map(|q| m[(q, p * n + q)]).sum();
            let phi = if u.row == u.col { self.weights[u.factor] } else { 0.0 };
            standardness = standardness.max((left_mult_trace - c(phi)).norm());
        }
        SsfaReport { associativity, unitality, frobenius, separability, standardness }
    }
}

/// Frobenius-norm defects of the separable standard Frobenius algebra axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsfaReport {
    pub associativity: f64,
    pub unitality: f64,
    pub frobenius: f64,
    pub separability: f64,
    pub standardness: f64,
}

impl SsfaReport {
    pub fn max_defect(&self) -> f64 {
        [self.associativity, self.unitality, self.frobenius, self.separability, self.standardness]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_defect() < tol
    }
}
