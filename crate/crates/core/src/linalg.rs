//! Dense complex linear algebra: Hermitian eigendecomposition, support
//! projections, span closures, vectorization and partial traces.
//!
//! Vectorization is column stacking throughout the crate. A `rows × cols`
//! matrix `X` is flattened so that entry `(r, c)` lands at index `r + rows·c`,
//! which makes `vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)` with `⊗` the Kronecker product
//! whose first leg is the most significant index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used for every operator in the crate.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

/// Default relative spectral cutoff.
pub const TOL_SPEC: f64 = 1e-9;
/// Default tolerance on projection defects and equality checks.
pub const TOL_PROJ: f64 = 1e-8;

/// Tolerances threaded through every numerical comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    /// Relative cutoff used when deciding which eigenvalues are nonzero.
    pub spec: f64,
    /// Absolute tolerance on Frobenius defects of projections and identities.
    pub proj: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { spec: TOL_SPEC, proj: TOL_PROJ }
    }
}

impl Tol {
    pub fn new(spec: f64, proj: f64) -> Self {
        Tol { spec, proj }
    }

    /// Uses one value for both the spectral cutoff and the equality tolerance.
    pub fn uniform(tol: f64) -> Self {
        Tol { spec: tol, proj: tol }
    }
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

pub fn eye(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Frobenius norm.
pub fn fnorm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius distance between two equally shaped matrices.
pub fn fdist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Kronecker product `a ⊗ b` with `a` the most significant leg.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Column-stacking vectorization.
pub fn vec(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec`].
pub fn unvec(v: &ComplexVector, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if rows * cols != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot reshape length {} into {}x{}",
            v.len(),
            rows,
            cols
        )));
    }
    Ok(ComplexMatrix::from_column_slice(rows, cols, v.as_slice()))
}

/// Permutation matrix `K` with `K·vec(X) = vec(Xᵀ)` for `X` of shape `rows × cols`.
pub fn commutation(rows: usize, cols: usize) -> ComplexMatrix {
    let n = rows * cols;
    let mut k = zeros(n, n);
    for r in 0..rows {
        for col in 0..cols {
            k[(col + cols * r, r + rows * col)] = c(1.0);
        }
    }
    k
}

/// Hermitian eigendecomposition with eigenvalues in descending order.
///
/// Each eigenvector is rotated so that its first component of non-negligible
/// magnitude is real and positive, making the output reproducible.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, aligned with `values`.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of the Hermitian part of `m`.
///
/// Uses nalgebra's solver and checks the result; on a non-finite or
/// inaccurate factorization it falls back to cyclic Jacobi rotations.
pub fn eigh(m: &ComplexMatrix) -> Eigen {
    let n = m.nrows();
    if n == 0 {
        return Eigen { values: vec![], vectors: zeros(0, 0) };
    }
    let h = hermitian_part(m);
    let se = h.clone().symmetric_eigen();
    let (raw_values, raw_vectors) = if eigen_is_accurate(&h, se.eigenvalues.as_slice(), &se.eigenvectors) {
        (se.eigenvalues.iter().copied().collect::<Vec<f64>>(), se.eigenvectors)
    } else {
        jacobi_eigen(h)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw_values[b].total_cmp(&raw_values[a]));
    let mut vectors = zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, &src) in order.iter().enumerate() {
        values.push(raw_values[src]);
        let mut col = raw_vectors.column(src).into_owned();
        fix_phase(&mut col);
        vectors.set_column(k, &col);
    }
    Eigen { values, vectors }
}

fn eigen_is_accurate(h: &ComplexMatrix, values: &[f64], vectors: &ComplexMatrix) -> bool {
    if values.iter().any(|x| !x.is_finite()) || vectors.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return false;
    }
    let n = h.nrows();
    let scale = h.norm().max(f64::MIN_POSITIVE);
    let mut vl = vectors.clone();
    for (k, &l) in values.iter().enumerate() {
        vl.column_mut(k).scale_mut(l);
    }
    fdist(&(h * vectors), &vl) <= 1e-10 * scale && fdist(&(vectors.adjoint() * vectors), &eye(n)) <= 1e-10
}

/// Cyclic Jacobi eigensolver for a Hermitian matrix (values unsorted).
fn jacobi_eigen(mut a: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.nrows();
    let mut v = eye(n);
    let total = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                let bn = b.norm();
                if bn <= 1e-300 {
                    continue;
                }
                // Phase `u` makes the pivot real; then a real rotation zeroes it.
                let u = b / bn;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * bn);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let (jpp, jpq, jqp, jqq) = (c(cs), c(sn), -u.conj() * sn, u.conj() * cs);
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * jpp + y * jqp;
                    a[(k, q)] = x * jpq + y * jqq;
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * jpp + y * jqp;
                    v[(k, q)] = x * jpq + y * jqq;
                }
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * x + jqp.conj() * y;
                    a[(q, k)] = jpq.conj() * x + jqq.conj() * y;
                }
            }
        }
    }
    ((0..n).map(|k| a[(k, k)].re).collect(), v)
}

/// Rotates `v` so its first component above a small relative threshold is real positive.
pub fn fix_phase(v: &mut ComplexVector) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-8 * scale) {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

/// Checks Hermiticity relative to the Frobenius norm and returns the symmetrized matrix.
pub fn check_hermitian(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("matrix {}x{} is not square", m.nrows(), m.ncols())));
    }
    if !is_finite(m) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let defect = fnorm(&(m - m.adjoint()));
    let scale = fnorm(m);
    if defect > tol * scale.max(f64::MIN_POSITIVE) && defect > 0.0 {
        return Err(Error::NotHermitian { defect });
    }
    Ok(hermitian_part(m))
}

/// An orthogonal projection on a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection(ComplexMatrix);

impl Projection {
    /// Validates `P = P†`, `P² = P` within `tol` (Frobenius) and symmetrizes.
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("projection must be square".into()));
        }
        if !is_finite(&m) {
            return Err(Error::InvalidInput("projection has non-finite entries".into()));
        }
        let herm = fnorm(&(&m - m.adjoint()));
        let idem = fdist(&(&m * &m), &m);
        if herm > tol || idem > tol {
            return Err(Error::NotAProjection { defect: herm.max(idem) });
        }
        Ok(Projection(hermitian_part(&m)))
    }

    /// Projection onto the column span of an orthonormal set of columns.
    pub fn from_orthonormal_columns(dim: usize, cols: &ComplexMatrix) -> Self {
        if cols.ncols() == 0 {
            return Projection::zero(dim);
        }
        Projection(hermitian_part(&(cols * cols.adjoint())))
    }

    pub fn zero(dim: usize) -> Self {
        Projection(zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Projection(eye(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn rank(&self) -> usize {
        self.0.trace().re.round().max(0.0) as usize
    }

    pub fn complement(&self) -> Projection {
        Projection(eye(self.dim()) - &self.0)
    }

    /// Orthonormal basis of the range, as columns, in descending-eigenvalue order.
    pub fn basis(&self) -> ComplexMatrix {
        let e = eigh(&self.0);
        let r = e.values.iter().filter(|&&v| v > 0.5).count();
        e.vectors.columns(0, r).into_owned()
    }

    /// `self ≤ other` in the projection order, tested as `other·self = self`.
    pub fn leq(&self, other: &Projection, tol: f64) -> bool {
        fdist(&(&other.0 * &self.0), &self.0) < tol
    }

    pub fn dist(&self, other: &Projection) -> f64 {
        fdist(&self.0, &other.0)
    }
}

/// Support projection of a Hermitian PSD matrix with a cutoff relative to its top eigenvalue.
pub fn support_projection(m: &ComplexMatrix, tol: f64) -> Result<Projection> {
    support_projection_scaled(m, tol, 0.0)
}

/// As [`support_projection`], but the cutoff is `tol·max(top eigenvalue, scale)`.
///
/// A common `scale` lets a family of blocks share one cutoff so that a block
/// that is zero up to rounding is not promoted to full support.
pub fn support_projection_scaled(m: &ComplexMatrix, tol: f64, scale: f64) -> Result<Projection> {
    let h = check_hermitian(m, tol)?;
    let n = h.nrows();
    let e = eigh(&h);
    let top = e.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if let Some(&lo) = e.values.last() {
        if lo < -tol * top.max(scale) {
            return Err(Error::NegativeSpectrum { eigenvalue: lo });
        }
    }
    let cut = tol * top.max(scale);
    let r = e.values.iter().filter(|&&v| v > cut && v > 0.0).count();
    Ok(Projection::from_orthonormal_columns(n, &e.vectors.columns(0, r).into_owned()))
}

/// Largest eigenvalue magnitude of a Hermitian matrix.
pub fn spectral_radius(m: &ComplexMatrix) -> f64 {
    eigh(m).values.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// Orthonormal basis (columns) of the span of `vectors`.
///
/// Singular values at or below `tol·max(σ_max, floor)` are discarded; pass
/// `floor = 0` for a purely relative threshold.
pub fn span_basis(vectors: &[ComplexVector], dim: usize, tol: f64, floor: f64) -> Result<ComplexMatrix> {
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch(format!("vector of length {} in span of dimension {}", v.len(), dim)));
    }
    if vectors.is_empty() || dim == 0 {
        return Ok(zeros(dim, 0));
    }
    let mut a = zeros(dim, vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        a.set_column(k, v);
    }
    let (u, sv) = left_singular(a);
    let smax = sv.iter().fold(0.0f64, |x, &y| x.max(y));
    let cut = tol * smax.max(floor);
    let mut keep: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] > cut).collect();
    keep.sort_by(|&x, &y| sv[y].partial_cmp(&sv[x]).unwrap_or(std::cmp::Ordering::Equal));
    let mut basis = zeros(dim, keep.len());
    for (k, &src) in keep.iter().enumerate() {
        basis.set_column(k, &u.column(src));
    }
    Ok(basis)
}

/// Left singular vectors and singular values of `a`, checked by reconstruction.
///
/// The Golub-Kahan SVD occasionally returns a wrong factorization for
/// rank-deficient complex inputs. When the reconstruction is off, retry on
/// `a†`, and fall back to the eigendecomposition of `a·a†`.
fn left_singular(a: ComplexMatrix) -> (ComplexMatrix, Vec<f64>) {
    let norm = a.norm().max(f64::MIN_POSITIVE);
    let ok = |u: &ComplexMatrix, sv: &[f64], vt: &ComplexMatrix, m: &ComplexMatrix| {
        let mut us = u.clone();
        for (k, &s) in sv.iter().enumerate() {
            us.column_mut(k).scale_mut(s);
        }
        fdist(&(us * vt), m) <= 1e-10 * norm
    };
    let svd = a.clone().svd(true, true);
    let (u, vt) = (svd.u.expect("left singular vectors requested"), svd.v_t.expect("right singular vectors requested"));
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    if ok(&u, &sv, &vt, &a) {
        return (u, sv);
    }
    let at = a.adjoint();
    let svd = at.clone().svd(true, true);
    let (ut, vtt) = (svd.u.expect("left singular vectors requested"), svd.v_t.expect("right singular vectors requested"));
    let svt: Vec<f64> = svd.singular_values.iter().copied().collect();
    if ok(&ut, &svt, &vtt, &at) {
        return (vtt.adjoint(), svt);
    }
    // Squaring halves the usable precision, so tiny values are flushed to zero.
    let e = eigh(&(&a * a.adjoint()));
    let top = e.values.first().copied().unwrap_or(0.0).max(0.0);
    let sv = e.values.iter().map(|&l| if l > 1e-14 * top { l.sqrt() } else { 0.0 }).collect();
    (e.vectors, sv)
}

/// Projection onto the linear span of `vectors`, rank decided relative to the top singular value.
pub fn orthonormal_span(vectors: &[ComplexVector], dim: usize, tol: f64) -> Result<Projection> {
    let b = span_basis(vectors, dim, tol, 0.0)?;
    Ok(Projection::from_orthonormal_columns(dim, &b))
}

/// Weighted partial trace over the legs not listed in `keep`.
///
/// `dims` lists the tensor legs, first leg most significant. Each traced leg
/// contributes its weight (in the order the traced legs appear) as a factor.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize], weights: Option<&[f64]>) -> Result<ComplexMatrix> {
    let n: usize = dims.iter().product();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} does not match leg dimensions {:?}",
            m.nrows(),
            m.ncols(),
            dims
        )));
    }
    if let Some(&k) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::IndexOutOfRange(format!("leg {} of {}", k, dims.len())));
    }
    let legs = dims.len();
    let kept: Vec<bool> = (0..legs).map(|l| keep.contains(&l)).collect();
    let traced: Vec<usize> = (0..legs).filter(|&l| !kept[l]).collect();
    let scale = match weights {
        None => 1.0,
        Some(w) => {
            if w.len() != traced.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} weights for {} traced legs",
                    w.len(),
                    traced.len()
                )));
            }
            w.iter().product()
        }
    };
    let mut stride = vec![1usize; legs];
    for l in (0..legs.saturating_sub(1)).rev() {
        stride[l] = stride[l + 1] * dims[l + 1];
    }
    let kept_legs: Vec<usize> = (0..legs).filter(|&l| kept[l]).collect();
    let kept_dims: Vec<usize> = kept_legs.iter().map(|&l| dims[l]).collect();
    let out_n: usize = kept_dims.iter().product();
    let mut out_stride = vec![1usize; kept_legs.len()];
    for l in (0..kept_legs.len().saturating_sub(1)).rev() {
        out_stride[l] = out_stride[l + 1] * kept_dims[l + 1];
    }
    let split = |idx: usize| -> (usize, usize) {
        let mut kept_part = 0;
        let mut traced_part = 0;
        let mut ko = 0;
        for l in 0..legs {
            let digit = (idx / stride[l]) % dims[l];
            if kept[l] {
                kept_part += digit * out_stride[ko];
                ko += 1;
            } else {
                traced_part += digit * stride[l];
            }
        }
        (kept_part, traced_part)
    };
    let embed = |kept_idx: usize, traced_part: usize| -> usize {
        let mut idx = traced_part;
        for (ko, &l) in kept_legs.iter().enumerate() {
            let digit = (kept_idx / out_stride[ko]) % kept_dims[ko];
            idx += digit * stride[l];
        }
        idx
    };
    let mut out = zeros(out_n, out_n);
    for r in 0..n {
        let (kr, t) = split(r);
        for kc in 0..out_n {
            out[(kr, kc)] += m[(r, embed(kc, t))];
        }
    }
    Ok(out.scale(scale))
}

/// Factor `r` with `r†·r = m`, one row per eigenvalue above the relative cutoff.
///
/// Rows follow descending eigenvalue order with the phase convention of [`eigh`].
pub fn psd_factor(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    psd_factor_scaled(m, tol, 0.0)
}

pub fn psd_factor_scaled(m: &ComplexMatrix, tol: f64, scale: f64) -> Result<ComplexMatrix> {
    let h = check_hermitian(m, tol)?;
    let n = h.nrows();
    let e = eigh(&h);
    let top = e.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if let Some(&lo) = e.values.last() {
        if lo < -tol * top.max(scale) {
            return Err(Error::NegativeSpectrum { eigenvalue: lo });
        }
    }
    let cut = tol * top.max(scale);
    let r = e.values.iter().filter(|&&v| v > cut && v > 0.0).count();
    let mut out = zeros(r, n);
    for k in 0..r {
        let s = e.values[k].sqrt();
        for x in 0..n {
            out[(k, x)] = e.vectors[(x, k)].conj() * s;
        }
    }
    Ok(out)
}

/// Inverse square root of a positive definite Hermitian matrix.
pub fn inv_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let e = eigh(m);
    let n = m.nrows();
    let mut d = zeros(n, n);
    for k in 0..n {
        d[(k, k)] = c(1.0 / e.values[k].sqrt());
    }
    &e.vectors * d * e.vectors.adjoint()
}

/// Smallest eigenvalue of a Hermitian matrix (`+∞` for the empty matrix).
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    eigh(m).values.last().copied().unwrap_or(f64::INFINITY)
}

pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    u.is_square() && fdist(&(u.adjoint() * u), &eye(u.nrows())) < tol
}

/// Orthonormal basis (columns) of the kernel of a Hermitian PSD matrix.
pub fn kernel_basis(m: &ComplexMatrix, tol: f64, scale: f64) -> Result<ComplexMatrix> {
    let s = support_projection_scaled(m, tol, scale)?;
    Ok(s.complement().basis())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> ComplexMatrix {
        let mut m = zeros(v.len(), v.len());
        for (k, &x) in v.iter().enumerate() {
            m[(k, k)] = c(x);
        }
        m
    }

    fn cm(rows: usize, cols: usize, data: &[(f64, f64)]) -> ComplexMatrix {
        ComplexMatrix::from_row_iterator(rows, cols, data.iter().map(|&(a, b)| Complex64::new(a, b)))
    }

    #[test]
    fn support_of_diagonal() {
        let p = support_projection(&diag(&[0.0, 2.0, 3.0]), TOL_SPEC).unwrap();
        assert!(fdist(p.matrix(), &diag(&[0.0, 1.0, 1.0])) < 1e-12);
        let z = support_projection(&zeros(4, 4), TOL_SPEC).unwrap();
        assert_eq!(z.matrix(), &zeros(4, 4));
    }

    #[test]
    fn support_of_rank_one() {
        let s = 0.5f64.sqrt();
        let v = ComplexVector::from_vec(vec![c(s), c(s)]);
        let m = &v * v.adjoint();
        let p = support_projection(&m, TOL_SPEC).unwrap();
        assert!(fdist(p.matrix(), &m) < 1e-12);
    }

    #[test]
    fn support_rejects_bad_input() {
        let m = cm(2, 2, &[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert!(matches!(support_projection(&m, TOL_SPEC), Err(Error::NotHermitian { .. })));
        assert!(matches!(support_projection(&diag(&[1.0, -1.0]), TOL_SPEC), Err(Error::NegativeSpectrum { .. })));
    }

    #[test]
    fn span_examples() {
        let v = |a: f64, b: f64| ComplexVector::from_vec(vec![c(a), c(b)]);
        let p = orthonormal_span(&[v(1.0, 0.0), v(1.0, 1.0)], 2, TOL_SPEC).unwrap();
        assert!(fdist(p.matrix(), &eye(2)) < 1e-12);
        let p = orthonormal_span(&[], 2, TOL_SPEC).unwrap();
        assert_eq!(p.rank(), 0);
        let p = orthonormal_span(&[v(1.0, 0.0), v(2.0, 0.0)], 2, TOL_SPEC).unwrap();
        assert!(fdist(p.matrix(), &diag(&[1.0, 0.0])) < 1e-12);
        assert!(matches!(
            orthonormal_span(&[v(1.0, 0.0)], 3, TOL_SPEC),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn vec_convention() {
        assert_eq!(vec(&eye(2)).as_slice(), &[c(1.0), c(0.0), c(0.0), c(1.0)]);
        let m = cm(2, 3, &[(1.0, 0.0), (2.0, 1.0), (3.0, 0.0), (4.0, 0.0), (5.0, -1.0), (6.0, 0.0)]);
        assert_eq!(unvec(&vec(&m), 2, 3).unwrap(), m);
        assert_eq!(vec(&m)[1], m[(1, 0)]);
        assert!(unvec(&vec(&m), 4, 2).is_err());
        let k = commutation(2, 3);
        assert_eq!(k * vec(&m), vec(&m.transpose()));
    }

    #[test]
    fn partial_trace_examples() {
        let a = cm(2, 2, &[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)]);
        let b = cm(2, 2, &[(0.5, 0.0), (0.0, 1.0), (0.0, -1.0), (1.5, 0.0)]);
        let ab = kron(&a, &b);
        let t = partial_trace(&ab, &[2, 2], &[0], None).unwrap();
        assert!(fdist(&t, &a.scale(2.0)) < 1e-12);
        let t = partial_trace(&ab, &[2, 2], &[1], None).unwrap();
        assert!(fdist(&t, &b.scale(5.0)) < 1e-12);
        assert_eq!(partial_trace(&ab, &[2, 2], &[0, 1], None).unwrap(), ab);
        let w = partial_trace(&ab, &[2, 2], &[0], Some(&[3.0])).unwrap();
        assert!(fdist(&w, &a.scale(6.0)) < 1e-12);
        let omega = vec(&eye(2));
        let t = partial_trace(&(&omega * omega.adjoint()), &[2, 2], &[0], None).unwrap();
        assert!(fdist(&t, &eye(2)) < 1e-12);
        assert!(partial_trace(&ab, &[2, 3], &[0], None).is_err());
        assert!(partial_trace(&ab, &[2, 2], &[2], None).is_err());
        assert!(partial_trace(&ab, &[2, 2], &[0], Some(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn psd_factor_examples() {
        let r = psd_factor(&diag(&[4.0, 0.0]), TOL_SPEC).unwrap();
        assert_eq!(r.nrows(), 1);
        assert!(fdist(&(r.adjoint() * &r), &diag(&[4.0, 0.0])) < 1e-12);
        let p = diag(&[1.0, 0.0, 1.0]);
        let r = psd_factor(&p, TOL_SPEC).unwrap();
        assert!(fdist(&(r.adjoint() * &r), &p) < 1e-12);
        assert!(fdist(&(&r * r.adjoint()), &eye(2)) < 1e-12);
    }

    #[test]
    fn projection_validation() {
        assert!(Projection::new(diag(&[1.0, 0.5]), TOL_PROJ).is_err());
        let p = Projection::new(diag(&[1.0, 0.0]), TOL_PROJ).unwrap();
        assert_eq!(p.rank(), 1);
        assert!(p.leq(&Projection::identity(2), TOL_PROJ));
        assert!(!Projection::identity(2).leq(&p, TOL_PROJ));
    }

    #[test]
    fn span_of_rank_one_products_with_noise() {
        // Input on which the plain SVD returns a wrong factorization.
        let cols: [[(f64, f64); 4]; 4] = [
            [(0.4862465840224878, 0.11646570107315732), (-1.0928757898653885e-16, 2.8102520310824275e-16), (-8.239936510889834e-17, -3.187554387107383e-16), (0.48624658402248777, 0.11646570107315729)],
            [(-8.673617379884035e-19, -1.6197980456933436e-16), (1.1796119636642288e-16, 7.806255641895632e-17), (8.326672684688674e-16, 1.457167719820518e-16), (-1.0408340855860843e-17, 1.5308934675495323e-16)],
            [(-1.214306433183765e-16, 9.75781955236954e-19), (3.8163916471489756e-16, 3.191891195797325e-16), (1.496198998029996e-17, -5.976664475826343e-17), (2.419939248987646e-16, -1.0885389811754465e-16)],
            [(0.5, -8.052402186728067e-18), (1.3617579286417936e-16, -1.4755991567527715e-16), (8.413408858487514e-17, 6.461844948013606e-17), (0.5000000000000001, -8.368685518872487e-18)],
        ];
        let vs: Vec<ComplexVector> = cols
            .iter()
            .map(|col| ComplexVector::from_iterator(4, col.iter().map(|&(re, im)| Complex64::new(re, im))))
            .collect();
        let b = span_basis(&vs, 4, 1e-9, 1.0).unwrap();
        assert_eq!(b.ncols(), 1);
        let expected = Projection::from_orthonormal_columns(4, &ComplexMatrix::from_column_slice(4, 1, (vec(&eye(2)) * c(std::f64::consts::FRAC_1_SQRT_2)).as_slice()));
        assert!(Projection::from_orthonormal_columns(4, &b).dist(&expected) < 1e-12);
    }

    #[test]
    fn eigh_of_rank_one_identity_vector() {
        // nalgebra's solver returns NaN here for d = 8.
        for d in 1..=9 {
            let v = vec(&eye(d));
            let e = eigh(&(&v * v.adjoint()));
            assert!((e.values[0] - d as f64).abs() < 1e-10);
            assert!(e.values[1..].iter().all(|x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn jacobi_matches_direct_solver() {
        let m = ComplexMatrix::from_fn(5, 5, |r, col| Complex64::new((r * 7 + col * 3) as f64 % 5.0 - 2.0, (r as f64 - col as f64) * 0.3));
        let h = hermitian_part(&m);
        let (values, vectors) = jacobi_eigen(h.clone());
        assert!(eigen_is_accurate(&h, &values, &vectors));
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let direct = eigh(&h).values;
        for (a, b) in sorted.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
