//! Seeded random instances for property tests, benchmarks and CLI self-checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::{ClassicalRelation, ClassicalSource, StochasticMatrix};
use crate::cpmaps::{CpMorphism, KrausFamily};
use crate::graphs::QuantumGraph;
use crate::linalg::{c, eye, inv_sqrt, zeros, ComplexMatrix, Tol};
use crate::relations::QuantumRelation;
use crate::systems::System;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in the unit square around the origin.
pub fn complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    DMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Unitary from the QR factor of a random matrix.
pub fn unitary<R: Rng>(rng: &mut R, d: usize) -> ComplexMatrix {
    complex_matrix(rng, d, d).qr().q()
}

/// Trivial-group system with `1..=max_factors` factors of dimension `1..=max_dim`.
pub fn system<R: Rng>(rng: &mut R, max_factors: usize, max_dim: usize) -> System {
    let n = rng.random_range(1..=max_factors);
    let dims: Vec<usize> = (0..n).map(|_| rng.random_range(1..=max_dim)).collect();
    System::from_dims(&dims).expect("positive dims")
}

/// CP morphism with `0..=max_kraus` random Kraus maps per block.
pub fn cp_map<R: Rng>(rng: &mut R, src: &System, tgt: &System, max_kraus: usize) -> CpMorphism {
    let mut k = KrausFamily::new(src.n_factors(), tgt.n_factors());
    for i in 0..src.n_factors() {
        for j in 0..tgt.n_factors() {
            for _ in 0..rng.random_range(0..=max_kraus) {
                k.push(i, j, complex_matrix(rng, tgt.dim(j), src.dim(i)));
            }
        }
    }
    CpMorphism::from_kraus(&k, src.clone(), tgt.clone()).expect("shapes match")
}

/// Random channel: random Kraus maps rescaled so that `Σ_j w_j M†M = wᵢ I`.
pub fn channel<R: Rng>(rng: &mut R, src: &System, tgt: &System, max_kraus: usize) -> CpMorphism {
    let mut k = KrausFamily::new(src.n_factors(), tgt.n_factors());
    for i in 0..src.n_factors() {
        let d = src.dim(i);
        loop {
            for j in 0..tgt.n_factors() {
                let cnt = rng.random_range(0..=max_kraus.max(d));
                *k.get_mut(i, j) = (0..cnt).map(|_| complex_matrix(rng, tgt.dim(j), d)).collect();
            }
            let mut s = zeros(d, d);
            for j in 0..tgt.n_factors() {
                for m in k.get(i, j) {
                    s += m.adjoint() * m * c(tgt.weight(j));
                }
            }
            if crate::linalg::min_eigenvalue(&s) > 1e-3 {
                let t = inv_sqrt(&s) * c(src.weight(i).sqrt());
                for j in 0..tgt.n_factors() {
                    for m in k.get_mut(i, j).iter_mut() {
                        *m = &*m * &t;
                    }
                }
                break;
            }
        }
    }
    CpMorphism::from_kraus(&k, src.clone(), tgt.clone()).expect("shapes match")
}

/// Reversible channel built from isometric embeddings into a generated target.
///
/// Every source factor is copied into one or two target slots with random
/// probabilities; slots are packed into `1..=max_target_factors` target
/// factors, padded by up to `max_pad` extra dimensions and rotated by a
/// random unitary.
pub fn reversible_channel<R: Rng>(rng: &mut R, src: &System, max_target_factors: usize, max_pad: usize) -> CpMorphism {
    let nt = rng.random_range(1..=max_target_factors);
    // (source factor, target factor, probability)
    let mut copies: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..src.n_factors() {
        let m = rng.random_range(1..=2);
        let mut ps: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = ps.iter().sum();
        ps.iter_mut().for_each(|p| *p /= total);
        for p in ps {
            copies.push((i, rng.random_range(0..nt), p));
        }
    }
    let mut dims = vec![0usize; nt];
    let mut slot = Vec::with_capacity(copies.len());
    for &(i, j, _) in &copies {
        slot.push(dims[j]);
        dims[j] += src.dim(i);
    }
    for d in dims.iter_mut() {
        *d += rng.random_range(0..=max_pad);
        if *d == 0 {
            *d = 1;
        }
    }
    let tgt = System::from_dims(&dims).expect("positive dims");
    let us: Vec<ComplexMatrix> = dims.iter().map(|&d| unitary(rng, d)).collect();
    let mut k = KrausFamily::new(src.n_factors(), nt);
    for (&(i, j, p), &off) in copies.iter().zip(&slot) {
        let d = src.dim(i);
        let v = us[j].columns(off, d).into_owned();
        k.push(i, j, v * c((p * src.weight(i) / tgt.weight(j)).sqrt()));
    }
    CpMorphism::from_kraus(&k, src.clone(), tgt).expect("shapes match")
}

/// Random relation: each block spanned by `0..=d·e` random operators.
pub fn relation<R: Rng>(rng: &mut R, src: &System, tgt: &System) -> QuantumRelation {
    let mut spans = Vec::new();
    for i in 0..src.n_factors() {
        for j in 0..tgt.n_factors() {
            let (d, e) = (src.dim(i), tgt.dim(j));
            let r = rng.random_range(0..=d * e);
            spans.push((0..r).map(|_| complex_matrix(rng, e, d)).collect());
        }
    }
    QuantumRelation::from_physical(src.clone(), tgt.clone(), &spans, 1e-9).expect("shapes match")
}

/// Symmetrized random operator subspace plus the identities on the diagonal.
pub fn confusability_graph<R: Rng>(rng: &mut R, sys: &System) -> QuantumGraph {
    let n = sys.n_factors();
    let mut spans: Vec<Vec<ComplexMatrix>> = vec![Vec::new(); n * n];
    for i in 0..n {
        spans[i * n + i].push(eye(sys.dim(i)));
        for j in i..n {
            let (d, e) = (sys.dim(i), sys.dim(j));
            let r = rng.random_range(0..=d * e);
            for _ in 0..r {
                let m = complex_matrix(rng, e, d);
                spans[j * n + i].push(m.adjoint());
                spans[i * n + j].push(m);
            }
        }
    }
    let rel = QuantumRelation::from_physical(sys.clone(), sys.clone(), &spans, 1e-9).expect("shapes match");
    QuantumGraph::new(rel, Tol::default()).expect("symmetric by construction")
}

/// A partial function `A → B` as the support of the dagger of a random,
/// possibly non-unital, *-homomorphism `B → A`; the source `A` is generated.
///
/// With `unital` every factor of `A` is fully covered and the result is a function.
pub fn partial_function<R: Rng>(rng: &mut R, tgt: &System, max_factors: usize, unital: bool) -> (System, QuantumRelation) {
    let na = rng.random_range(1..=max_factors);
    let mut layout: Vec<Vec<(usize, usize)>> = Vec::with_capacity(na);
    let mut dims = Vec::with_capacity(na);
    for _ in 0..na {
        let mut d = 0;
        let mut blocks = Vec::new();
        for j in 0..tgt.n_factors() {
            for _ in 0..rng.random_range(0..=1) {
                blocks.push((j, d));
                d += tgt.dim(j);
            }
        }
        if !unital {
            d += rng.random_range(0..=1);
        }
        if d == 0 {
            let j = rng.random_range(0..tgt.n_factors());
            blocks.push((j, 0));
            d = tgt.dim(j);
        }
        layout.push(blocks);
        dims.push(d);
    }
    let src = System::from_dims(&dims).expect("positive dims");
    let mut k = KrausFamily::new(tgt.n_factors(), na);
    for (i, blocks) in layout.iter().enumerate() {
        let u = unitary(rng, dims[i]);
        for &(j, off) in blocks {
            let v = u.columns(off, tgt.dim(j)).into_owned();
            k.push(j, i, v);
        }
    }
    let hom = CpMorphism::from_kraus(&k, tgt.clone(), src.clone()).expect("shapes match");
    let rel = crate::relations::support_of(&hom, 1e-9).expect("finite data").converse();
    (src, rel)
}

/// Column-stochastic matrix whose entries vanish with probability `zero_prob`.
pub fn stochastic<R: Rng>(rng: &mut R, rows: usize, cols: usize, zero_prob: f64) -> StochasticMatrix {
    let mut entries = vec![vec![0.0; cols]; rows];
    for i in 0..cols {
        let mut col: Vec<f64> =
            (0..rows).map(|_| if rng.random_bool(zero_prob) { 0.0 } else { rng.random_range(0.1..1.0) }).collect();
        if col.iter().all(|&x| x == 0.0) {
            col[rng.random_range(0..rows)] = 1.0;
        }
        normalize(&mut col);
        for j in 0..rows {
            entries[j][i] = col[j];
        }
    }
    StochasticMatrix::new(entries).expect("normalized columns")
}

/// Rescales to sum one and absorbs the rounding error in the largest entry.
fn normalize(xs: &mut [f64]) {
    let total: f64 = xs.iter().sum();
    xs.iter_mut().for_each(|x| *x /= total);
    let rest: f64 = xs.iter().sum::<f64>() - 1.0;
    let k = (0..xs.len()).max_by(|&a, &b| xs[a].total_cmp(&xs[b])).expect("nonempty");
    xs[k] -= rest;
}

pub fn classical_relation<R: Rng>(rng: &mut R, n: usize, m: usize) -> ClassicalRelation {
    ClassicalRelation::new((0..n).map(|_| (0..m).map(|_| rng.random_bool(0.5)).collect()).collect())
}

/// Classical source whose joint channel is reversible: every `(a, b)` cell is
/// owned by at most one source symbol.
///
/// # Panics
///
/// If `na·nb < ns`, since every symbol needs a cell of its own.
pub fn classical_source<R: Rng>(rng: &mut R, ns: usize, na: usize, nb: usize) -> ClassicalSource {
    assert!(na * nb >= ns, "{} symbols do not fit in {} cells", ns, na * nb);
    let mut cells_order: Vec<usize> = (0..na * nb).collect();
    cells_order.shuffle(rng);
    let mut owner = vec![0; na * nb];
    for (k, &cell) in cells_order.iter().enumerate() {
        owner[cell] = if k < ns { k } else { rng.random_range(0..=ns) };
    }
    let prob = (0..ns)
        .map(|s| {
            let mut cells: Vec<f64> =
                owner.iter().map(|&o| if o == s { rng.random_range(0.1..1.0) } else { 0.0 }).collect();
            normalize(&mut cells);
            (0..na).map(|a| cells[a * nb..(a + 1) * nb].to_vec()).collect()
        })
        .collect();
    ClassicalSource::new(prob).expect("normalized")
}

/// Random encoder `O_A → A` and channel `A → B`, each reversible half of the time.
pub fn scheme_channels<R: Rng>(rng: &mut R, oa: &System, max_dim: usize) -> (CpMorphism, CpMorphism) {
    let e = if rng.random_bool(0.5) {
        reversible_channel(rng, oa, 1, 1)
    } else {
        let a = system(rng, 2, max_dim);
        channel(rng, oa, &a, 2)
    };
    let n = if rng.random_bool(0.5) && e.target().hilbert_dim() <= 4 {
        reversible_channel(rng, e.target(), 1, 1)
    } else {
        let b = system(rng, 2, max_dim);
        channel(rng, e.target(), &b, 2)
    };
    (e, n)
}

/// The replacement channel `x ↦ φ_A(x)/φ_B(1)·1_B`; its confusability graph is complete.
pub fn replacement_channel(src: &System, tgt: &System) -> CpMorphism {
    let total: f64 = (0..tgt.n_factors()).map(|j| tgt.weight(j) * tgt.dim(j) as f64).sum();
    let mut k = KrausFamily::new(src.n_factors(), tgt.n_factors());
    for i in 0..src.n_factors() {
        let s = c((src.weight(i) / total).sqrt());
        for j in 0..tgt.n_factors() {
            for a in 0..src.dim(i) {
                for b in 0..tgt.dim(j) {
                    let mut m = zeros(tgt.dim(j), src.dim(i));
                    m[(b, a)] = s;
                    k.push(i, j, m);
                }
            }
        }
    }
    CpMorphism::from_kraus(&k, src.clone(), tgt.clone()).expect("shapes match")
}
