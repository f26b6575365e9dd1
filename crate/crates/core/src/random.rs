//! Seeded random constructions: Ginibre matrices, Haar-ish unitaries,
//! random channels, and block-structured channels for structure tests.
//!
//! Everything takes an explicit RNG so callers control reproducibility.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::KrausChannel;
use crate::error::Result;
use crate::linalg::{eig, vdot, vnorm, ComplexMatrix};

/// Standard complex Gaussian (unit-variance real and imaginary parts).
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Ginibre matrix with iid complex Gaussian entries.
pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Random Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_matrix(n, n, rng).hermitian_part()
}

/// Haar-distributed-enough unitary: orthonormalized Ginibre columns with the
/// phase convention fixed by the Gram-Schmidt pivots.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_isometry(n, n, rng)
}

/// Isometry `V: C^cols -> C^rows` (`rows >= cols`) with `V†V = I`.
pub fn random_isometry<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = random_matrix(rows, cols, rng);
    let mut columns: Vec<Vec<Complex64>> = (0..cols).map(|j| g.column(j)).collect();
    for j in 0..cols {
        // two Gram-Schmidt passes keep orthonormality at machine precision
        for _ in 0..2 {
            for k in 0..j {
                let overlap = vdot(&columns[k], &columns[j]);
                let prev = columns[k].clone();
                for (x, p) in columns[j].iter_mut().zip(&prev) {
                    *x -= overlap * p;
                }
            }
        }
        let nrm = vnorm(&columns[j]);
        columns[j].iter_mut().for_each(|z| *z /= nrm);
    }
    let mut v = ComplexMatrix::zeros(rows, cols);
    for (j, col) in columns.iter().enumerate() {
        v.set_column(j, col);
    }
    v
}

/// Random density matrix `GG†/tr(GG†)`, full rank almost surely.
pub fn random_density<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_matrix(n, n, rng);
    let rho = g.matmul(&g.adjoint()).expect("square");
    let t = rho.trace();
    rho.scale(Complex64::new(1.0 / t.re, 0.0))
}

/// Random CPTP channel by the isometry construction: a Haar isometry
/// `C^n -> C^{kn}` sliced into `k` stacked blocks gives Kraus operators with
/// `Σ A_i†A_i = I` exactly (up to rounding).
pub fn random_cptp<R: Rng>(n: usize, k: usize, rng: &mut R) -> KrausChannel {
    let v = random_isometry(k * n, n, rng);
    let kraus: Vec<ComplexMatrix> = (0..k)
        .map(|block| ComplexMatrix::from_fn(n, n, |i, j| v[(block * n + i, j)]))
        .collect();
    KrausChannel::new(n, kraus).expect("construction is structurally valid")
}

/// Mixed-unitary channel `Σ p_i U_i · U_i†` with Dirichlet-ish weights.
pub fn random_mixed_unitary<R: Rng>(n: usize, k: usize, rng: &mut R) -> KrausChannel {
    let weights = random_weights(k, rng);
    let kraus: Vec<ComplexMatrix> = weights
        .iter()
        .map(|&p| random_unitary(n, rng).scale(Complex64::new(p.sqrt(), 0.0)))
        .collect();
    KrausChannel::new(n, kraus).expect("construction is structurally valid")
}

/// Unital channel whose Kraus algebra is (generically) the full block
/// algebra `⊕ M_{d_j}`: block-diagonal mixed-unitary conjugated by a random
/// unitary to hide the split.
pub fn random_block_unital<R: Rng>(dims: &[usize], k: usize, rng: &mut R) -> KrausChannel {
    let n: usize = dims.iter().sum();
    let w = random_unitary(n, rng);
    let weights = random_weights(k, rng);
    let kraus: Vec<ComplexMatrix> = weights
        .iter()
        .map(|&p| {
            let blocks: Vec<ComplexMatrix> = dims.iter().map(|&d| random_unitary(d, rng)).collect();
            let bd = block_diag(&blocks).scale(Complex64::new(p.sqrt(), 0.0));
            w.matmul(&bd)
                .expect("shape")
                .matmul(&w.adjoint())
                .expect("shape")
        })
        .collect();
    KrausChannel::new(n, kraus).expect("construction is structurally valid")
}

/// Trace-preserving (generically non-unital) channel with ★-closed Kraus
/// algebra: independent trace-preserving blocks assembled on a hidden
/// orthogonal split. A full-rank fixed point exists by the per-block
/// Perron-Frobenius theory. The per-block count `k` may exceed `d²` for
/// small blocks, so blocks are built as raw Kraus lists.
pub fn random_block_tp<R: Rng>(dims: &[usize], k: usize, rng: &mut R) -> KrausChannel {
    let n: usize = dims.iter().sum();
    let w = random_unitary(n, rng);
    let per_block: Vec<Vec<ComplexMatrix>> = dims
        .iter()
        .map(|&d| {
            let v = random_isometry(k * d, d, rng);
            (0..k)
                .map(|block| ComplexMatrix::from_fn(d, d, |i, j| v[(block * d + i, j)]))
                .collect()
        })
        .collect();
    let kraus: Vec<ComplexMatrix> = (0..k)
        .map(|i| {
            let blocks: Vec<ComplexMatrix> = per_block.iter().map(|list| list[i].clone()).collect();
            let bd = block_diag(&blocks);
            w.matmul(&bd)
                .expect("shape")
                .matmul(&w.adjoint())
                .expect("shape")
        })
        .collect();
    KrausChannel::new(n, kraus).expect("construction is structurally valid")
}

/// Direct sum of square blocks.
pub fn block_diag(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(at + i, at + j)] = b[(i, j)];
            }
        }
        at += b.rows();
    }
    out
}

fn random_weights<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Brute-force common-eigenvector search: pairs every eigenvector of `a`
/// with the eigenvector condition under `b`. Independent of the kernel
/// machinery, which is exactly why the criteria tests trust it.
pub fn have_common_eigenvector(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool> {
    let ea = eig::eigen(a)?;
    let scale_b = b.frobenius_norm().max(1.0);
    for k in 0..ea.values.len() {
        let v = ea.vectors.column(k);
        // v is a common eigenvector iff bv is parallel to v
        let bv = b.apply_vec(&v)?;
        let mu = vdot(&v, &bv);
        let mut residual = bv.clone();
        for (r, x) in residual.iter_mut().zip(&v) {
            *r -= mu * x;
        }
        if vnorm(&residual) < tol * scale_b {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Plants a common eigenvector into a fresh random pair: both matrices fix
/// `span{Se_1}` where `S` is a random similarity.
pub fn pair_with_common_eigenvector<R: Rng>(
    n: usize,
    rng: &mut R,
) -> (ComplexMatrix, ComplexMatrix) {
    let s = loop {
        let cand = random_matrix(n, n, rng);
        if crate::linalg::det(&cand)
            .map(|d| d.norm() > 1e-6)
            .unwrap_or(false)
        {
            break cand;
        }
    };
    let s_inv = crate::linalg::inverse(&s).expect("invertible by construction");
    let make = |rng: &mut R| {
        let mut t = random_matrix(n, n, rng);
        // zero the strictly-lower part of the first column: e1 stays invariant
        for i in 1..n {
            t[(i, 0)] = Complex64::ZERO;
        }
        s.matmul(&t).expect("shape").matmul(&s_inv).expect("shape")
    };
    (make(rng), make(rng))
}
