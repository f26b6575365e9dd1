//! General complex eigensolver: Householder Hessenberg reduction followed by
//! explicit shifted QR with Givens rotations and deflation.
//!
//! The iteration accumulates the full Schur transform, so eigenvectors come
//! from a triangular back substitution. Matrices here top out around 36x36
//! (superoperators of qudits), well inside the comfort zone of the plain
//! single-shift algorithm.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{vdot, vnorm, ComplexMatrix};

/// Unitary similarity `M = Q T Q†` with `T` upper triangular.
pub struct SchurDecomposition {
    pub t: ComplexMatrix,
    pub q: ComplexMatrix,
}

impl SchurDecomposition {
    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.t.rows()).map(|i| self.t[(i, i)]).collect()
    }
}

/// Eigenvalues paired with unit right eigenvectors (matrix columns).
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

/// Eigenvalues with algebraic multiplicity, sorted by descending modulus
/// (ties broken by ascending argument).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let schur = schur(m)?;
    let mut vals = schur.diagonal();
    sort_eigenvalues(&mut vals);
    Ok(vals)
}

pub fn sort_eigenvalues(vals: &mut [Complex64]) {
    vals.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap()
            .then(a.arg().partial_cmp(&b.arg()).unwrap())
    });
}

/// Schur decomposition of a square complex matrix.
pub fn schur(m: &ComplexMatrix) -> Result<SchurDecomposition> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition requires a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut t = m.clone();
    let mut q = ComplexMatrix::identity(n);
    if n <= 1 {
        return Ok(SchurDecomposition { t, q });
    }
    hessenberg_in_place(&mut t, &mut q);
    qr_iterate(&mut t, &mut q)?;
    Ok(SchurDecomposition { t, q })
}

/// Eigenvalues and right eigenvectors. Vectors are unit-norm; for defective
/// clusters the back substitution still returns a small-residual vector from
/// the dominant directions.
pub fn eigen(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let schur = schur(m)?;
    let n = schur.t.rows();
    let tnorm = schur.t.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut vectors = ComplexMatrix::zeros(n, n);
    let values = schur.diagonal();
    let small = f64::EPSILON * tnorm;
    for k in 0..n {
        let lambda = values[k];
        let mut y = vec![Complex64::ZERO; n];
        y[k] = Complex64::ONE;
        for j in (0..k).rev() {
            let mut s = Complex64::ZERO;
            for (mcol, ym) in y.iter().enumerate().take(k + 1).skip(j + 1) {
                s += schur.t[(j, mcol)] * ym;
            }
            let mut d = schur.t[(j, j)] - lambda;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[j] = -s / d;
        }
        let mut v = schur.q.apply_vec(&y).expect("shape");
        let nrm = vnorm(&v);
        v.iter_mut().for_each(|z| *z /= nrm);
        vectors.set_column(k, &v);
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Largest residual `‖Mv - λv‖` over the returned eigenpairs.
pub fn max_eigenpair_residual(m: &ComplexMatrix, eig: &EigenDecomposition) -> f64 {
    let mut worst = 0.0f64;
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        let mut mv = m.apply_vec(&v).expect("shape");
        for (a, b) in mv.iter_mut().zip(&v) {
            *a -= lambda * b;
        }
        worst = worst.max(vnorm(&mv));
    }
    worst
}

fn hessenberg_in_place(a: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let mut x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = vnorm(&x);
        if xnorm <= f64::MIN_POSITIVE {
            continue;
        }
        let alpha = if x[0] != Complex64::ZERO {
            -(x[0] / x[0].norm()) * xnorm
        } else {
            Complex64::new(-xnorm, 0.0)
        };
        x[0] -= alpha;
        let vn = vnorm(&x);
        if vn <= f64::EPSILON * xnorm {
            continue;
        }
        let v: Vec<Complex64> = x.iter().map(|z| z / vn).collect();

        // rows k+1.. : A <- (I - 2vv†) A
        for j in k..n {
            let col: Vec<Complex64> = (k + 1..n).map(|i| a[(i, j)]).collect();
            let w = vdot(&v, &col) * 2.0;
            for (off, vi) in v.iter().enumerate() {
                a[(k + 1 + off, j)] -= w * vi;
            }
        }
        // cols k+1.. : A <- A (I - 2vv†)
        for i in 0..n {
            let row: Vec<Complex64> = (k + 1..n).map(|j| a[(i, j)]).collect();
            let w: Complex64 = row.iter().zip(&v).map(|(r, vi)| r * vi).sum::<Complex64>() * 2.0;
            for (off, vi) in v.iter().enumerate() {
                a[(i, k + 1 + off)] -= w * vi.conj();
            }
        }
        // accumulate Q <- Q (I - 2vv†)
        for i in 0..n {
            let row: Vec<Complex64> = (k + 1..n).map(|j| q[(i, j)]).collect();
            let w: Complex64 = row.iter().zip(&v).map(|(r, vi)| r * vi).sum::<Complex64>() * 2.0;
            for (off, vi) in v.iter().enumerate() {
                q[(i, k + 1 + off)] -= w * vi.conj();
            }
        }

        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = Complex64::ZERO;
        }
    }
}

/// Complex Givens rotation (c real, s complex) zeroing `b` against `a`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == Complex64::ZERO {
        return (1.0, Complex64::ZERO);
    }
    if a == Complex64::ZERO {
        return (0.0, Complex64::ONE);
    }
    let scale = a.norm().max(b.norm());
    let an = a.norm() / scale;
    let bn = b.norm() / scale;
    let r = scale * (an * an + bn * bn).sqrt();
    let c = a.norm() / r;
    let s = (a / a.norm()) * b.conj() / r;
    (c, s)
}

fn qr_iterate(h: &mut ComplexMatrix, q: &mut ComplexMatrix) -> Result<()> {
    let n = h.rows();
    let cap = 100 * n * n;
    let hnorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut stalls = 0usize;

    loop {
        // deflate all negligible subdiagonals at once
        for i in 0..n - 1 {
            let tst = h[(i, i)].norm() + h[(i + 1, i + 1)].norm();
            let tst = if tst == 0.0 { hnorm } else { tst };
            if h[(i + 1, i)].norm() <= f64::EPSILON * tst {
                h[(i + 1, i)] = Complex64::ZERO;
            }
        }
        while hi > 0 && h[(hi, hi - 1)] == Complex64::ZERO {
            hi -= 1;
            stalls = 0;
        }
        if hi == 0 {
            return Ok(());
        }
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)] != Complex64::ZERO {
            lo -= 1;
        }

        total += 1;
        if total > cap {
            let mut partial = (0..n).map(|i| h[(i, i)]).collect::<Vec<_>>();
            sort_eigenvalues(&mut partial);
            return Err(Error::EigenNonConvergence {
                iterations: cap,
                deflated: n - 1 - hi,
                size: n,
                partial,
            });
        }

        stalls += 1;
        let shift = if stalls.is_multiple_of(12) {
            // exceptional shift to break symmetric stalls
            Complex64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0) + h[(hi, hi)]
        } else {
            wilkinson_shift(h, hi)
        };

        // explicit single-shift QR step on the active window [lo, hi]
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            rotations.push((c, s));
            rotate_rows(h, i, c, s, n);
        }
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let i = lo + idx;
            rotate_cols(h, i, c, s, i + 1);
            rotate_cols_full(q, i, c, s);
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr_half = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Left-multiplies rows (i, i+1) by [[c, s], [-conj(s), c]] over columns i..n.
fn rotate_rows(h: &mut ComplexMatrix, i: usize, c: f64, s: Complex64, n: usize) {
    for j in i..n {
        let x = h[(i, j)];
        let y = h[(i + 1, j)];
        h[(i, j)] = x * c + s * y;
        h[(i + 1, j)] = -s.conj() * x + y * c;
    }
}

/// Right-multiplies columns (i, i+1) by the adjoint rotation over rows 0..=top.
fn rotate_cols(h: &mut ComplexMatrix, i: usize, c: f64, s: Complex64, top: usize) {
    for r in 0..=top {
        let x = h[(r, i)];
        let y = h[(r, i + 1)];
        h[(r, i)] = x * c + s.conj() * y;
        h[(r, i + 1)] = -s * x + y * c;
    }
}

fn rotate_cols_full(q: &mut ComplexMatrix, i: usize, c: f64, s: Complex64) {
    let rows = q.rows();
    for r in 0..rows {
        let x = q[(r, i)];
        let y = q[(r, i + 1)];
        q[(r, i)] = x * c + s.conj() * y;
        q[(r, i + 1)] = -s * x + y * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ComplexMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_multiset_close(mut got: Vec<Complex64>, mut want: Vec<Complex64>, tol: f64) {
        assert_eq!(got.len(), want.len());
        sort_eigenvalues(&mut got);
        sort_eigenvalues(&mut want);
        // greedy min-cost matching is enough at these separations
        for w in &want {
            let (idx, dist) = got
                .iter()
                .enumerate()
                .map(|(i, g)| (i, (g - w).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert!(
                dist < tol,
                "no eigenvalue near {w} (closest off by {dist:.3e})"
            );
            got.remove(idx);
        }
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let vals = eigenvalues(&ComplexMatrix::identity(3)).unwrap();
        for v in vals {
            assert!((v - Complex64::ONE).norm() < 1e-14);
        }
    }

    #[test]
    fn companion_matrix_of_x2_plus_1() {
        // x^2 + 1 -> companion [[0, -1], [1, 0]]
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let vals = eigenvalues(&m).unwrap();
        assert_multiset_close(vals, vec![c(0.0, 1.0), c(0.0, -1.0)], 1e-12);
    }

    #[test]
    fn diagonal_phases_recovered() {
        let w = c(-0.5, 3.0_f64.sqrt() / 2.0);
        let m = ComplexMatrix::diagonal(&[Complex64::ONE, w, w.conj()]);
        let vals = eigenvalues(&m).unwrap();
        assert_multiset_close(vals, vec![Complex64::ONE, w, w.conj()], 1e-12);
    }

    #[test]
    fn eigenpairs_have_small_residuals() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(2.0, -1.0), c(0.0, 0.3)],
            vec![c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 1.0)],
            vec![c(0.7, 0.0), c(0.2, 0.2), c(3.0, -2.0)],
        ])
        .unwrap();
        let eig = eigen(&m).unwrap();
        let res = max_eigenpair_residual(&m, &eig);
        assert!(res < 1e-8 * m.frobenius_norm(), "residual {res:.3e}");
    }

    #[test]
    fn jordan_block_still_yields_vectors() {
        let m = ComplexMatrix::from_real_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]).unwrap();
        let eig = eigen(&m).unwrap();
        let res = max_eigenpair_residual(&m, &eig);
        assert!(res < 1e-7, "residual {res:.3e}");
        for v in &eig.values {
            assert!((v - c(2.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn schur_is_a_similarity() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.5, 0.5), c(0.0, 2.0), c(1.0, 1.0)],
            vec![c(0.0, 0.0), c(1.0, -1.0), c(2.0, 0.0), c(0.3, 0.0)],
            vec![c(0.2, 0.1), c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.5)],
        ])
        .unwrap();
        let dec = schur(&m).unwrap();
        assert!(dec.q.unitarity_residual() < 1e-12);
        let rebuilt = &dec
            .q
            .matmul(&dec.t)
            .unwrap()
            .matmul(&dec.q.adjoint())
            .unwrap();
        assert!((rebuilt - &m).frobenius_norm() < 1e-10 * m.frobenius_norm().max(1.0));
        // strictly lower part of T vanishes
        for i in 0..4 {
            for j in 0..i {
                assert!(dec.t[(i, j)].norm() < 1e-12);
            }
        }
    }
}
