//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Returns real eigenvalues (ascending) and an orthonormal eigenvector
//! unitary; the block-decomposition code depends on that orthonormality
//! holding to machine precision.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix; `m` is symmetrized as
/// `(M + M†)/2` before iterating.
pub fn eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::Shape("eigh requires a square matrix".into()));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    if n <= 1 {
        let vals = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok((vals, v));
    }

    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * norm {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() <= f64::EPSILON * norm * 1e-2 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                apply_similarity(&mut a, p, q, c, s, phase);
                apply_column_rotation(&mut v, p, q, c, s, phase);
            }
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not settle in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[x].partial_cmp(&diag[y]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigh(m)?.0[0])
}

// J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane.

fn apply_column_rotation(
    m: &mut ComplexMatrix,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    phase: Complex64,
) {
    let pinv = phase.conj();
    for r in 0..m.rows() {
        let x = m[(r, p)];
        let y = m[(r, q)];
        m[(r, p)] = x * c - y * (s * pinv);
        m[(r, q)] = x * s + y * (c * pinv);
    }
}

fn apply_similarity(a: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    apply_column_rotation(a, p, q, c, s, phase);
    // rows with J†
    let n = a.cols();
    for j in 0..n {
        let x = a[(p, j)];
        let y = a[(q, j)];
        a[(p, j)] = x * c - (s * phase) * y;
        a[(q, j)] = x * s + (c * phase) * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonalizes_pauli_y() {
        let sy = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let (vals, vecs) = eigh(&sy).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!(vecs.unitarity_residual() < 1e-13);
        // reconstruct
        let d = ComplexMatrix::diagonal(&[c(vals[0], 0.0), c(vals[1], 0.0)]);
        let back = vecs.matmul(&d).unwrap().matmul(&vecs.adjoint()).unwrap();
        assert!((&back - &sy).frobenius_norm() < 1e-13);
    }

    #[test]
    fn recovers_clustered_spectrum() {
        // build H = U diag(1, 1, 5) U† from a simple unitary
        let h = 1.0 / 2.0_f64.sqrt();
        let u = ComplexMatrix::from_rows(&[
            vec![c(h, 0.0), c(0.0, h), c(0.0, 0.0)],
            vec![c(0.0, h), c(h, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let d = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(1.0, 0.0), c(5.0, 0.0)]);
        let m = u.matmul(&d).unwrap().matmul(&u.adjoint()).unwrap();
        let (vals, _) = eigh(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!((vals[2] - 5.0).abs() < 1e-12);
    }
}
