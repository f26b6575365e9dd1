//! Characteristic polynomial and its discriminant by finite arithmetic:
//! Faddeev-LeVerrier for the coefficients, a Sylvester resultant for the
//! discriminant. No root finding is involved, so the discriminant test for
//! repeated eigenvalues stays a purely rational computation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::solve::det;

/// Monic characteristic polynomial coefficients `[1, c1, ..., cn]` of
/// `det(λI - M)`, highest degree first (Faddeev-LeVerrier recurrence).
pub fn char_poly(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Shape(
            "characteristic polynomial requires a square matrix".into(),
        ));
    }
    let n = m.rows();
    let mut coeffs = vec![Complex64::ONE];
    let mut aux = ComplexMatrix::zeros(n, n);
    let mut c = Complex64::ONE;
    for k in 1..=n {
        // M_k = M (M_{k-1} + c_{k-1} I)
        let mut shifted = aux.clone();
        for i in 0..n {
            shifted[(i, i)] += c;
        }
        aux = m.matmul(&shifted)?;
        c = -aux.trace() / (k as f64);
        coeffs.push(c);
    }
    Ok(coeffs)
}

/// Formal derivative of a polynomial given highest-degree-first.
fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    let deg = p.len() - 1;
    (0..deg).map(|i| p[i] * ((deg - i) as f64)).collect()
}

/// Resultant of two polynomials via the Sylvester matrix determinant.
fn resultant(p: &[Complex64], q: &[Complex64]) -> Result<Complex64> {
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    let size = dp + dq;
    if size == 0 {
        return Ok(Complex64::ONE);
    }
    let mut syl = ComplexMatrix::zeros(size, size);
    for row in 0..dq {
        for (j, &coeff) in p.iter().enumerate() {
            syl[(row, row + j)] = coeff;
        }
    }
    for row in 0..dp {
        for (j, &coeff) in q.iter().enumerate() {
            syl[(dq + row, row + j)] = coeff;
        }
    }
    det(&syl)
}

/// Discriminant `Δ = Π_{i<j} (λ_i - λ_j)²` of the characteristic polynomial,
/// computed as `(-1)^{n(n-1)/2} Res(p, p')` for the monic `p`. Zero signals a
/// repeated eigenvalue.
pub fn char_discriminant(m: &ComplexMatrix) -> Result<Complex64> {
    let n = m.rows();
    if !m.is_square() {
        return Err(Error::Shape("discriminant requires a square matrix".into()));
    }
    if n <= 1 {
        return Ok(Complex64::ONE);
    }
    let p = char_poly(m)?;
    let dp = derivative(&p);
    let res = resultant(&p, &dp)?;
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Ok(res * sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn char_poly_of_diag_1_2_3() {
        let m = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let p = char_poly(&m).unwrap();
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
        let want = [1.0, -6.0, 11.0, -6.0];
        for (got, want) in p.iter().zip(want) {
            assert!((got - c(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn discriminant_of_distinct_diagonal() {
        let m = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let d = char_discriminant(&m).unwrap();
        // (1-2)^2 (1-3)^2 (2-3)^2 = 4
        assert!((d - c(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn discriminant_vanishes_on_repeated_eigenvalue() {
        let d = char_discriminant(&ComplexMatrix::identity(2)).unwrap();
        assert!(d.norm() < 1e-14);
    }

    #[test]
    fn discriminant_of_complex_pair() {
        // eigenvalues ±i: disc = (i - (-i))^2 = -4
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let d = char_discriminant(&m).unwrap();
        assert!((d - c(-4.0, 0.0)).norm() < 1e-12);
    }
}
