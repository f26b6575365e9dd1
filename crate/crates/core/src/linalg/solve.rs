//! LU factorization with partial pivoting: linear solves, determinant,
//! inverse.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;

struct Lu {
    factors: ComplexMatrix,
    pivots: Vec<usize>,
    swaps: usize,
    singular: bool,
}

fn factorize(m: &ComplexMatrix) -> Result<Lu> {
    if !m.is_square() {
        return Err(Error::Shape(
            "LU factorization requires a square matrix".into(),
        ));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut pivots = Vec::with_capacity(n);
    let mut swaps = 0;
    let mut singular = false;
    for k in 0..n {
        let (pivot_row, pivot_mag) = (k..n)
            .map(|i| (i, a[(i, k)].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        pivots.push(pivot_row);
        if pivot_mag == 0.0 {
            singular = true;
            continue;
        }
        if pivot_row != k {
            swaps += 1;
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = tmp;
            }
        }
        let pivot = a[(k, k)];
        for i in k + 1..n {
            let factor = a[(i, k)] / pivot;
            a[(i, k)] = factor;
            for j in k + 1..n {
                let akj = a[(k, j)];
                a[(i, j)] -= factor * akj;
            }
        }
    }
    Ok(Lu {
        factors: a,
        pivots,
        swaps,
        singular,
    })
}

/// Determinant via LU.
pub fn det(m: &ComplexMatrix) -> Result<Complex64> {
    let lu = factorize(m)?;
    if lu.singular {
        return Ok(Complex64::ZERO);
    }
    let n = m.rows();
    let mut d = if lu.swaps % 2 == 0 {
        Complex64::ONE
    } else {
        -Complex64::ONE
    };
    for i in 0..n {
        d *= lu.factors[(i, i)];
    }
    Ok(d)
}

/// Solves `A X = B` for `X` with multiple right-hand sides.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::Shape(format!(
            "solve: lhs is {}x{} but rhs has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let lu = factorize(a)?;
    if lu.singular {
        return Err(Error::Numerical(
            "solve: matrix is numerically singular".into(),
        ));
    }
    let n = a.rows();
    let mut x = b.clone();
    // apply row swaps
    for (k, &p) in lu.pivots.iter().enumerate() {
        if p != k {
            for j in 0..x.cols() {
                let tmp = x[(k, j)];
                x[(k, j)] = x[(p, j)];
                x[(p, j)] = tmp;
            }
        }
    }
    // forward substitution (unit lower)
    for j in 0..x.cols() {
        for i in 0..n {
            let mut s = x[(i, j)];
            for k in 0..i {
                s -= lu.factors[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = x[(i, j)];
            for k in i + 1..n {
                s -= lu.factors[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s / lu.factors[(i, i)];
        }
    }
    Ok(x)
}

/// Matrix inverse; errors on numerically singular input.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(m, &ComplexMatrix::identity(m.rows()))
}
