//! Self-contained dense complex linear algebra: arithmetic, numerical
//! kernels and rank, eigenvalues, and basis extraction.
//!
//! Every rank decision takes an explicit relative tolerance; the crate-wide
//! default is [`DEFAULT_TOL`]. Singular values below `tol * sigma_max` count
//! as zero.

pub mod basis;
pub mod eig;
pub mod hermitian;
pub mod matrix;
pub mod poly;
pub mod solve;
pub mod svd;

pub use basis::{basis_extract, Admission, BasisExtraction, SpanBuilder};
pub use eig::{
    eigen, eigenvalues, schur, sort_eigenvalues, EigenDecomposition, SchurDecomposition,
};
pub use hermitian::{eigh, min_eigenvalue};
pub use matrix::{vaxpy, vdot, vnorm, vscale, ComplexMatrix};
pub use poly::{char_discriminant, char_poly};
pub use solve::{det, inverse, solve};
pub use svd::{rank, singular_values_and_right_vectors, spectral_norm};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative tolerance for rank and kernel decisions.
pub const DEFAULT_TOL: f64 = 1e-10;

/// An orthonormal set of vectors spanning a subspace of `C^ambient_dim`.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    /// `ambient_dim x dim` matrix with orthonormal columns.
    vectors: ComplexMatrix,
}

impl SubspaceBasis {
    /// Wraps columns that are already orthonormal (checked at 1e-8).
    pub fn from_orthonormal_columns(vectors: ComplexMatrix) -> Result<Self> {
        let basis = Self {
            ambient_dim: vectors.rows(),
            vectors,
        };
        if basis.gram_residual() > 1e-8 {
            return Err(Error::Precondition(
                "subspace basis columns are not orthonormal".into(),
            ));
        }
        Ok(basis)
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            vectors: ComplexMatrix::identity(ambient_dim),
        }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            vectors: ComplexMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    /// Basis vectors as matrix columns.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn vectors(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim()).map(|j| self.vectors.column(j)).collect()
    }

    /// Orthogonal projector `B B†` onto the subspace.
    pub fn projector(&self) -> ComplexMatrix {
        self.vectors.matmul(&self.vectors.adjoint()).expect("shape")
    }

    /// `I - B B†`, the projector onto the orthogonal complement.
    pub fn complement_projector(&self) -> ComplexMatrix {
        &ComplexMatrix::identity(self.ambient_dim) - &self.projector()
    }

    /// `‖B†B - I‖_F`; the orthonormality defect.
    pub fn gram_residual(&self) -> f64 {
        let gram = self.vectors.adjoint().matmul(&self.vectors).expect("shape");
        (&gram - &ComplexMatrix::identity(self.dim())).frobenius_norm()
    }

    /// Distance of `v` from the subspace relative to `‖v‖`.
    pub fn distance(&self, v: &[Complex64]) -> f64 {
        let coeffs = self.vectors.adjoint().apply_vec(v).expect("shape");
        let proj = self.vectors.apply_vec(&coeffs).expect("shape");
        let mut r = v.to_vec();
        for (x, p) in r.iter_mut().zip(&proj) {
            *x -= p;
        }
        let nrm = vnorm(v);
        if nrm == 0.0 {
            0.0
        } else {
            vnorm(&r) / nrm
        }
    }
}

/// Orthonormal basis of the numerical null space: directions whose singular
/// value falls below `tol * sigma_max` (or `tol` itself for the zero matrix).
pub fn kernel(m: &ComplexMatrix, tol: f64) -> Result<SubspaceBasis> {
    if tol <= 0.0 {
        return Err(Error::Precondition("kernel requires tol > 0".into()));
    }
    let svd = singular_values_and_right_vectors(m)?;
    let smax = svd.values.first().copied().unwrap_or(0.0);
    let cutoff = tol * if smax > 0.0 { smax } else { 1.0 };
    let n = m.cols();
    let keep: Vec<usize> = (0..n).filter(|&j| svd.values[j] < cutoff).collect();
    let mut basis = ComplexMatrix::zeros(n, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        basis.set_column(dst, &svd.right_vectors.column(src));
    }
    SubspaceBasis::from_orthonormal_columns(basis)
}

/// Orthonormal basis of the intersection of subspaces, computed as the kernel
/// of the stacked orthogonal-complement projectors.
pub fn intersect(bases: &[SubspaceBasis], tol: f64) -> Result<SubspaceBasis> {
    let Some(first) = bases.first() else {
        return Err(Error::Precondition(
            "intersect requires at least one subspace".into(),
        ));
    };
    let ambient = first.ambient_dim();
    if bases.iter().any(|b| b.ambient_dim() != ambient) {
        return Err(Error::Shape(
            "intersect: subspaces live in different ambient dimensions".into(),
        ));
    }
    let complements: Vec<ComplexMatrix> = bases.iter().map(|b| b.complement_projector()).collect();
    let refs: Vec<&ComplexMatrix> = complements.iter().collect();
    let stacked = ComplexMatrix::vstack(&refs)?;
    kernel(&stacked, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_of_zero_matrix_is_everything() {
        let z = ComplexMatrix::zeros(3, 3);
        let k = kernel(&z, 1e-10).unwrap();
        assert_eq!(k.dim(), 3);
        assert!(k.gram_residual() < 1e-12);
    }

    #[test]
    fn kernel_of_invertible_diagonal_is_trivial() {
        let m = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(kernel(&m, 1e-10).unwrap().dim(), 0);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        // rank-2 map of C^4
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0), c(0.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 2.0), c(2.0, 2.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let k = kernel(&m, 1e-10).unwrap();
        assert_eq!(k.dim(), 2);
        for v in k.vectors() {
            assert!(vnorm(&m.apply_vec(&v).unwrap()) < 1e-9 * m.frobenius_norm());
        }
    }

    #[test]
    fn intersect_full_spaces() {
        let full = SubspaceBasis::full(4);
        let got = intersect(&[full.clone(), full], 1e-10).unwrap();
        assert_eq!(got.dim(), 4);
    }

    #[test]
    fn intersect_coordinate_planes() {
        // span{e1, e2} ∩ span{e2, e3} = span{e2}
        let mut a = ComplexMatrix::zeros(3, 2);
        a[(0, 0)] = Complex64::ONE;
        a[(1, 1)] = Complex64::ONE;
        let mut b = ComplexMatrix::zeros(3, 2);
        b[(1, 0)] = Complex64::ONE;
        b[(2, 1)] = Complex64::ONE;
        let got = intersect(
            &[
                SubspaceBasis::from_orthonormal_columns(a).unwrap(),
                SubspaceBasis::from_orthonormal_columns(b).unwrap(),
            ],
            1e-10,
        )
        .unwrap();
        assert_eq!(got.dim(), 1);
        let v = got.vectors()[0].clone();
        assert!(v[0].norm() < 1e-10 && v[2].norm() < 1e-10 && (v[1].norm() - 1.0).abs() < 1e-10);
    }
}
