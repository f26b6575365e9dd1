//! Greedy basis extraction over vectorized matrices.
//!
//! The elimination order is the input order: a matrix joins the basis iff its
//! vectorization is not already spanned by the selected ones at the given
//! relative tolerance. Earliest candidate wins ties, which pins down the word
//! bases the algebra module reports.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{vaxpy, vdot, vnorm, ComplexMatrix};

/// Outcome of [`basis_extract`]: which inputs were selected and how every
/// input expands over them.
pub struct BasisExtraction {
    /// Indices (into the input list) of the selected independent subset.
    pub selected: Vec<usize>,
    /// `coordinates[i]` expands input `i` over the selected subset.
    pub coordinates: Vec<Vec<Complex64>>,
}

/// Incrementally maintained orthonormal span with raw-coordinate bookkeeping.
///
/// `admit` Gram-Schmidts the candidate against the current span (with one
/// re-orthogonalization pass) and either absorbs it or reports its expansion
/// coefficients over the previously admitted raw vectors.
pub struct SpanBuilder {
    tol: f64,
    dim: usize,
    ortho: Vec<Vec<Complex64>>,
    /// raw_of_ortho[j] expresses ortho[j] over the admitted raw vectors.
    raw_of_ortho: Vec<Vec<Complex64>>,
}

/// What [`SpanBuilder::admit`] decided about a candidate.
pub enum Admission {
    /// Candidate was independent; it is now basis element with this index.
    Added(usize),
    /// Candidate was already spanned; coefficients over the admitted raws.
    Spanned(Vec<Complex64>),
}

impl SpanBuilder {
    pub fn new(dim: usize, tol: f64) -> Self {
        Self {
            tol,
            dim,
            ortho: Vec::new(),
            raw_of_ortho: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ortho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ortho.is_empty()
    }

    /// Expansion of `v` over the admitted raw vectors, ignoring any residual.
    pub fn project_raw(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut coords = vec![Complex64::ZERO; self.ortho.len()];
        let mut r = v.to_vec();
        for (j, q) in self.ortho.iter().enumerate() {
            let alpha = vdot(q, &r);
            vaxpy(&mut r, alpha, q);
            for (k, c) in self.raw_of_ortho[j].iter().enumerate() {
                coords[k] += alpha * c;
            }
        }
        coords
    }

    /// Residual norm of `v` against the current span.
    pub fn residual(&self, v: &[Complex64]) -> f64 {
        let mut r = v.to_vec();
        for q in &self.ortho {
            let alpha = vdot(q, &r);
            vaxpy(&mut r, alpha, q);
        }
        vnorm(&r)
    }

    pub fn admit(&mut self, v: &[Complex64]) -> Result<Admission> {
        if v.len() != self.dim {
            return Err(Error::Shape(format!(
                "span is over length-{} vectors, candidate has length {}",
                self.dim,
                v.len()
            )));
        }
        let scale = vnorm(v);
        let mut r = v.to_vec();
        let mut coords = vec![Complex64::ZERO; self.ortho.len()];
        for _pass in 0..2 {
            for (j, q) in self.ortho.iter().enumerate() {
                let alpha = vdot(q, &r);
                vaxpy(&mut r, alpha, q);
                for (k, c) in self.raw_of_ortho[j].iter().enumerate() {
                    coords[k] += alpha * c;
                }
            }
        }
        let res = vnorm(&r);
        if res < self.tol * scale.max(1e-300) || scale == 0.0 {
            return Ok(Admission::Spanned(coords));
        }
        // absorb: new orthonormal direction q = r / ‖r‖ expands over raws as
        // (e_new - Σ coords)/‖r‖
        let q: Vec<Complex64> = r.iter().map(|z| z / res).collect();
        let mut raw: Vec<Complex64> = coords.iter().map(|c| -c / res).collect();
        raw.push(Complex64::new(1.0 / res, 0.0));
        for row in &mut self.raw_of_ortho {
            row.push(Complex64::ZERO);
        }
        self.ortho.push(q);
        self.raw_of_ortho.push(raw);
        Ok(Admission::Added(self.ortho.len() - 1))
    }
}

/// Greedy left-to-right independent subset of the vectorized inputs plus a
/// coordinate table expressing every input over that subset.
pub fn basis_extract(mats: &[ComplexMatrix], tol: f64) -> Result<BasisExtraction> {
    if tol <= 0.0 {
        return Err(Error::Precondition("basis_extract requires tol > 0".into()));
    }
    let Some(first) = mats.first() else {
        return Ok(BasisExtraction {
            selected: vec![],
            coordinates: vec![],
        });
    };
    let shape = (first.rows(), first.cols());
    let dim = shape.0 * shape.1;
    let mut builder = SpanBuilder::new(dim, tol);
    let mut selected = Vec::new();
    let mut coordinates = Vec::with_capacity(mats.len());
    for (i, m) in mats.iter().enumerate() {
        if (m.rows(), m.cols()) != shape {
            return Err(Error::Shape(format!(
                "input {i} is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                shape.0,
                shape.1
            )));
        }
        match builder.admit(&m.vectorize())? {
            Admission::Added(idx) => {
                selected.push(i);
                let mut e = vec![Complex64::ZERO; idx + 1];
                e[idx] = Complex64::ONE;
                coordinates.push(e);
            }
            Admission::Spanned(coords) => coordinates.push(coords),
        }
    }
    let total = selected.len();
    for row in &mut coordinates {
        row.resize(total, Complex64::ZERO);
    }
    Ok(BasisExtraction {
        selected,
        coordinates,
    })
}
