//! Structure of the algebra generated by a set of matrices: word-basis
//! enumeration, closure under the adjoint, commutant, irreducibility and
//! simultaneous block diagonalization.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    basis::{Admission, SpanBuilder},
    eigh, kernel, ComplexMatrix,
};

/// Word length cap that guarantees the generated algebra has stabilized:
/// `⌈(n² + 3) / 2⌉`.
pub fn word_length_bound(n: usize) -> usize {
    (n * n + 3).div_ceil(2)
}

/// A linearly independent set of words in the generators spanning the
/// generated algebra.
///
/// `labels[i]` records basis element `i` as a string of 1-based generator
/// indices ("12" is `A_1 A_2`); the identity, when included, is the empty
/// word.
#[derive(Clone, Debug)]
pub struct WordBasis {
    pub generators: Vec<ComplexMatrix>,
    pub include_identity: bool,
    pub basis: Vec<ComplexMatrix>,
    pub labels: Vec<String>,
    pub tol: f64,
}

impl WordBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.generators[0].rows()
    }
}

/// Breadth-first word enumeration feeding greedy basis extraction.
///
/// Words are enumerated in length order up to [`word_length_bound`]; a word
/// is extended only if it entered the basis (extensions of spanned words are
/// spanned as well), and enumeration stops early once a whole length level
/// contributes nothing or the dimension hits `n²`.
pub fn generate_basis(
    generators: &[ComplexMatrix],
    include_identity: bool,
    tol: f64,
) -> Result<WordBasis> {
    if generators.is_empty() {
        return Err(Error::Precondition(
            "generate_basis needs at least one generator".into(),
        ));
    }
    let n = generators[0].rows();
    for (i, g) in generators.iter().enumerate() {
        if g.rows() != n || g.cols() != n {
            return Err(Error::Shape(format!(
                "generator {i} is {}x{}, expected {n}x{n}",
                g.rows(),
                g.cols()
            )));
        }
    }
    if tol <= 0.0 {
        return Err(Error::Precondition(
            "generate_basis requires tol > 0".into(),
        ));
    }

    let full = n * n;
    let mut builder = SpanBuilder::new(full, tol);
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    let mut labels: Vec<String> = Vec::new();

    if include_identity {
        let id = ComplexMatrix::identity(n);
        if let Admission::Added(_) = builder.admit(&id.vectorize())? {
            basis.push(id);
            labels.push(String::new());
        }
    }

    // level 1: the generators themselves
    let mut frontier: Vec<(String, ComplexMatrix)> = Vec::new();
    for (g_idx, g) in generators.iter().enumerate() {
        let label = (g_idx + 1).to_string();
        if let Admission::Added(_) = builder.admit(&g.vectorize())? {
            basis.push(g.clone());
            labels.push(label.clone());
            frontier.push((label, g.clone()));
        }
    }

    let max_len = word_length_bound(n);
    let mut level = 1;
    while !frontier.is_empty() && level < max_len && basis.len() < full {
        level += 1;
        let mut next = Vec::new();
        for (label, w) in &frontier {
            for (g_idx, g) in generators.iter().enumerate() {
                let extended = w.matmul(g)?;
                let ext_label = format!("{label}{}", g_idx + 1);
                if let Admission::Added(_) = builder.admit(&extended.vectorize())? {
                    basis.push(extended.clone());
                    labels.push(ext_label.clone());
                    next.push((ext_label, extended));
                }
                if basis.len() == full {
                    break;
                }
            }
            if basis.len() == full {
                break;
            }
        }
        frontier = next; // empty level => chain has stabilized
    }

    Ok(WordBasis {
        generators: generators.to_vec(),
        include_identity,
        basis,
        labels,
        tol,
    })
}

/// Outcome of the ★-closure test.
#[derive(Clone, Debug)]
pub struct StarClosure {
    pub closed: bool,
    /// Worst relative residual of any basis element's adjoint against the span.
    pub max_residual: f64,
    /// Expansion of each generator's adjoint over `WordBasis::basis`
    /// (meaningful when `closed`).
    pub generator_adjoint_coords: Vec<Vec<Complex64>>,
}

/// Tests whether the algebra is closed under Hermitian conjugation: every
/// basis element's adjoint must lie in the span with relative residual below
/// `tol`. Also reports the expansion coefficients of the generators'
/// adjoints in the word basis.
pub fn is_star_closed(wb: &WordBasis, tol: f64) -> Result<StarClosure> {
    let n = wb.ambient();
    let mut builder = SpanBuilder::new(n * n, wb.tol);
    for b in &wb.basis {
        builder.admit(&b.vectorize())?;
    }
    let mut max_residual = 0.0f64;
    for b in &wb.basis {
        let adj = b.adjoint().vectorize();
        let scale = b.frobenius_norm().max(1e-300);
        max_residual = max_residual.max(builder.residual(&adj) / scale);
    }
    let closed = max_residual < tol;

    // builder spans the same space with orthonormal directions ordered like
    // wb.basis, so raw projection coefficients refer to wb.basis directly.
    let mut generator_adjoint_coords = Vec::with_capacity(wb.generators.len());
    for g in &wb.generators {
        let coords = builder.project_raw(&g.adjoint().vectorize());
        generator_adjoint_coords.push(coords);
    }
    Ok(StarClosure {
        closed,
        max_residual,
        generator_adjoint_coords,
    })
}

/// Burnside test: the generators act irreducibly iff the unital word algebra
/// is all of `M_n`.
pub fn is_irreducible(generators: &[ComplexMatrix], tol: f64) -> Result<bool> {
    let n = generators
        .first()
        .ok_or_else(|| Error::Precondition("is_irreducible needs generators".into()))?
        .rows();
    let wb = generate_basis(generators, true, tol)?;
    Ok(wb.dimension() == n * n)
}

/// Orthonormal (Frobenius) basis of `{X : [X, E] = 0 for all E in wb}`,
/// via the kernel of the stacked commutation superoperators.
pub fn commutant(wb: &WordBasis, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let n = wb.ambient();
    let id = ComplexMatrix::identity(n);
    let mut blocks = Vec::with_capacity(wb.basis.len());
    for e in &wb.basis {
        // vec(EX - XE) = (I ⊗ E - Eᵀ ⊗ I) vec(X)
        let op = &id.kron(e) - &e.transpose().kron(&id);
        blocks.push(op);
    }
    let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
    let stacked = ComplexMatrix::vstack(&refs)?;
    let null = kernel(&stacked, tol)?;
    null.vectors()
        .iter()
        .map(|v| ComplexMatrix::unvectorize(n, v))
        .collect()
}

/// Dimension of the commutant of the algebra the generators span.
pub fn commutant_dimension(generators: &[ComplexMatrix], tol: f64) -> Result<usize> {
    let wb = generate_basis(generators, true, tol)?;
    Ok(commutant(&wb, tol)?.len())
}

/// Simultaneous block-diagonal form of a ★-closed generated algebra.
#[derive(Clone, Debug)]
pub struct BlockStructure {
    /// Change of basis; conjugating every generator by it is block diagonal.
    pub unitary: ComplexMatrix,
    /// Block dimensions, descending; they sum to `n`.
    pub block_dims: Vec<usize>,
    /// Whether the restricted generators act irreducibly on each block.
    pub block_irreducible: Vec<bool>,
    /// Largest off-block Frobenius mass over all conjugated generators.
    pub leakage: f64,
}

impl BlockStructure {
    /// Column ranges of each block in the rotated basis.
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::with_capacity(self.block_dims.len());
        let mut at = 0;
        for &d in &self.block_dims {
            out.push(at..at + d);
            at += d;
        }
        out
    }

    /// Restriction of `m` (in original coordinates) to block `i`.
    pub fn restrict(&self, m: &ComplexMatrix, i: usize) -> ComplexMatrix {
        let range = self.block_ranges()[i].clone();
        let cols: Vec<ComplexMatrix> = range
            .clone()
            .map(|j| {
                ComplexMatrix::new(self.unitary.rows(), 1, self.unitary.column(j)).expect("shape")
            })
            .collect();
        let refs: Vec<&ComplexMatrix> = cols.iter().collect();
        let v = ComplexMatrix::hstack(&refs).expect("shape");
        v.adjoint()
            .matmul(m)
            .expect("shape")
            .matmul(&v)
            .expect("shape")
    }
}

/// Finds an orthonormal basis splitting the space into common invariant
/// subspaces on which the generators act irreducibly.
///
/// Requires the generated algebra to be ★-closed (closure tested at 1e-8).
/// A generic Hermitian element of the commutant is eigendecomposed; its
/// eigenvalue clusters (gap above 1e-6) cut invariant subspaces, and each
/// subspace recurses until the restricted word algebra is full. Randomness
/// comes only from the seeded generator, so results are reproducible.
pub fn block_decompose(
    generators: &[ComplexMatrix],
    tol: f64,
    seed: u64,
) -> Result<BlockStructure> {
    let n = generators
        .first()
        .ok_or_else(|| Error::Precondition("block_decompose needs generators".into()))?
        .rows();
    let wb = generate_basis(generators, true, tol)?;
    let closure = is_star_closed(&wb, 1e-8)?;
    if !closure.closed {
        return Err(Error::Structure(format!(
            "generated algebra is not closed under the adjoint (residual {:.3e})",
            closure.max_residual
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks: Vec<(ComplexMatrix, bool)> = Vec::new();
    split_invariant(
        generators.to_vec(),
        ComplexMatrix::identity(n),
        tol,
        &mut rng,
        &mut blocks,
    )?;

    // assemble, largest block first
    blocks.sort_by_key(|(v, _)| std::cmp::Reverse(v.cols()));
    let cols: Vec<&ComplexMatrix> = blocks.iter().map(|(v, _)| v).collect();
    let unitary = ComplexMatrix::hstack(&cols)?;
    let block_dims: Vec<usize> = blocks.iter().map(|(v, _)| v.cols()).collect();
    let block_irreducible: Vec<bool> = blocks.iter().map(|&(_, irr)| irr).collect();

    let structure = BlockStructure {
        unitary,
        block_dims,
        block_irreducible,
        leakage: 0.0,
    };
    let leakage = off_block_leakage(&structure, generators);
    let structure = BlockStructure {
        leakage,
        ..structure
    };
    if leakage > 1e-7 {
        return Err(Error::Numerical(format!(
            "off-block leakage {leakage:.3e} exceeds 1e-7 after decomposition"
        )));
    }
    Ok(structure)
}

/// Largest off-block Frobenius mass of `U† A U` over the generators.
pub fn off_block_leakage(structure: &BlockStructure, generators: &[ComplexMatrix]) -> f64 {
    let ranges = structure.block_ranges();
    let mut worst = 0.0f64;
    for g in generators {
        let rotated = structure
            .unitary
            .adjoint()
            .matmul(g)
            .expect("shape")
            .matmul(&structure.unitary)
            .expect("shape");
        let mut mass = 0.0f64;
        for (bi, ri) in ranges.iter().enumerate() {
            for (bj, rj) in ranges.iter().enumerate() {
                if bi == bj {
                    continue;
                }
                for i in ri.clone() {
                    for j in rj.clone() {
                        mass += rotated[(i, j)].norm_sqr();
                    }
                }
            }
        }
        worst = worst.max(mass.sqrt());
    }
    worst
}

fn split_invariant(
    generators: Vec<ComplexMatrix>,
    embedding: ComplexMatrix,
    tol: f64,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<(ComplexMatrix, bool)>,
) -> Result<()> {
    let d = generators[0].rows();
    if d == 1 {
        out.push((embedding, true));
        return Ok(());
    }
    let wb = generate_basis(&generators, true, tol)?;
    if wb.dimension() == d * d {
        out.push((embedding, true));
        return Ok(());
    }
    let comm = commutant(&wb, tol)?;
    if comm.len() <= 1 {
        // trivial commutant with a deficient algebra contradicts ★-closure
        return Err(Error::Numerical(
            "commutant collapsed while the restricted algebra is not full".into(),
        ));
    }

    // one resample is allowed when the generic element fails to resolve gaps
    for attempt in 0..2 {
        let generic = generic_hermitian_combination(&comm, rng);
        let (values, vectors) = eigh(&generic)?;
        let clusters = cluster_ranges(&values, 1e-6);
        if clusters.len() == 1 {
            if attempt == 0 {
                continue;
            }
            return Err(Error::Numerical(
                "generic commutant element produced no eigenvalue split".into(),
            ));
        }
        for range in clusters {
            let cols: Vec<ComplexMatrix> = range
                .clone()
                .map(|j| ComplexMatrix::new(d, 1, vectors.column(j)).expect("shape"))
                .collect();
            let refs: Vec<&ComplexMatrix> = cols.iter().collect();
            let v = ComplexMatrix::hstack(&refs)?;
            let restricted: Vec<ComplexMatrix> = generators
                .iter()
                .map(|g| {
                    v.adjoint()
                        .matmul(g)
                        .expect("shape")
                        .matmul(&v)
                        .expect("shape")
                })
                .collect();
            let sub_embed = embedding.matmul(&v)?;
            split_invariant(restricted, sub_embed, tol, rng, out)?;
        }
        return Ok(());
    }
    unreachable!("the resample loop always returns");
}

fn generic_hermitian_combination(comm: &[ComplexMatrix], rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let d = comm[0].rows();
    let mut g = ComplexMatrix::zeros(d, d);
    for c in comm {
        let r: f64 = rng.random_range(-1.0..1.0);
        let s: f64 = rng.random_range(-1.0..1.0);
        g = &g + &c.hermitian_part().scale(Complex64::new(r, 0.0));
        g = &g + &c.skew_part_as_hermitian().scale(Complex64::new(s, 0.0));
    }
    g
}

/// Maximal runs of (ascending) eigenvalues separated by gaps above `gap`.
fn cluster_ranges(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > gap {
            out.push(start..i);
            start = i;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::families;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn paulis() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
        let sx = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let sy = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let sz = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        (sx, sy, sz)
    }

    #[test]
    fn single_identity_generator_gives_dimension_one() {
        let wb = generate_basis(&[ComplexMatrix::identity(3)], false, 1e-10).unwrap();
        assert_eq!(wb.dimension(), 1);
    }

    #[test]
    fn two_paulis_generate_all_of_m2() {
        let (sx, sy, _) = paulis();
        let wb = generate_basis(&[sx, sy], false, 1e-10).unwrap();
        assert_eq!(wb.dimension(), 4);
    }

    #[test]
    fn word_basis_of_nonunital_qutrit_channel() {
        let ch = families::nonunital_qutrit();
        let wb = generate_basis(ch.kraus(), false, 1e-10).unwrap();
        assert_eq!(wb.dimension(), 5);
        assert_eq!(wb.labels, vec!["1", "2", "11", "12", "21"]);
    }

    #[test]
    fn word_basis_products_stay_in_span() {
        let ch = families::nonunital_qutrit();
        let wb = generate_basis(ch.kraus(), false, 1e-10).unwrap();
        let mut builder = SpanBuilder::new(9, 1e-10);
        for b in &wb.basis {
            builder.admit(&b.vectorize()).unwrap();
        }
        for a in &wb.basis {
            for b in &wb.basis {
                let prod = a.matmul(b).unwrap();
                let res = builder.residual(&prod.vectorize());
                assert!(res < 1e-8 * prod.frobenius_norm().max(1.0));
            }
        }
    }

    #[test]
    fn unitary_group_generators_are_star_closed() {
        let (sx, _, sz) = paulis();
        let wb = generate_basis(&[sx, sz], true, 1e-10).unwrap();
        let star = is_star_closed(&wb, 1e-8).unwrap();
        assert!(star.closed);
    }

    #[test]
    fn single_nilpotent_generator_is_not_star_closed() {
        let mut e12 = ComplexMatrix::zeros(2, 2);
        e12[(0, 1)] = Complex64::ONE;
        let wb = generate_basis(&[e12], false, 1e-10).unwrap();
        let star = is_star_closed(&wb, 1e-8).unwrap();
        assert!(!star.closed);
    }

    #[test]
    fn irreducibility_by_burnside() {
        let (sx, _, sz) = paulis();
        assert!(is_irreducible(&[sx, sz], 1e-10).unwrap());
        let diag = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(!is_irreducible(&[diag], 1e-10).unwrap());
        let ch = families::example1(std::f64::consts::FRAC_PI_4);
        assert!(!is_irreducible(ch.kraus(), 1e-10).unwrap());
    }

    #[test]
    fn commutant_of_full_algebra_is_scalars() {
        let (sx, _, sz) = paulis();
        let wb = generate_basis(&[sx, sz], true, 1e-10).unwrap();
        let comm = commutant(&wb, 1e-10).unwrap();
        assert_eq!(comm.len(), 1);
    }

    #[test]
    fn commutant_of_scalars_is_everything() {
        let wb = generate_basis(&[ComplexMatrix::identity(3)], true, 1e-10).unwrap();
        let comm = commutant(&wb, 1e-10).unwrap();
        assert_eq!(comm.len(), 9);
    }

    #[test]
    fn commutant_of_nonunital_qutrit_algebra_is_two_dimensional() {
        let ch = families::nonunital_qutrit();
        let wb = generate_basis(ch.kraus(), true, 1e-10).unwrap();
        let comm = commutant(&wb, 1e-10).unwrap();
        assert_eq!(comm.len(), 2);
    }

    #[test]
    fn blocks_of_example1() {
        let ch = families::example1(std::f64::consts::FRAC_PI_4);
        let bs = block_decompose(ch.kraus(), 1e-10, 0).unwrap();
        assert_eq!(bs.block_dims, vec![2, 1]);
        assert!(bs.leakage < 1e-7);
        assert!(bs.unitary.unitarity_residual() < 1e-10);
    }

    #[test]
    fn blocks_of_example2() {
        let ch = families::example2(std::f64::consts::FRAC_PI_3);
        let bs = block_decompose(ch.kraus(), 1e-10, 0).unwrap();
        assert_eq!(bs.block_dims, vec![2, 1]);
    }

    #[test]
    fn full_algebra_is_a_single_block() {
        let (sx, _, sz) = paulis();
        let bs = block_decompose(&[sx, sz], 1e-10, 0).unwrap();
        assert_eq!(bs.block_dims, vec![2]);
        assert!(bs.block_irreducible[0]);
    }

    #[test]
    fn non_star_closed_input_is_rejected() {
        let mut e12 = ComplexMatrix::zeros(2, 2);
        e12[(0, 1)] = Complex64::ONE;
        match block_decompose(&[e12], 1e-10, 0) {
            Err(Error::Structure(_)) => {}
            other => panic!("expected a structure error, got {other:?}"),
        }
    }
}
