//! Operational criteria on Kraus operators: common-eigenvector subspaces,
//! standard polynomial identities, primitivity certificates, invertibility
//! of the operator span, and the peripheral-spectrum prediction pipeline
//! that combines them.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{block_decompose, generate_basis, is_star_closed};
use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{
    char_discriminant, intersect, kernel, singular_values_and_right_vectors, ComplexMatrix,
    SubspaceBasis,
};
use crate::random;

/// Smallest subspace containing all common eigenvectors of `a` and `b`:
/// the intersection of `ker [a^k, b^l]` over `1 <= k, l <= n-1`.
///
/// Nonzero dimension certifies a common eigenvector; the subspace is
/// invariant under both matrices and they commute on it.
pub fn shemesh(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<SubspaceBasis> {
    let n = square_dim_pair(a, b)?;
    if n == 1 {
        return Ok(SubspaceBasis::full(1));
    }
    let mut kernels = Vec::new();
    let a_powers = powers(a, n - 1)?;
    let b_powers = powers(b, n - 1)?;
    for ak in &a_powers {
        for bl in &b_powers {
            kernels.push(commutator_kernel(ak, bl, tol)?);
        }
    }
    intersect(&kernels, tol)
}

/// Kernel of `[x, y]`, treating a commutator that vanishes at the rounding
/// scale of the factors (`‖[x,y]‖ <= tol ‖x‖ ‖y‖`) as exactly zero.
fn commutator_kernel(x: &ComplexMatrix, y: &ComplexMatrix, tol: f64) -> Result<SubspaceBasis> {
    let comm = x.commutator(y)?;
    let scale = x.frobenius_norm() * y.frobenius_norm();
    if comm.frobenius_norm() <= tol * scale {
        return Ok(SubspaceBasis::full(x.rows()));
    }
    kernel(&comm, tol)
}

/// Common-eigenvector criterion for several matrices: requires `h` to have
/// pairwise distinct eigenvalues (checked through the characteristic
/// discriminant) and intersects `ker [h^k, a_i]` for `1 <= k <= n-1`.
///
/// The discriminant test uses `|Δ| > 1e-10 * scale` with
/// `scale = max(1, ‖H‖_F^{n(n-1)})`, matching the degree of Δ in the entries.
pub fn generalized_shemesh(
    h: &ComplexMatrix,
    others: &[ComplexMatrix],
    tol: f64,
) -> Result<SubspaceBasis> {
    if !h.is_square() {
        return Err(Error::Shape(
            "generalized_shemesh requires square matrices".into(),
        ));
    }
    let n = h.rows();
    for (i, a) in others.iter().enumerate() {
        if a.rows() != n || a.cols() != n {
            return Err(Error::Shape(format!(
                "matrix {i} is {}x{}, expected {n}x{n}",
                a.rows(),
                a.cols()
            )));
        }
    }
    let disc = char_discriminant(h)?;
    let scale = h.frobenius_norm().powi((n * (n - 1)) as i32).max(1.0);
    if disc.norm() <= 1e-10 * scale {
        return Err(Error::Precondition(format!(
            "reference matrix must have pairwise distinct eigenvalues; \
             discriminant {:.3e} is below 1e-10 * scale",
            disc.norm()
        )));
    }
    if n == 1 || others.is_empty() {
        return Ok(SubspaceBasis::full(n));
    }
    let mut kernels = Vec::new();
    for hk in &powers(h, n - 1)? {
        for a in others {
            kernels.push(commutator_kernel(hk, a, tol)?);
        }
    }
    intersect(&kernels, tol)
}

/// Alternating sum over all permutations: `Σ sign(σ) X_{σ(1)} ... X_{σ(m)}`
/// via Heap's algorithm. Capped at `m <= 8` (8! = 40320 products).
pub fn standard_polynomial(mats: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let m = mats.len();
    if m == 0 {
        return Err(Error::Precondition(
            "standard polynomial of zero matrices".into(),
        ));
    }
    if m > 8 {
        return Err(Error::Limit(format!(
            "standard polynomial is capped at 8 arguments, got {m}"
        )));
    }
    let (r, c) = (mats[0].rows(), mats[0].cols());
    if r != c || mats.iter().any(|x| x.rows() != r || x.cols() != c) {
        return Err(Error::Shape(
            "standard polynomial needs same-size square matrices".into(),
        ));
    }

    let mut acc = ComplexMatrix::zeros(r, c);
    let mut idx: Vec<usize> = (0..m).collect();
    let mut sign = 1.0f64;
    let add_term = |perm: &[usize], sign: f64, acc: &mut ComplexMatrix| -> Result<()> {
        let mut prod = mats[perm[0]].clone();
        for &k in &perm[1..] {
            prod = prod.matmul(&mats[k])?;
        }
        *acc = &*acc + &prod.scale(Complex64::new(sign, 0.0));
        Ok(())
    };
    add_term(&idx, sign, &mut acc)?;

    // Heap's algorithm; each step is a single transposition, flipping parity.
    let mut counters = vec![0usize; m];
    let mut i = 0;
    while i < m {
        if counters[i] < i {
            if i % 2 == 0 {
                idx.swap(0, i);
            } else {
                idx.swap(counters[i], i);
            }
            sign = -sign;
            add_term(&idx, sign, &mut acc)?;
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(acc)
}

/// The four-term commutator-like combination
/// `V = U_i U_j U_i† U_j† - U_i† U_j U_i U_j† + U_i† U_j† U_i U_j - U_i U_j† U_i† U_j`
/// together with the flag `‖V + V†‖_F > 1e-8`. A true flag rules the
/// two-dimensional full matrix algebra out of the block decomposition of the
/// algebra generated by the unitaries.
pub fn mixed_unitary_v(ui: &ComplexMatrix, uj: &ComplexMatrix) -> Result<(ComplexMatrix, bool)> {
    square_dim_pair(ui, uj)?;
    for (name, u) in [("first", ui), ("second", uj)] {
        let res = u.unitarity_residual();
        if res > 1e-8 {
            return Err(Error::Precondition(format!(
                "{name} argument is not unitary (residual {res:.3e})"
            )));
        }
    }
    let uid = ui.adjoint();
    let ujd = uj.adjoint();
    let term = |a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix, d: &ComplexMatrix| {
        a.matmul(b).unwrap().matmul(c).unwrap().matmul(d).unwrap()
    };
    let v = &(&term(ui, uj, &uid, &ujd) - &term(&uid, uj, ui, &ujd))
        + &(&term(&uid, &ujd, ui, uj) - &term(ui, &ujd, &uid, uj));
    let hermitian_part_nonzero = (&v + &v.adjoint()).frobenius_norm() > 1e-8;
    Ok((v, hermitian_part_nonzero))
}

/// Primitivity certificate search.
#[derive(Clone, Debug)]
pub struct PrimitivityReport {
    /// True once some `S_m` spans all of `M_n`; false is *not* a proof of
    /// non-primitivity.
    pub certified: bool,
    pub witness_m: Option<usize>,
    /// dim `S_m` for `m = 1..` up to the stop level.
    pub span_dims: Vec<usize>,
}

/// Default search cap for [`primitivity`].
pub fn default_primitivity_cap(n: usize) -> usize {
    2 * n * n
}

/// Computes `dim S_m` for the spans of length-`m` Kraus words through the
/// recursion `S_{m+1} = span{A_i S_m}`, certifying primitivity at the first
/// `m` with `dim = n²`. Stops early when `S_{m+1} ⊆ S_m` (the chain is then
/// stuck forever).
pub fn primitivity(ch: &KrausChannel, m_max: usize, tol: f64) -> Result<PrimitivityReport> {
    if m_max < 1 {
        return Err(Error::Precondition("primitivity needs m_max >= 1".into()));
    }
    let n2 = ch.dim() * ch.dim();
    let extraction = crate::linalg::basis_extract(ch.kraus(), tol)?;
    let mut current: Vec<ComplexMatrix> = extraction
        .selected
        .iter()
        .map(|&i| ch.kraus()[i].clone())
        .collect();
    let mut span_dims = vec![current.len()];
    if current.len() == n2 {
        return Ok(PrimitivityReport {
            certified: true,
            witness_m: Some(1),
            span_dims,
        });
    }
    for m in 2..=m_max {
        let mut candidates = Vec::with_capacity(ch.num_kraus() * current.len());
        for a in ch.kraus() {
            for e in &current {
                candidates.push(a.matmul(e)?);
            }
        }
        // stabilization check against the previous span
        let mut builder = crate::linalg::SpanBuilder::new(n2, tol);
        for e in &current {
            builder.admit(&e.vectorize())?;
        }
        let stuck = candidates
            .iter()
            .all(|cand| builder.residual(&cand.vectorize()) < tol * cand.frobenius_norm().max(1.0));

        let extraction = crate::linalg::basis_extract(&candidates, tol)?;
        let next: Vec<ComplexMatrix> = extraction
            .selected
            .iter()
            .map(|&i| candidates[i].clone())
            .collect();
        span_dims.push(next.len());
        if next.len() == n2 {
            return Ok(PrimitivityReport {
                certified: true,
                witness_m: Some(m),
                span_dims,
            });
        }
        if stuck {
            break;
        }
        current = next;
    }
    Ok(PrimitivityReport {
        certified: false,
        witness_m: None,
        span_dims,
    })
}

/// Randomized test for an invertible element of `span{A_i}`: samples
/// `trials` complex-Gaussian combinations and accepts when some combination
/// has `σ_min > 1e-8 σ_max`. The determinant is a polynomial in the
/// coefficients, so a generic sample decides correctly almost surely.
pub fn invertible_in_span(generators: &[ComplexMatrix], trials: usize, seed: u64) -> Result<bool> {
    if trials == 0 {
        return Err(Error::Precondition(
            "invertible_in_span needs trials >= 1".into(),
        ));
    }
    let n = generators
        .first()
        .ok_or_else(|| Error::Precondition("invertible_in_span needs generators".into()))?
        .rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let mut m = ComplexMatrix::zeros(n, n);
        for g in generators {
            m = &m + &g.scale(random::complex_gaussian(&mut rng));
        }
        let svd = singular_values_and_right_vectors(&m)?;
        let smax = svd.values.first().copied().unwrap_or(0.0);
        let smin = svd.values.last().copied().unwrap_or(0.0);
        if smax > 0.0 && smin > 1e-8 * smax {
            return Ok(true);
        }
    }
    Ok(false)
}

/// How the generated algebra sits inside `M_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraStructure {
    /// The algebra is everything; the channel is irreducible.
    Irreducible,
    /// ★-closed with a nontrivial block decomposition.
    StarBlocks,
    /// Not ★-closed; the structural theorems give no constraint.
    Inconclusive,
}

impl AlgebraStructure {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgebraStructure::Irreducible => "irreducible",
            AlgebraStructure::StarBlocks => "star_blocks",
            AlgebraStructure::Inconclusive => "inconclusive",
        }
    }
}

/// Certified constraints on the peripheral spectrum of a channel.
///
/// `order_bounds[i]` lists the cyclic orders the `i`-th block may realize;
/// the peripheral spectrum is then contained in the union of the matching
/// root-of-unity groups. An empty `order_bounds` means no constraint beyond
/// `|λ| = 1`.
#[derive(Clone, Debug)]
pub struct PeripheralPrediction {
    pub structure: AlgebraStructure,
    pub block_dims: Vec<usize>,
    pub order_bounds: Vec<Vec<u64>>,
    /// Least common multiple of the largest allowed orders; `None` when the
    /// analysis yields no bound.
    pub period_bound: Option<u64>,
    /// Named evidence backing the prediction.
    pub certificates: Vec<String>,
    /// `(dim χ_F(Φ), dim χ_F(Φ°))` when the channel is both trace preserving
    /// and unital.
    pub fixed_space_dims: Option<(usize, usize)>,
}

impl PeripheralPrediction {
    /// The allowed peripheral points: the union of the root-of-unity groups
    /// the order bounds permit, or `None` when only `|λ| = 1` is known.
    pub fn allowed_points(&self) -> Option<Vec<Complex64>> {
        if self.order_bounds.is_empty() {
            return None;
        }
        let mut points: Vec<Complex64> = Vec::new();
        for orders in &self.order_bounds {
            for &m in orders {
                for k in 0..m {
                    let angle = 2.0 * std::f64::consts::PI * (k as f64) / (m as f64);
                    let z = Complex64::new(angle.cos(), angle.sin());
                    if points.iter().all(|p| (p - z).norm() > 1e-9) {
                        points.push(z);
                    }
                }
            }
        }
        Some(points)
    }

    /// Distance from `lambda` to the nearest allowed point (`None` when the
    /// prediction does not constrain the phases).
    pub fn distance_to_allowed(&self, lambda: Complex64) -> Option<f64> {
        self.allowed_points().map(|points| {
            points
                .iter()
                .map(|p| (p - lambda).norm())
                .fold(f64::INFINITY, f64::min)
        })
    }

    pub fn has_certificate(&self, prefix: &str) -> bool {
        self.certificates.iter().any(|c| c.starts_with(prefix))
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Peripheral-spectrum prediction pipeline.
///
/// Requires the channel to validate as trace preserving or unital (the
/// operative structural hypothesis is ★-closure of the generated algebra,
/// which both properties feed). Steps:
///
/// 1. generate the word basis and test ★-closure;
/// 2. a full algebra certifies irreducibility: one block of size `n`, orders
///    bounded by `n²`, refined to divisors of `n` when the Kraus span
///    contains an invertible element;
/// 3. otherwise a ★-closed algebra is block diagonalized; pairwise distinct
///    block dimensions bound each block's order by `d_i²`, refined per block
///    to divisors of `d_i` when the restricted span contains an invertible
///    element; the period bound is the LCM of the largest allowed orders;
///    coinciding dimensions leave only the `|λ| = 1` constraint;
/// 4. algebras that are not ★-closed are reported inconclusive;
/// 5. a primitivity certificate collapses the prediction to `{1}`;
/// 6. for channels that are both TP and unital, the fixed-space dimensions
///    of the channel and its dual are attached as irreducibility evidence.
pub fn predict_peripheral(ch: &KrausChannel, seed: u64, tol: f64) -> Result<PeripheralPrediction> {
    let flags = ch.validate(1e-8);
    if !flags.trace_preserving_or_unital() {
        return Err(Error::Precondition(format!(
            "prediction requires a trace-preserving or unital channel \
             (residuals: tp {:.3e}, unital {:.3e})",
            flags.tp_residual, flags.unital_residual
        )));
    }
    let n = ch.dim();
    let n2 = (n * n) as u64;
    let mut certificates = Vec::new();

    let wb = generate_basis(ch.kraus(), true, tol)?;
    let star = is_star_closed(&wb, 1e-8)?;
    if star.closed {
        certificates.push("star_closed".to_string());
    }

    if ch.num_kraus() == 2 {
        let m = shemesh(&ch.kraus()[0], &ch.kraus()[1], tol)?;
        if m.is_trivial() {
            certificates.push("shemesh_trivial".to_string());
        }
    }

    let global_invertible = invertible_in_span(ch.kraus(), 16, seed)?;

    let structure;
    let mut block_dims = Vec::new();
    let mut order_bounds: Vec<Vec<u64>> = Vec::new();
    let mut period_bound: Option<u64> = None;

    if wb.dimension() == n * n {
        structure = AlgebraStructure::Irreducible;
        certificates.push("irreducible".to_string());
        block_dims.push(n);
        if global_invertible {
            certificates.push("invertible_span".to_string());
            certificates.push("global_orders_divide_n".to_string());
            order_bounds.push(divisors(n as u64));
        } else {
            order_bounds.push((1..=n2).collect());
        }
        period_bound = order_bounds[0].last().copied();
    } else if star.closed {
        structure = AlgebraStructure::StarBlocks;
        let blocks = block_decompose(ch.kraus(), tol, seed)?;
        block_dims = blocks.block_dims.clone();
        let mut sorted = block_dims.clone();
        sorted.dedup();
        let distinct = sorted.len() == block_dims.len();
        if global_invertible {
            certificates.push("invertible_span".to_string());
            certificates.push("global_orders_divide_n".to_string());
        }
        if distinct {
            let mut bound = 1u64;
            for (i, &d) in block_dims.iter().enumerate() {
                let restricted: Vec<ComplexMatrix> =
                    ch.kraus().iter().map(|a| blocks.restrict(a, i)).collect();
                let d64 = d as u64;
                let orders =
                    if invertible_in_span(&restricted, 16, seed.wrapping_add(i as u64 + 1))? {
                        certificates.push(format!("invertible_span_block_{i}"));
                        divisors(d64)
                    } else {
                        (1..=d64 * d64).collect()
                    };
                bound = lcm(bound, *orders.last().expect("nonempty"));
                order_bounds.push(orders);
            }
            period_bound = Some(bound);
        } else {
            certificates.push("coinciding_block_dims".to_string());
        }
    } else {
        structure = AlgebraStructure::Inconclusive;
    }

    let prim = primitivity(ch, default_primitivity_cap(n), tol)?;
    if prim.certified {
        let m = prim.witness_m.expect("certified");
        certificates.push(format!("primitive_at_m={m}"));
        if order_bounds.is_empty() {
            order_bounds.push(vec![1]);
        } else {
            for orders in &mut order_bounds {
                *orders = vec![1];
            }
        }
        period_bound = Some(1);
    }

    let fixed_space_dims = if flags.trace_preserving && flags.unital {
        let d_fix = ch.fixed_space(tol)?.len();
        let d_dual = ch.dual().fixed_space(tol)?.len();
        Some((d_fix, d_dual))
    } else {
        None
    };

    Ok(PeripheralPrediction {
        structure,
        block_dims,
        order_bounds,
        period_bound,
        certificates,
        fixed_space_dims,
    })
}

fn powers(m: &ComplexMatrix, up_to: usize) -> Result<Vec<ComplexMatrix>> {
    let mut out = Vec::with_capacity(up_to);
    let mut acc = m.clone();
    for _ in 0..up_to {
        out.push(acc.clone());
        acc = acc.matmul(m)?;
    }
    Ok(out)
}

fn square_dim_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::Shape(format!(
            "expected two square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.rows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::families;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shemesh_on_commuting_pair_is_full() {
        let a = ComplexMatrix::from_real_rows(&[
            vec![1.0, 2.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let a2 = a.matmul(&a).unwrap();
        let m = shemesh(&a, &a2, 1e-10).unwrap();
        assert_eq!(m.dim(), 3);
    }

    #[test]
    fn shemesh_on_example1_pair_is_one_dimensional() {
        let ch = families::example1(std::f64::consts::FRAC_PI_4);
        let m = shemesh(&ch.kraus()[0], &ch.kraus()[1], 1e-10).unwrap();
        assert_eq!(m.dim(), 1);
    }

    #[test]
    fn shemesh_on_generic_pair_is_trivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = random::random_matrix(5, 5, &mut rng);
        let b = random::random_matrix(5, 5, &mut rng);
        let m = shemesh(&a, &b, 1e-10).unwrap();
        assert_eq!(m.dim(), 0);
        // brute-force confirmation: no eigenvector of a is one of b
        assert!(!random::have_common_eigenvector(&a, &b, 1e-7).unwrap());
    }

    #[test]
    fn generalized_shemesh_commuting_case() {
        let h = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let h2 = h.matmul(&h).unwrap();
        let m = generalized_shemesh(&h, &[h2], 1e-10).unwrap();
        assert_eq!(m.dim(), 3);
    }

    #[test]
    fn generalized_shemesh_generic_other_is_trivial() {
        let h = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random::random_matrix(3, 3, &mut rng);
        let m = generalized_shemesh(&h, std::slice::from_ref(&a), 1e-10).unwrap();
        assert_eq!(m.dim(), 0);
        assert!(!random::have_common_eigenvector(&h, &a, 1e-7).unwrap());
    }

    #[test]
    fn generalized_shemesh_rejects_degenerate_reference() {
        let h = ComplexMatrix::identity(3);
        let err = generalized_shemesh(&h, &[], 1e-10).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn s2_is_the_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random::random_matrix(3, 3, &mut rng);
        let y = random::random_matrix(3, 3, &mut rng);
        let s2 = standard_polynomial(&[x.clone(), y.clone()]).unwrap();
        let comm = x.commutator(&y).unwrap();
        assert!((&s2 - &comm).frobenius_norm() < 1e-12);
    }

    #[test]
    fn s4_vanishes_on_two_by_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mats: Vec<ComplexMatrix> = (0..4)
            .map(|_| random::random_matrix(2, 2, &mut rng))
            .collect();
        let s4 = standard_polynomial(&mats).unwrap();
        let scale: f64 = mats.iter().map(|m| m.frobenius_norm()).product();
        assert!(s4.frobenius_norm() < 1e-10 * scale.max(1.0));
    }

    #[test]
    fn s4_matches_v_combination_for_unitary_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let ui = random::random_unitary(4, &mut rng);
            let uj = random::random_unitary(4, &mut rng);
            let s4 =
                standard_polynomial(&[ui.clone(), uj.clone(), ui.adjoint(), uj.adjoint()]).unwrap();
            let (v, _) = mixed_unitary_v(&ui, &uj).unwrap();
            let vvd = &v + &v.adjoint();
            assert!((&s4 - &vvd).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn standard_polynomial_guards() {
        assert!(matches!(
            standard_polynomial(&[]),
            Err(Error::Precondition(_))
        ));
        let many = vec![ComplexMatrix::identity(2); 9];
        assert!(matches!(standard_polynomial(&many), Err(Error::Limit(_))));
    }

    #[test]
    fn commuting_unitaries_give_zero_v() {
        let u = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let w = ComplexMatrix::diagonal(&[c(0.0, -1.0), c(1.0, 0.0)]);
        let (v, flag) = mixed_unitary_v(&u, &w).unwrap();
        assert!(v.frobenius_norm() < 1e-12);
        assert!(!flag);
        let (v2, flag2) = mixed_unitary_v(&ComplexMatrix::identity(2), &u).unwrap();
        assert!(v2.frobenius_norm() < 1e-12 && !flag2);
    }

    #[test]
    fn involutive_first_argument_forces_a_vanishing_combination() {
        // U† = U repeats an argument of the alternating sum, so V + V† = 0
        // identically, whatever the second unitary is
        let mut swap = ComplexMatrix::zeros(4, 4);
        swap[(0, 1)] = Complex64::ONE;
        swap[(1, 0)] = Complex64::ONE;
        swap[(2, 2)] = Complex64::ONE;
        swap[(3, 3)] = Complex64::ONE;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let uj = random::random_unitary(4, &mut rng);
        let (v, flag) = mixed_unitary_v(&swap, &uj).unwrap();
        assert!(v.frobenius_norm() < 1e-12);
        assert!(!flag);
    }

    #[test]
    fn cycle_permutation_against_generic_unitary_flags_nonzero_hermitian_part() {
        // non-involutive 4-cycle: the combination survives generically
        let mut cycle = ComplexMatrix::zeros(4, 4);
        for j in 0..4 {
            cycle[((j + 1) % 4, j)] = Complex64::ONE;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let uj = random::random_unitary(4, &mut rng);
        let (v, flag) = mixed_unitary_v(&cycle, &uj).unwrap();
        assert!(flag);
        let s4 = standard_polynomial(&[cycle.clone(), uj.clone(), cycle.adjoint(), uj.adjoint()])
            .unwrap();
        assert!((&s4 - &(&v + &v.adjoint())).frobenius_norm() < 1e-9);
    }

    #[test]
    fn mixed_unitary_v_rejects_non_unitary() {
        let bad = ComplexMatrix::diagonal(&[c(2.0, 0.0), c(1.0, 0.0)]);
        let u = ComplexMatrix::identity(2);
        assert!(matches!(
            mixed_unitary_v(&bad, &u),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn depolarizing_certifies_at_m_equals_one() {
        let ch = families::depolarizing(0.5);
        let report = primitivity(&ch, 8, 1e-10).unwrap();
        assert!(report.certified);
        assert_eq!(report.witness_m, Some(1));
    }

    #[test]
    fn three_pauli_channel_certifies_at_m_equals_two() {
        let ch = families::three_pauli_qubit(&[0.3, 0.3, 0.4]);
        let report = primitivity(&ch, 8, 1e-10).unwrap();
        assert!(report.certified);
        assert_eq!(report.witness_m, Some(2));
        assert_eq!(report.span_dims[0], 3);
    }

    #[test]
    fn example1_is_not_certified() {
        let ch = families::example1(std::f64::consts::FRAC_PI_4);
        let report = primitivity(&ch, 18, 1e-10).unwrap();
        assert!(!report.certified);
    }

    #[test]
    fn invertibility_of_spans() {
        assert!(invertible_in_span(&[ComplexMatrix::identity(2)], 16, 0).unwrap());
        let mut e11 = ComplexMatrix::zeros(2, 2);
        e11[(0, 0)] = Complex64::ONE;
        let mut e22 = ComplexMatrix::zeros(2, 2);
        e22[(1, 1)] = Complex64::ONE;
        assert!(invertible_in_span(&[e11.clone(), e22], 16, 0).unwrap());
        let mut e12 = ComplexMatrix::zeros(2, 2);
        e12[(0, 1)] = Complex64::ONE;
        assert!(!invertible_in_span(&[e11, e12], 16, 0).unwrap());
    }

    #[test]
    fn prediction_for_example1() {
        let ch = families::example1(std::f64::consts::FRAC_PI_4);
        let p = predict_peripheral(&ch, 0, 1e-10).unwrap();
        assert_eq!(p.structure, AlgebraStructure::StarBlocks);
        assert_eq!(p.block_dims, vec![2, 1]);
        assert_eq!(p.period_bound, Some(2));
        let allowed = p.allowed_points().unwrap();
        // {1, -1}
        assert_eq!(allowed.len(), 2);
        assert!(p.distance_to_allowed(c(-1.0, 0.0)).unwrap() < 1e-12);
        assert!(p.distance_to_allowed(c(1.0, 0.0)).unwrap() < 1e-12);
    }

    #[test]
    fn prediction_for_example2() {
        let ch = families::example2(std::f64::consts::FRAC_PI_3);
        let p = predict_peripheral(&ch, 0, 1e-10).unwrap();
        assert_eq!(p.structure, AlgebraStructure::StarBlocks);
        assert_eq!(p.block_dims, vec![2, 1]);
        // every allowed order divides 4 whether or not refinement fires
        let bound = p.period_bound.unwrap();
        assert!(bound <= 4 && 4 % bound == 0, "period bound {bound}");
        assert!(p.distance_to_allowed(Complex64::ONE).unwrap() < 1e-12);
    }

    #[test]
    fn prediction_for_irreducible_qutrit_with_invertible_span() {
        // noncommuting unitary pair, full algebra, invertible span, and a
        // genuinely cyclic peripheral spectrum: orders divide 3
        let ch = families::weyl_shift_qutrit(0.3);
        let p = predict_peripheral(&ch, 0, 1e-10).unwrap();
        assert_eq!(p.structure, AlgebraStructure::Irreducible);
        assert!(p.has_certificate("invertible_span"));
        assert!(p.has_certificate("shemesh_trivial"));
        assert!(!p.has_certificate("primitive_at_m"));
        assert_eq!(p.order_bounds[0], vec![1, 3]);
        assert_eq!(p.period_bound, Some(3));
    }

    #[test]
    fn prediction_collapses_for_certified_primitive_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let ch = random::random_mixed_unitary(3, 2, &mut rng);
        let p = predict_peripheral(&ch, 0, 1e-10).unwrap();
        assert_eq!(p.structure, AlgebraStructure::Irreducible);
        assert!(p.has_certificate("primitive_at_m"));
        assert_eq!(p.period_bound, Some(1));
    }

    #[test]
    fn prediction_rejects_unnormalized_channels() {
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        let ch = KrausChannel::new(2, vec![half]).unwrap();
        assert!(matches!(
            predict_peripheral(&ch, 0, 1e-10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn alternation_of_standard_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random::random_matrix(3, 3, &mut rng);
        let b = random::random_matrix(3, 3, &mut rng);
        let cm = random::random_matrix(3, 3, &mut rng);
        let s_abc = standard_polynomial(&[a.clone(), b.clone(), cm.clone()]).unwrap();
        let s_bac = standard_polynomial(&[b.clone(), a.clone(), cm.clone()]).unwrap();
        assert!((&s_abc + &s_bac).frobenius_norm() < 1e-12);
        let s_aab = standard_polynomial(&[a.clone(), a, b]).unwrap();
        assert!(s_aab.frobenius_norm() < 1e-10);
    }
}
