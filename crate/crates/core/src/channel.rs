//! Quantum channels in Kraus form: validation, application, dual,
//! superoperator matrix, spectrum, fixed spaces and full-rank fixed points.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig, hermitian, kernel, ComplexMatrix};

/// Default half-width of the peripheral band: eigenvalues with
/// `|λ| >= 1 - ε` count as peripheral.
pub const DEFAULT_PERIPHERAL_EPS: f64 = 1e-6;

/// A completely positive map `Φ(X) = Σ A_i X A_i†` described by its Kraus
/// operators. Complete positivity is automatic in this form and never
/// re-verified; only trace preservation and unitality are ever checked.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Outcome of [`KrausChannel::validate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationFlags {
    pub trace_preserving: bool,
    pub unital: bool,
    /// `‖Σ A_i†A_i - I‖_F`
    pub tp_residual: f64,
    /// `‖Σ A_iA_i† - I‖_F`
    pub unital_residual: f64,
}

impl ValidationFlags {
    pub fn trace_preserving_or_unital(&self) -> bool {
        self.trace_preserving || self.unital
    }
}

/// Superoperator spectrum with the peripheral part singled out.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// All `n²` eigenvalues, sorted by descending modulus then argument.
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalues with `|λ| >= 1 - epsilon`.
    pub peripheral: Vec<Complex64>,
    /// Unit-Frobenius eigenmatrices matching `peripheral`, phase-fixed so the
    /// largest-modulus entry is real positive.
    pub peripheral_eigenmatrices: Vec<ComplexMatrix>,
    pub epsilon: f64,
}

/// Result of the fixed-point search: either a positive-definite fixed state
/// or the (degenerate) limit the iteration reached.
#[derive(Clone, Debug)]
pub enum FixedPointOutcome {
    FullRank(ComplexMatrix),
    /// No full-rank fixed point found; the limit state and its smallest
    /// eigenvalue are attached.
    Degenerate {
        limit: ComplexMatrix,
        min_eigenvalue: f64,
    },
}

impl FixedPointOutcome {
    pub fn full_rank(&self) -> Option<&ComplexMatrix> {
        match self {
            FixedPointOutcome::FullRank(m) => Some(m),
            FixedPointOutcome::Degenerate { .. } => None,
        }
    }

    pub fn limit(&self) -> &ComplexMatrix {
        match self {
            FixedPointOutcome::FullRank(m) => m,
            FixedPointOutcome::Degenerate { limit, .. } => limit,
        }
    }
}

impl KrausChannel {
    /// Builds a channel after checking the structural invariants:
    /// `1 <= K <= n²` operators, each `n x n`.
    pub fn new(dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Precondition(
                "channel dimension must be positive".into(),
            ));
        }
        if kraus.is_empty() {
            return Err(Error::Precondition(
                "a channel needs at least one Kraus operator".into(),
            ));
        }
        if kraus.len() > dim * dim {
            return Err(Error::Precondition(format!(
                "{} Kraus operators exceed the bound n² = {}",
                kraus.len(),
                dim * dim
            )));
        }
        for (i, a) in kraus.iter().enumerate() {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::Shape(format!(
                    "Kraus operator {i} is {}x{}, expected {dim}x{dim}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(Self { dim, kraus })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    /// Trace-preservation and unitality flags at tolerance `tol`.
    pub fn validate(&self, tol: f64) -> ValidationFlags {
        let n = self.dim;
        let mut tp = ComplexMatrix::zeros(n, n);
        let mut un = ComplexMatrix::zeros(n, n);
        for a in &self.kraus {
            let adj = a.adjoint();
            tp = &tp + &adj.matmul(a).expect("square");
            un = &un + &a.matmul(&adj).expect("square");
        }
        let id = ComplexMatrix::identity(n);
        let tp_residual = (&tp - &id).frobenius_norm();
        let unital_residual = (&un - &id).frobenius_norm();
        ValidationFlags {
            trace_preserving: tp_residual < tol,
            unital: unital_residual < tol,
            tp_residual,
            unital_residual,
        }
    }

    /// `Φ(X) = Σ A_i X A_i†`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(Error::Shape(format!(
                "channel acts on {0}x{0} matrices, got {1}x{2}",
                self.dim,
                x.rows(),
                x.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            out = &out + &a.matmul(x)?.matmul(&a.adjoint())?;
        }
        Ok(out)
    }

    /// The dual map `Φ°(X) = Σ A_i† X A_i`.
    pub fn dual(&self) -> Self {
        Self {
            dim: self.dim,
            kraus: self.kraus.iter().map(|a| a.adjoint()).collect(),
        }
    }

    /// Matrix of the superoperator under column-stacking vectorization:
    /// `Φ̂ = Σ conj(A_i) ⊗ A_i`, so `Φ̂ vec(X) = vec(Φ(X))`.
    pub fn superoperator_matrix(&self) -> ComplexMatrix {
        let n2 = self.dim * self.dim;
        let mut out = ComplexMatrix::zeros(n2, n2);
        for a in &self.kraus {
            out = &out + &a.conj().kron(a);
        }
        out
    }

    /// Full superoperator spectrum with peripheral eigenpairs recovered by
    /// inverse vectorization. `epsilon` must lie in (0, 0.5).
    pub fn spectrum(&self, epsilon: f64) -> Result<SpectrumReport> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Precondition(format!(
                "peripheral band epsilon must lie in (0, 0.5), got {epsilon}"
            )));
        }
        let shat = self.superoperator_matrix();
        let eigdec = eig::eigen(&shat)?;

        let mut sorted = eigdec.values.clone();
        eig::sort_eigenvalues(&mut sorted);

        let mut peripheral = Vec::new();
        let mut eigenmatrices = Vec::new();
        let mut order: Vec<usize> = (0..eigdec.values.len()).collect();
        order.sort_by(|&a, &b| {
            let (za, zb) = (eigdec.values[a], eigdec.values[b]);
            zb.norm()
                .partial_cmp(&za.norm())
                .unwrap()
                .then(za.arg().partial_cmp(&zb.arg()).unwrap())
        });
        for &k in &order {
            let lambda = eigdec.values[k];
            if lambda.norm() < 1.0 - epsilon {
                continue;
            }
            let x = ComplexMatrix::unvectorize(self.dim, &eigdec.vectors.column(k))?;
            let x = fix_phase(&x);
            // peripheral pairs must genuinely satisfy the eigenequation
            let residual = (&self.apply(&x)? - &x.scale(lambda)).frobenius_norm();
            if residual >= 1e-7 {
                return Err(Error::Numerical(format!(
                    "peripheral eigenpair residual {residual:.3e} exceeds 1e-7 for λ = {lambda}"
                )));
            }
            peripheral.push(lambda);
            eigenmatrices.push(x);
        }

        let flags = self.validate(1e-8);
        if flags.trace_preserving_or_unital() {
            if let Some(top) = sorted.first() {
                if top.norm() > 1.0 + 1e-8 {
                    return Err(Error::Numerical(format!(
                        "spectral radius {:.12} exceeds 1 for a trace-preserving/unital channel",
                        top.norm()
                    )));
                }
            }
            if !peripheral
                .iter()
                .any(|z| (z - Complex64::ONE).norm() < 1e-8)
            {
                return Err(Error::Numerical(
                    "eigenvalue 1 missing from the spectrum of a trace-preserving/unital channel"
                        .into(),
                ));
            }
        }

        Ok(SpectrumReport {
            eigenvalues: sorted,
            peripheral,
            peripheral_eigenmatrices: eigenmatrices,
            epsilon,
        })
    }

    /// Orthonormal (Frobenius) basis of the fixed space `{X : Φ(X) = X}`.
    pub fn fixed_space(&self, tol: f64) -> Result<Vec<ComplexMatrix>> {
        let shat = self.superoperator_matrix();
        let minus_id = &shat - &ComplexMatrix::identity(self.dim * self.dim);
        let null = kernel(&minus_id, tol)?;
        null.vectors()
            .iter()
            .map(|v| ComplexMatrix::unvectorize(self.dim, v))
            .collect()
    }

    /// Searches for a positive-definite fixed point by averaged iteration
    /// `ρ <- (ρ + Φ(ρ))/2` from the maximally mixed state. The averaged map
    /// sends every eigenvalue λ of the superoperator to (1+λ)/2, so only the
    /// fixed part survives and convergence is geometric.
    ///
    /// Returns the state iff its smallest eigenvalue exceeds 1e-8; otherwise
    /// the degenerate limit is attached. Requires a trace-preserving or
    /// unital channel.
    pub fn full_rank_fixed_point(&self) -> Result<FixedPointOutcome> {
        let flags = self.validate(1e-8);
        if !flags.trace_preserving_or_unital() {
            return Err(Error::Precondition(
                "fixed-point search requires a trace-preserving or unital channel".into(),
            ));
        }
        let n = self.dim;
        let scale = Complex64::new(1.0 / n as f64, 0.0);
        let mut rho = ComplexMatrix::identity(n).scale(scale);
        let max_iterations = 100_000;
        let mut converged = false;
        for _ in 0..max_iterations {
            let image = self.apply(&rho)?;
            let residual = (&image - &rho).frobenius_norm();
            if residual < 1e-9 {
                converged = true;
                break;
            }
            rho = (&rho + &image).scale(Complex64::new(0.5, 0.0));
            rho = rho.hermitian_part();
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "fixed-point iteration did not reach residual 1e-9 within {max_iterations} steps"
            )));
        }
        let min_ev = hermitian::min_eigenvalue(&rho.hermitian_part())?;
        if min_ev > 1e-8 {
            Ok(FixedPointOutcome::FullRank(rho))
        } else {
            Ok(FixedPointOutcome::Degenerate {
                limit: rho,
                min_eigenvalue: min_ev,
            })
        }
    }
}

/// Normalizes to unit Frobenius norm and rotates the global phase so the
/// largest-modulus entry is real positive; makes reported eigenmatrices
/// deterministic.
pub fn fix_phase(x: &ComplexMatrix) -> ComplexMatrix {
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return x.clone();
    }
    let mut best = Complex64::ZERO;
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            if x[(i, j)].norm() > best.norm() {
                best = x[(i, j)];
            }
        }
    }
    let phase = if best == Complex64::ZERO {
        Complex64::ONE
    } else {
        best.conj() / best.norm()
    };
    x.scale(phase / norm)
}

/// Multiset distance between two eigenvalue lists under greedy minimal-cost
/// pairing; used for conjugation-symmetry and dual-spectrum checks.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut pool: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for z in a {
        let (idx, dist) = pool
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (w - z).norm()))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .expect("nonempty");
        worst = worst.max(dist);
        pool.remove(idx);
    }
    worst
}

/// Convenience: is `1` within `tol` of some entry?
pub fn contains_one(values: &[Complex64], tol: f64) -> bool {
    values.iter().any(|z| (z - Complex64::ONE).norm() < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::families;
    use crate::linalg::SubspaceBasis;
    use crate::random;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn structural_invariants_are_enforced() {
        let too_many = vec![ComplexMatrix::identity(1); 2];
        assert!(KrausChannel::new(1, too_many).is_err());
        let wrong_shape = vec![ComplexMatrix::zeros(2, 3)];
        assert!(KrausChannel::new(2, wrong_shape).is_err());
        assert!(KrausChannel::new(2, vec![]).is_err());
    }

    #[test]
    fn single_unitary_is_tp_and_unital() {
        let u = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let ch = KrausChannel::new(2, vec![u]).unwrap();
        let flags = ch.validate(1e-10);
        assert!(flags.trace_preserving && flags.unital);
    }

    #[test]
    fn identity_channel_applies_trivially() {
        let ch = families::identity_channel(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random::random_matrix(3, 3, &mut rng);
        let y = ch.apply(&x).unwrap();
        assert!((&y - &x).frobenius_norm() < 1e-14);
    }

    #[test]
    fn unital_channel_fixes_identity_and_tp_preserves_trace() {
        let ch = families::example1(std::f64::consts::FRAC_PI_4);
        let id = ComplexMatrix::identity(3);
        assert!((&ch.apply(&id).unwrap() - &id).frobenius_norm() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random::random_density(3, &mut rng);
        let out = ch.apply(&rho).unwrap();
        assert!((out.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn dual_of_dual_is_original() {
        let ch = families::example1(1.0);
        let dd = ch.dual().dual();
        for (a, b) in ch.kraus().iter().zip(dd.kraus()) {
            assert!((a - b).frobenius_norm() < 1e-15);
        }
        // dual of a unital channel is trace preserving
        let flags = ch.dual().validate(1e-10);
        assert!(flags.trace_preserving);
    }

    #[test]
    fn superoperator_of_identity_channel() {
        let ch = families::identity_channel(2);
        let m = ch.superoperator_matrix();
        assert!((&m - &ComplexMatrix::identity(4)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn superoperator_eigenvalues_of_diagonal_unitary_conjugation() {
        let u = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let ch = KrausChannel::new(2, vec![u]).unwrap();
        let spec = ch.spectrum(1e-6).unwrap();
        // eigenvalues are λ_a conj(λ_b) for λ in {1, i}
        let want = vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)];
        assert!(multiset_distance(&spec.eigenvalues, &want) < 1e-10);
    }

    #[test]
    fn superoperator_matches_apply_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ch = random::random_cptp(3, 2, &mut rng);
        let x = random::random_matrix(3, 3, &mut rng);
        let shat = ch.superoperator_matrix();
        let lhs = shat.apply_vec(&x.vectorize()).unwrap();
        let rhs = ch.apply(&x).unwrap().vectorize();
        let diff: f64 = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-10);
    }

    #[test]
    fn depolarizing_spectrum() {
        let ch = families::depolarizing(0.5);
        let spec = ch.spectrum(1e-6).unwrap();
        let want = vec![c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)];
        assert!(multiset_distance(&spec.eigenvalues, &want) < 1e-10);
        assert_eq!(spec.peripheral.len(), 1);
        assert!((spec.peripheral[0] - Complex64::ONE).norm() < 1e-10);
    }

    #[test]
    fn fixed_space_of_identity_channel_is_everything() {
        let ch = families::identity_channel(2);
        assert_eq!(ch.fixed_space(1e-10).unwrap().len(), 4);
    }

    #[test]
    fn fixed_space_of_diagonal_unitary_is_the_commutant() {
        // distinct phases: fixed space is the diagonal algebra
        let u = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        let ch = KrausChannel::new(3, vec![u]).unwrap();
        let fixed = ch.fixed_space(1e-10).unwrap();
        assert_eq!(fixed.len(), 3);
        for x in &fixed {
            // off-diagonal mass vanishes
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        assert!(x[(i, j)].norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn generic_mixed_unitary_has_one_dimensional_fixed_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = random::random_mixed_unitary(3, 3, &mut rng);
        let fixed = ch.fixed_space(1e-8).unwrap();
        assert_eq!(fixed.len(), 1);
        // spanned by the identity
        let x = &fixed[0];
        let t = x.trace() / c(3.0, 0.0);
        let diff = (x - &ComplexMatrix::identity(3).scale(t)).frobenius_norm();
        assert!(diff < 1e-8);
    }

    #[test]
    fn unital_fixed_point_is_maximally_mixed() {
        let ch = families::example1(1.0);
        match ch.full_rank_fixed_point().unwrap() {
            FixedPointOutcome::FullRank(rho) => {
                let target = ComplexMatrix::identity(3).scale(c(1.0 / 3.0, 0.0));
                assert!((&rho - &target).frobenius_norm() < 1e-9);
            }
            FixedPointOutcome::Degenerate { .. } => panic!("unital channel must keep I/n"),
        }
    }

    #[test]
    fn amplitude_damping_has_no_full_rank_fixed_point() {
        let ch = families::amplitude_damping(0.5);
        match ch.full_rank_fixed_point().unwrap() {
            FixedPointOutcome::FullRank(_) => panic!("damping pins the ground state"),
            FixedPointOutcome::Degenerate {
                limit,
                min_eigenvalue,
            } => {
                assert!(min_eigenvalue.abs() < 1e-7);
                let mut ground = ComplexMatrix::zeros(2, 2);
                ground[(0, 0)] = Complex64::ONE;
                assert!((&limit - &ground).frobenius_norm() < 1e-7);
            }
        }
    }

    #[test]
    fn nonunital_fixed_point_is_consistent_with_fixed_space() {
        let ch = families::nonunital_qutrit();
        let outcome = ch.full_rank_fixed_point().unwrap();
        let rho = outcome.limit();
        assert!((&ch.apply(rho).unwrap() - rho).frobenius_norm() < 1e-8);
        // the limit lies in the fixed space
        let fixed = ch.fixed_space(1e-8).unwrap();
        let refs: Vec<&ComplexMatrix> = fixed.iter().collect();
        let columns: Vec<ComplexMatrix> = refs
            .iter()
            .map(|m| ComplexMatrix::new(9, 1, m.vectorize()).unwrap())
            .collect();
        let col_refs: Vec<&ComplexMatrix> = columns.iter().collect();
        let basis =
            SubspaceBasis::from_orthonormal_columns(ComplexMatrix::hstack(&col_refs).unwrap())
                .unwrap();
        assert!(basis.distance(&rho.vectorize()) < 1e-7);
    }

    #[test]
    fn spectrum_rejects_bad_epsilon() {
        let ch = families::identity_channel(2);
        assert!(ch.spectrum(0.7).is_err());
        assert!(ch.spectrum(0.0).is_err());
    }
}
