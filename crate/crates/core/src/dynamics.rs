//! Iterated channel dynamics: trajectories, empirical cycle detection from
//! the peripheral phases, and the spectral projector onto the attractor
//! space.

use num_complex::Complex64;

use crate::channel::{KrausChannel, DEFAULT_PERIPHERAL_EPS};
use crate::error::{Error, Result};
use crate::linalg::{eig, hermitian, inverse, ComplexMatrix};

/// States visited under repeated application of a channel;
/// `states[k] = Φ^k(ρ₀)`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<ComplexMatrix>,
    pub steps: usize,
    /// Non-fatal issues with the initial state (e.g. a failed positivity
    /// check); the iteration proceeds regardless.
    pub warnings: Vec<String>,
}

/// Rational approximation of one peripheral phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRational {
    pub eigenvalue: Complex64,
    /// `angle/2π ≈ numer/denom` with `denom <= n²`.
    pub numer: i64,
    pub denom: u64,
    /// Whether `|λ^denom - 1| < tol` held.
    pub certified: bool,
}

/// What [`detect_cycle`] concluded.
#[derive(Clone, Debug)]
pub struct CycleReport {
    /// Least common multiple of the certified denominators; `None` when some
    /// peripheral eigenvalue failed certification.
    pub period: Option<u64>,
    pub angles: Vec<PhaseRational>,
}

/// Computes `Φ^k(ρ₀)` for `k = 0..=steps`.
///
/// The initial state should be Hermitian with unit trace; a failed
/// positivity check only adds a warning so the routine stays usable for
/// general operator trajectories.
pub fn iterate(ch: &KrausChannel, rho0: &ComplexMatrix, steps: usize) -> Result<Trajectory> {
    let n = ch.dim();
    if rho0.rows() != n || rho0.cols() != n {
        return Err(Error::Shape(format!(
            "initial state is {}x{}, channel dimension is {n}",
            rho0.rows(),
            rho0.cols()
        )));
    }
    let mut warnings = Vec::new();
    if rho0.hermiticity_residual() > 1e-10 {
        warnings.push("initial state is not Hermitian at 1e-10".to_string());
    } else if let Ok(min_ev) = hermitian::min_eigenvalue(&rho0.hermitian_part()) {
        if min_ev < -1e-10 {
            warnings.push(format!(
                "initial state fails the positivity check (λ_min = {min_ev:.3e})"
            ));
        }
    }
    if (rho0.trace() - Complex64::ONE).norm() > 1e-10 {
        warnings.push("initial state does not have unit trace at 1e-10".to_string());
    }

    let mut states = Vec::with_capacity(steps + 1);
    states.push(rho0.clone());
    let mut current = rho0.clone();
    for _ in 0..steps {
        current = ch.apply(&current)?;
        states.push(current.clone());
    }
    Ok(Trajectory {
        states,
        steps,
        warnings,
    })
}

/// Best rational approximation `p/q` of `x ∈ [0, 1)` with `q <= cap`, by
/// continued fractions.
fn rational_approximation(x: f64, cap: u64) -> (i64, u64) {
    let (mut h0, mut k0) = (0i64, 1u64); // p_{-1}/q_{-1}
    let (mut h1, mut k1) = (1i64, 0u64); // p_0/q_0 placeholders
    let mut frac = x;
    let (mut best_h, mut best_k) = (0i64, 1u64);
    for _ in 0..64 {
        let a = frac.floor();
        let ai = a as i64;
        let h2 = ai
            .checked_mul(h1)
            .and_then(|v| v.checked_add(h0))
            .unwrap_or(i64::MAX);
        let k2 = (ai as u64)
            .checked_mul(k1)
            .and_then(|v| v.checked_add(k0))
            .unwrap_or(u64::MAX);
        if k2 > cap || k2 == 0 {
            break;
        }
        best_h = h2;
        best_k = k2;
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
        let rem = frac - a;
        if rem.abs() < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    (best_h, best_k)
}

/// Recovers the asymptotic cycle length from the peripheral spectrum.
///
/// Each peripheral phase `arg λ / 2π` is approximated by a rational `p/q`
/// with `q <= n²`; the approximation is accepted iff `|λ^q - 1| < tol`. The
/// reported period is the LCM of the accepted denominators, or `None` when
/// any peripheral eigenvalue stays uncertified.
pub fn detect_cycle(ch: &KrausChannel, tol: f64) -> Result<CycleReport> {
    let flags = ch.validate(1e-8);
    if !flags.trace_preserving_or_unital() {
        return Err(Error::Precondition(
            "cycle detection requires a trace-preserving or unital channel".into(),
        ));
    }
    let spectrum = ch.spectrum(DEFAULT_PERIPHERAL_EPS)?;
    let cap = (ch.dim() * ch.dim()) as u64;
    let tau = 2.0 * std::f64::consts::PI;

    let mut period = Some(1u64);
    let mut angles = Vec::with_capacity(spectrum.peripheral.len());
    for &lambda in &spectrum.peripheral {
        let mut x = lambda.arg() / tau;
        if x < 0.0 {
            x += 1.0;
        }
        let (numer, denom) = rational_approximation(x, cap);
        let certified = (lambda.powu(denom as u32) - Complex64::ONE).norm() < tol;
        angles.push(PhaseRational {
            eigenvalue: lambda,
            numer,
            denom,
            certified,
        });
        period = match (period, certified) {
            (Some(p), true) => Some(lcm(p, denom)),
            _ => None,
        };
    }
    Ok(CycleReport { period, angles })
}

/// Spectral projector onto the span of peripheral eigenvectors of the
/// superoperator, built obliquely from matched right and left peripheral
/// eigenvector bases: `P = V (W†V)^{-1} W†`.
///
/// Verifies `‖P² - P‖ < 1e-7` and `‖Φ̂P - PΦ̂‖ < 1e-7`; a failed residual
/// reports a defective peripheral eigenstructure.
pub fn asymptotic_projector(ch: &KrausChannel, epsilon: f64) -> Result<ComplexMatrix> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Precondition(format!(
            "peripheral band epsilon must lie in (0, 0.5), got {epsilon}"
        )));
    }
    let shat = ch.superoperator_matrix();
    let right = eig::eigen(&shat)?;
    let left = eig::eigen(&shat.adjoint())?;

    let cut = 1.0 - epsilon;
    let right_idx: Vec<usize> = (0..right.values.len())
        .filter(|&k| right.values[k].norm() >= cut)
        .collect();
    let left_idx: Vec<usize> = (0..left.values.len())
        .filter(|&k| left.values[k].norm() >= cut)
        .collect();
    if right_idx.len() != left_idx.len() {
        return Err(Error::Numerical(format!(
            "defective peripheral eigenstructure: {} right vs {} left peripheral vectors",
            right_idx.len(),
            left_idx.len()
        )));
    }
    let n2 = shat.rows();
    if right_idx.is_empty() {
        return Ok(ComplexMatrix::zeros(n2, n2));
    }

    let mut v = ComplexMatrix::zeros(n2, right_idx.len());
    for (dst, &k) in right_idx.iter().enumerate() {
        v.set_column(dst, &right.vectors.column(k));
    }
    let mut w = ComplexMatrix::zeros(n2, left_idx.len());
    for (dst, &k) in left_idx.iter().enumerate() {
        w.set_column(dst, &left.vectors.column(k));
    }

    let overlap = w.adjoint().matmul(&v)?;
    let overlap_inv = inverse(&overlap).map_err(|_| {
        Error::Numerical(
            "defective peripheral eigenstructure: left/right overlap is singular".into(),
        )
    })?;
    let p = v.matmul(&overlap_inv)?.matmul(&w.adjoint())?;

    let idem = (&p.matmul(&p)? - &p).frobenius_norm();
    if idem >= 1e-7 {
        return Err(Error::Numerical(format!(
            "projector residual ‖P² - P‖ = {idem:.3e} exceeds 1e-7 (defective peripheral part)"
        )));
    }
    let comm = (&shat.matmul(&p)? - &p.matmul(&shat)?).frobenius_norm();
    if comm >= 1e-7 {
        return Err(Error::Numerical(format!(
            "projector residual ‖Φ̂P - PΦ̂‖ = {comm:.3e} exceeds 1e-7"
        )));
    }
    Ok(p)
}

/// Numerical rank of a projector: eigenvalues of its Hermitian part above ½.
pub fn projector_rank(p: &ComplexMatrix) -> Result<usize> {
    // for an oblique projector the trace equals the rank; round it
    let t = p.trace();
    let r = t.re.round();
    if (t - Complex64::new(r, 0.0)).norm() > 1e-6 {
        return Err(Error::Numerical(format!(
            "projector trace {t} is not close to an integer"
        )));
    }
    Ok(r as usize)
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
