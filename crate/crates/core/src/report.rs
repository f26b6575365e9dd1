//! Machine-readable analysis reports and the orchestration that fills them.
//!
//! Reports serialize complex numbers as `[re, im]` pairs, echo every
//! tolerance that influenced a decision, and round-trip losslessly through
//! JSON. Given one fixture, one flag set and one seed, the bytes are
//! reproducible.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{self, generate_basis, is_star_closed};
use crate::channel::KrausChannel;
use crate::criteria::{self, default_primitivity_cap};
use crate::dynamics;
use crate::error::Result;
use crate::fixture::ChannelFixture;
use crate::linalg::ComplexMatrix;

/// Subcommands of the analysis front end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalysisCommand {
    Validate,
    Spectrum,
    Algebra,
    Shemesh,
    Primitivity,
    Predict,
    Simulate,
    Report,
}

impl AnalysisCommand {
    pub fn as_str(&self) -> &'static str {
        match self {
            AnalysisCommand::Validate => "validate",
            AnalysisCommand::Spectrum => "spectrum",
            AnalysisCommand::Algebra => "algebra",
            AnalysisCommand::Shemesh => "shemesh",
            AnalysisCommand::Primitivity => "primitivity",
            AnalysisCommand::Predict => "predict",
            AnalysisCommand::Simulate => "simulate",
            AnalysisCommand::Report => "report",
        }
    }
}

/// Knobs shared by every subcommand.
#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    /// Rank/kernel cutoff (relative).
    pub tol: f64,
    /// Peripheral band width.
    pub peripheral_eps: f64,
    pub seed: u64,
    /// Exclude the empty word from the algebra basis.
    pub no_identity: bool,
    /// Primitivity search cap; defaults to `2n²`.
    pub mmax: Option<usize>,
    /// Trajectory length for `simulate`.
    pub steps: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            peripheral_eps: 1e-6,
            seed: 0,
            no_identity: false,
            mmax: None,
            steps: 200,
        }
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().copied().map(pair).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ToleranceSection {
    /// Relative rank/kernel cutoff.
    pub tol: f64,
    pub peripheral_eps: f64,
    pub seed: u64,
    pub include_identity: bool,
    pub primitivity_mmax: usize,
    pub simulate_steps: usize,
    /// ★-closure residual threshold.
    pub star_closure_tol: f64,
    /// Off-block leakage threshold.
    pub block_leakage_tol: f64,
    /// Residual threshold for validation flags.
    pub validation_tol: f64,
    /// Rational-phase acceptance threshold in cycle detection.
    pub cycle_tol: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ValidationSection {
    pub trace_preserving: bool,
    pub unital: bool,
    pub tp_residual: f64,
    pub unital_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpectrumSection {
    pub eigenvalues: Vec<[f64; 2]>,
    pub peripheral: Vec<[f64; 2]>,
    pub epsilon: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlgebraSection {
    pub dimension: usize,
    pub star_closed: bool,
    pub star_residual: f64,
    pub basis_words: Vec<String>,
    pub commutant_dimension: usize,
    pub irreducible: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BlockSection {
    pub dims: Vec<usize>,
    pub leakage: f64,
    pub irreducible: Vec<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PairwiseShemesh {
    pub first: usize,
    pub second: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GeneralizedShemesh {
    /// Index of the reference operator with distinct eigenvalues.
    pub h_index: usize,
    pub discriminant: [f64; 2],
    pub dim: usize,
    pub basis: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ShemeshSection {
    pub pairwise: Vec<PairwiseShemesh>,
    pub generalized: Option<GeneralizedShemesh>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PrimitivitySection {
    pub certified: bool,
    pub witness_m: Option<usize>,
    pub span_dims: Vec<usize>,
    pub m_max: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PredictionSection {
    pub structure: String,
    pub block_dims: Vec<usize>,
    pub order_bounds: Vec<Vec<u64>>,
    pub period_bound: Option<u64>,
    pub certificates: Vec<String>,
    pub fixed_space_dims: Option<[usize; 2]>,
    pub allowed_points: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AngleEntry {
    pub eigenvalue: [f64; 2],
    pub numer: i64,
    pub denom: u64,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DynamicsSection {
    pub detected_period: Option<u64>,
    pub angles: Vec<AngleEntry>,
    pub trajectory_steps: usize,
    pub trajectory_warnings: Vec<String>,
    /// `‖ρ_{last} - ρ_{last-period}‖_F` when a period was certified and the
    /// trajectory is long enough.
    pub tail_period_residual: Option<f64>,
}

/// Everything a subcommand can report; sections are filled per command.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AnalysisReport {
    pub fixture: String,
    pub command: String,
    pub tool_version: String,
    pub tolerances: ToleranceSection,
    pub validation: Option<ValidationSection>,
    pub spectrum: Option<SpectrumSection>,
    pub algebra: Option<AlgebraSection>,
    pub blocks: Option<BlockSection>,
    pub shemesh: Option<ShemeshSection>,
    pub primitivity: Option<PrimitivitySection>,
    pub prediction: Option<PredictionSection>,
    pub dynamics: Option<DynamicsSection>,
    /// Sections skipped because their preconditions failed, with reasons.
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs one subcommand against a fixture and assembles the report.
pub fn analyze(
    command: AnalysisCommand,
    fixture: &ChannelFixture,
    options: &AnalysisOptions,
) -> Result<AnalysisReport> {
    let channel = fixture.to_channel()?;
    let n = channel.dim();
    let mmax = options.mmax.unwrap_or_else(|| default_primitivity_cap(n));
    let cycle_tol = 1e-6;

    let mut report = AnalysisReport {
        fixture: fixture.name.clone(),
        command: command.as_str().to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        tolerances: ToleranceSection {
            tol: options.tol,
            peripheral_eps: options.peripheral_eps,
            seed: options.seed,
            include_identity: !options.no_identity,
            primitivity_mmax: mmax,
            simulate_steps: options.steps,
            star_closure_tol: 1e-8,
            block_leakage_tol: 1e-7,
            validation_tol: options.tol,
            cycle_tol,
        },
        validation: None,
        spectrum: None,
        algebra: None,
        blocks: None,
        shemesh: None,
        primitivity: None,
        prediction: None,
        dynamics: None,
        notes: Vec::new(),
    };

    let flags = channel.validate(options.tol);
    report.validation = Some(ValidationSection {
        trace_preserving: flags.trace_preserving,
        unital: flags.unital,
        tp_residual: flags.tp_residual,
        unital_residual: flags.unital_residual,
    });

    let best_effort = command == AnalysisCommand::Report;

    if matches!(command, AnalysisCommand::Spectrum | AnalysisCommand::Report) {
        let spec = channel.spectrum(options.peripheral_eps)?;
        report.spectrum = Some(SpectrumSection {
            eigenvalues: pairs(&spec.eigenvalues),
            peripheral: pairs(&spec.peripheral),
            epsilon: spec.epsilon,
        });
    }

    if matches!(command, AnalysisCommand::Algebra | AnalysisCommand::Report) {
        let wb = generate_basis(channel.kraus(), !options.no_identity, options.tol)?;
        let star = is_star_closed(&wb, 1e-8)?;
        let commutant_dim = algebra::commutant(&wb, options.tol)?.len();
        report.algebra = Some(AlgebraSection {
            dimension: wb.dimension(),
            star_closed: star.closed,
            star_residual: star.max_residual,
            basis_words: wb.labels.clone(),
            commutant_dimension: commutant_dim,
            irreducible: algebra::is_irreducible(channel.kraus(), options.tol)?,
        });
        if star.closed {
            let blocks = algebra::block_decompose(channel.kraus(), options.tol, options.seed)?;
            report.blocks = Some(BlockSection {
                dims: blocks.block_dims.clone(),
                leakage: blocks.leakage,
                irreducible: blocks.block_irreducible.clone(),
            });
        } else {
            report
                .notes
                .push("block decomposition skipped: algebra is not ★-closed".to_string());
        }
    }

    if matches!(command, AnalysisCommand::Shemesh | AnalysisCommand::Report) {
        report.shemesh = Some(shemesh_section(&channel, options)?);
    }

    if matches!(
        command,
        AnalysisCommand::Primitivity | AnalysisCommand::Report
    ) {
        let prim = criteria::primitivity(&channel, mmax, options.tol)?;
        report.primitivity = Some(PrimitivitySection {
            certified: prim.certified,
            witness_m: prim.witness_m,
            span_dims: prim.span_dims,
            m_max: mmax,
        });
    }

    if matches!(command, AnalysisCommand::Predict | AnalysisCommand::Report) {
        match criteria::predict_peripheral(&channel, options.seed, options.tol) {
            Ok(prediction) => {
                report.prediction = Some(PredictionSection {
                    structure: prediction.structure.as_str().to_string(),
                    block_dims: prediction.block_dims.clone(),
                    order_bounds: prediction.order_bounds.clone(),
                    period_bound: prediction.period_bound,
                    certificates: prediction.certificates.clone(),
                    fixed_space_dims: prediction.fixed_space_dims.map(|(a, b)| [a, b]),
                    allowed_points: prediction.allowed_points().map(|p| pairs(&p)),
                });
            }
            Err(e) if best_effort && e.is_user_error() => {
                report.notes.push(format!("prediction skipped: {e}"));
            }
            Err(e) => return Err(e),
        }
    }

    if matches!(command, AnalysisCommand::Simulate | AnalysisCommand::Report) {
        match dynamics_section(&channel, options, cycle_tol) {
            Ok(section) => report.dynamics = Some(section),
            Err(e) if best_effort && e.is_user_error() => {
                report.notes.push(format!("dynamics skipped: {e}"));
            }
            Err(e) => return Err(e),
        }
    }

    Ok(report)
}

fn shemesh_section(channel: &KrausChannel, options: &AnalysisOptions) -> Result<ShemeshSection> {
    let kraus = channel.kraus();
    let mut pairwise = Vec::new();
    for i in 0..kraus.len() {
        for j in i + 1..kraus.len() {
            let m = criteria::shemesh(&kraus[i], &kraus[j], options.tol)?;
            pairwise.push(PairwiseShemesh {
                first: i,
                second: j,
                dim: m.dim(),
            });
        }
    }
    // anchor the several-matrix criterion on the first operator with
    // pairwise distinct eigenvalues
    let mut generalized = None;
    for (h_index, h) in kraus.iter().enumerate() {
        let disc = crate::linalg::char_discriminant(h)?;
        let n = channel.dim();
        let scale = h.frobenius_norm().powi((n * (n - 1)) as i32).max(1.0);
        if disc.norm() <= 1e-10 * scale {
            continue;
        }
        let others: Vec<ComplexMatrix> = kraus
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != h_index)
            .map(|(_, a)| a.clone())
            .collect();
        let subspace = criteria::generalized_shemesh(h, &others, options.tol)?;
        let basis = subspace
            .vectors()
            .iter()
            .map(|v| v.iter().copied().map(pair).collect())
            .collect();
        generalized = Some(GeneralizedShemesh {
            h_index,
            discriminant: pair(disc),
            dim: subspace.dim(),
            basis,
        });
        break;
    }
    Ok(ShemeshSection {
        pairwise,
        generalized,
    })
}

fn dynamics_section(
    channel: &KrausChannel,
    options: &AnalysisOptions,
    cycle_tol: f64,
) -> Result<DynamicsSection> {
    let cycle = dynamics::detect_cycle(channel, cycle_tol)?;
    let n = channel.dim();
    let rho0 = ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0));
    let trajectory = dynamics::iterate(channel, &rho0, options.steps)?;
    let tail_period_residual = cycle.period.and_then(|p| {
        let p = p as usize;
        let last = trajectory.states.len() - 1;
        (last >= p)
            .then(|| (&trajectory.states[last] - &trajectory.states[last - p]).frobenius_norm())
    });
    Ok(DynamicsSection {
        detected_period: cycle.period,
        angles: cycle
            .angles
            .iter()
            .map(|a| AngleEntry {
                eigenvalue: pair(a.eigenvalue),
                numer: a.numer,
                denom: a.denom,
                certified: a.certified,
            })
            .collect(),
        trajectory_steps: trajectory.steps,
        trajectory_warnings: trajectory.warnings.clone(),
        tail_period_residual,
    })
}

/// Compact single-line summary for terminals.
pub fn human_summary(report: &AnalysisReport) -> String {
    let mut parts = vec![format!("{} [{}]", report.fixture, report.command)];
    if let Some(v) = &report.validation {
        parts.push(format!("tp={} unital={}", v.trace_preserving, v.unital));
    }
    if let Some(s) = &report.spectrum {
        parts.push(format!("peripheral={}", s.peripheral.len()));
    }
    if let Some(a) = &report.algebra {
        parts.push(format!("dim={} star={}", a.dimension, a.star_closed));
    }
    if let Some(b) = &report.blocks {
        parts.push(format!("blocks={:?}", b.dims));
    }
    if let Some(p) = &report.prediction {
        parts.push(format!(
            "structure={} period_bound={}",
            p.structure,
            p.period_bound
                .map_or("unbounded".to_string(), |x| x.to_string())
        ));
    }
    if let Some(d) = &report.dynamics {
        parts.push(format!(
            "period={}",
            d.detected_period
                .map_or("none certified".to_string(), |x| x.to_string())
        ));
    }
    parts.join("  ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::families;
    use std::collections::BTreeMap;

    fn fixture_of(ch: &KrausChannel, name: &str) -> ChannelFixture {
        ChannelFixture::from_channel(name, ch, BTreeMap::new())
    }

    #[test]
    fn report_round_trips_losslessly() {
        let fixture = fixture_of(&families::example1(1.0), "example1");
        let report = analyze(
            AnalysisCommand::Report,
            &fixture,
            &AnalysisOptions::default(),
        )
        .unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn report_is_deterministic() {
        let fixture = fixture_of(&families::example2(1.0), "example2");
        let opts = AnalysisOptions::default();
        let a = analyze(AnalysisCommand::Report, &fixture, &opts).unwrap();
        let b = analyze(AnalysisCommand::Report, &fixture, &opts).unwrap();
        assert_eq!(a.to_json_pretty(), b.to_json_pretty());
    }

    #[test]
    fn algebra_command_matches_expected_word_basis() {
        let fixture = fixture_of(&families::nonunital_qutrit(), "nonunital_qutrit");
        let opts = AnalysisOptions {
            no_identity: true,
            ..AnalysisOptions::default()
        };
        let report = analyze(AnalysisCommand::Algebra, &fixture, &opts).unwrap();
        let alg = report.algebra.unwrap();
        assert_eq!(alg.dimension, 5);
        assert!(alg.star_closed);
        assert_eq!(alg.basis_words, vec!["1", "2", "11", "12", "21"]);
    }

    #[test]
    fn full_report_on_nonunital_fixture_skips_nothing_essential() {
        let fixture = fixture_of(&families::nonunital_qutrit(), "nonunital_qutrit");
        let report = analyze(
            AnalysisCommand::Report,
            &fixture,
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert!(report.validation.is_some());
        assert!(report.spectrum.is_some());
        assert!(report.blocks.is_some());
        assert!(report.prediction.is_some());
        assert!(report.dynamics.is_some());
        assert!(report.notes.is_empty());
    }
}
