//! Analysis of finite-dimensional quantum channels given by Kraus operators.
//!
//! The crate computes superoperator spectra, probes the structure of the
//! algebra generated by the Kraus operators (word bases, closure under the
//! adjoint, block decomposition, common invariant subspaces, standard
//! polynomial identities), and turns that structure into certified
//! constraints on the peripheral spectrum and the asymptotic cycle length of
//! the iterated channel — cross-validated against direct numerical
//! computation.
//!
//! Modules:
//! - [`linalg`]: dense complex matrices, SVD/kernels, eigensolvers, basis
//!   extraction;
//! - [`channel`]: Kraus channels, validation, superoperator, spectrum, fixed
//!   points;
//! - [`algebra`]: word bases, ★-closure, commutant, block diagonalization;
//! - [`criteria`]: common-eigenvector subspaces, standard polynomials,
//!   primitivity, span invertibility, and the prediction pipeline;
//! - [`dynamics`]: trajectories, cycle detection, attractor projector;
//! - [`fixture`] / [`report`]: the JSON interfaces of the CLI.

pub mod algebra;
pub mod channel;
pub mod criteria;
pub mod dynamics;
pub mod error;
pub mod fixture;
pub mod linalg;
pub mod random;
pub mod report;

pub use channel::{KrausChannel, SpectrumReport, ValidationFlags};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;

pub use num_complex::Complex64;
