//! Numerical laboratory for scattering on open metric graphs.
//!
//! Networks of one-dimensional bonds joined at vertices, with Neumann or
//! Dirichlet matching conditions and semi-infinite leads, are solved
//! exactly: the crate assembles the complex vertex-condition system at
//! each wavenumber and derives scattering matrices, closed-graph spectra,
//! and resonance poles from it. On top of the solver sit frequency sweeps,
//! determinant phase unwrapping, isoscattering comparison and the
//! transplantation check, plus a CLI and flat-file formats for all of it.
//!
//! The core is generic over the real scalar type (see [`scalar::Scalar`]);
//! the `*64` aliases below fix the double-precision instantiation used by
//! the CLI and the acceptance suite.

// negated comparisons like `!(x > 0)` are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod graph;
pub mod io;
pub mod scalar;
pub mod solver;

pub use scalar::Scalar;

pub type MetricGraph64 = graph::MetricGraph<f64>;
pub type PhysicalConstants64 = graph::PhysicalConstants<f64>;
pub type LossModel64 = solver::LossModel<f64>;
pub type Wavenumber64 = solver::Wavenumber<f64>;
pub type SMatrix64 = solver::SMatrix<f64>;
pub type SpectrumResult64 = solver::SpectrumResult<f64>;
pub type PoleSet64 = solver::PoleSet<f64>;
pub type SweepRecord64 = analysis::SweepRecord<f64>;
pub type ComparisonReport64 = analysis::ComparisonReport<f64>;
pub type TransplantationMatrix64 = analysis::TransplantationMatrix<f64>;
