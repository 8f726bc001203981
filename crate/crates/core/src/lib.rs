//! Complex-valued graph Laplacians, their Moore-Penrose pseudoinverses,
//! eventual-positivity certificates, and consensus-flow simulation.
//!
//! The crate is organised bottom-up:
//!
//! * [`numkernel`] — dense complex-matrix kernel (eigendecomposition,
//!   pseudoinverse, matrix exponential, linear solves) with explicit
//!   accuracy contracts.
//! * [`netmodel`] — the graph data model: construction, structural
//!   classification, connectivity, and weight-balance checks.
//! * [`spectral`] — Laplacian construction and analysis: pseudoinverse by
//!   two independent routes, corank, the reciprocal-spectrum map, and the
//!   rank-1 exponential limit.
//! * [`reep`] — certification of real eventual exponential positivity by
//!   three independent criteria, plus a cross-audit of the equivalence
//!   chains that the criteria are expected to satisfy.
//! * [`flows`] — simulation of Laplacian, pseudoinverse-Laplacian, and
//!   impedance flows with consensus detection.
//! * [`ingest`] — external data: a canonical JSON graph format, a MATPOWER
//!   case-file subset, and an impedance-network builder.

pub mod flows;
pub mod ingest;
pub mod netmodel;
pub mod numkernel;
pub mod reep;
pub mod spectral;

pub use numkernel::{CMatrix, CVector, Scalar};
