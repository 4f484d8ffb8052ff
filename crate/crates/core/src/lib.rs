//! Non-self-adjoint Laplacians on directed weighted graphs.
//!
//! The crate builds the combinatorial Laplacian `Δ`, its formal adjoint, the
//! symmetrized operator `H = Δ + Δ′` and the normalized variants on graphs
//! that satisfy the Kirchhoff condition `β⁺ = β⁻`, and computes the objects
//! used to control their spectra: numerical ranges, the bottom `ν` of their
//! real part, Cheeger constants and their profiles along filtrations.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | graph model, boundaries, connectivity, Kirchhoff check |
//! | [`operators`] | dense operator assembly, Dirichlet restriction, Green's formula |
//! | [`spectral`] | eigensolvers, numerical range sweep, `ν`, norms |
//! | [`isoperimetric`] | Cheeger constants, filtrations, profiles at infinity |
//! | [`verify`] | inequality checks producing pass/fail reports |
//! | [`generators`] | graph families satisfying the Kirchhoff condition |
//! | [`io`] | JSON and CSV formats |

pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod isoperimetric;
pub mod operators;
pub mod rng;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, Edge, VertexId, VertexSubset};
pub use operators::{FunctionVector, Operator, OperatorKind};
