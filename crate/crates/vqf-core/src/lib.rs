//! Analysis of vector-valued quadratic forms Q: R^n -> R^m built from
//! symmetric coefficient matrices.
//!
//! The crate answers three questions about a form, with machine-checkable
//! certificates where it can get them:
//!
//! * does some weighting of the components give a positive definite
//!   matrix, or does the image wrap around the origin
//!   ([`classify::classify`])
//! * is the map onto R^m ([`surjectivity::surjectivity_probe`])
//! * which inputs hit a given target value ([`preimage::solve_preimage`])
//!
//! [`veronese`] carries the supporting geometry: forms factor through the
//! cone of rank-one symmetric matrices, and the embedding there turns
//! statements about Q into statements about linear slices of that cone.
//!
//! Everything is deterministic given the caller's seed: parallel and
//! sequential builds (feature `parallel`, on by default) return identical
//! results.

pub mod classify;
pub mod ensemble;
pub mod error;
mod exec;
pub mod form;
pub mod linalg;
mod lp;
pub mod poly;
pub mod preimage;
pub mod sphere;
pub mod surjectivity;
pub mod sym;
pub mod veronese;

pub use ensemble::{random_form, Ensemble};
pub use error::{Result, VqfError};
pub use form::{coordinate_products, planar_squares, VQForm};
pub use sym::{frobenius, EigenDecomposition, Inertia, SymmetricMatrix};
