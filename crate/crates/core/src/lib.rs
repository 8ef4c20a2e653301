//! Finite-dimensional models of C*-inductive locally convex spaces and
//! their partial *-algebra structure.
//!
//! An element of the inductive space is a coherent family of matrices
//! indexed by a finite directed poset, related by injective Schwarz maps.
//! The crate builds such systems, checks their axioms numerically, and
//! verifies the characterizations of bounded elements (order bounds,
//! positive functionals, *-representations) as reproducible reports.

pub mod cli;
pub mod directed;
pub mod elements;
pub mod error;
pub mod functionals;
pub mod mult;
pub mod numerics;
pub mod order;
pub mod pipeline;
pub mod report;
pub mod representations;
pub mod rigged;
pub mod sampling;

pub use directed::{DirectedSystem, Embedding, IndexId, IndexPoset, SystemShape};
pub use elements::{cauchy_limit, BoundedElement, CoherentElement};
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, Tolerance};
pub use report::{Entry, Report, Status};
