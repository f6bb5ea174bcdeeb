//! Finite-dimensional Stokes-Dirac structures for boundary-controlled
//! port-Hamiltonian systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`dirac`]: Gram spaces, bond pairing, Dirac structure checks.
//! - [`bcs`]: the operator quadruple `(L, K, γ, β)`, Green identity,
//!   boundary-control conditions and the extended structure operator.
//! - [`discretization`]: staggered-grid builders for wave, elasticity, beam and
//!   Maxwell systems.
//! - [`physics`]: constitutive laws, Hamiltonian and the power balance.
//! - [`timestepping`]: the implicit midpoint rule with an energy audit.
//! - [`snapshot`]: text serialization of a [`bcs::PortSystem`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bcs;
pub mod dirac;
pub mod discretization;
pub mod error;
pub mod linalg;
pub mod physics;
pub mod snapshot;
pub mod timestepping;

pub use error::{Error, Result};
