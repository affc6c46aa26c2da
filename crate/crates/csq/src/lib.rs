//! Numerical coherent-state quantization on concrete model spaces.
//!
//! The crate provides closed-form equal-time propagators for a catalog of
//! symplectic and Poisson model spaces, verifies the propagator axioms by
//! adaptive quadrature, realizes the associated finite-dimensional
//! quantization (Toeplitz operators, covariant symbols, star products),
//! computes Chern numbers from 3-point phases on sphere meshes, and checks
//! time-sliced path-integral convergence against connection holonomy.

pub mod axioms;
pub mod chern;
pub mod error;
pub mod models;
pub mod numerics;
pub mod pathint;
pub mod quantize;
pub mod report;
pub mod starprod;

pub use error::{CsqError, Result};
