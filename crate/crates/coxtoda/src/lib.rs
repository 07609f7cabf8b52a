//! Coxeter double Bruhat cells of GL_n, the Hankel-determinant inversion of
//! the Moser map, cluster charts Σ(ε) and Coxeter–Toda flows.
//!
//! Algebraic identities run in exact rational arithmetic; only the flows in
//! [`toda`] use floating point.

pub mod cluster;
pub mod config;
pub mod coxeter;
pub mod error;
pub mod gbd;
pub mod io;
pub mod linalg;
pub mod network;
pub mod random;
pub mod toda;
pub mod verify;
pub mod weyl;

pub use error::{CoxError, Result};
