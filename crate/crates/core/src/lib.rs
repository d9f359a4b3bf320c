//! Adaptive discrete-velocity grids and a steady discrete-velocity BGK solver
//! for rarefied gas flows.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibrium;
pub mod error;
pub mod io;
pub mod kinetic;
pub mod linalg;
pub mod quadrature;
pub mod solver;
pub mod surrogate;
pub mod velocity;

pub use error::{Error, ErrorKind, Result};
