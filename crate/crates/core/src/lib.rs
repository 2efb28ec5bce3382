//! Characteristic number of Hamiltonian loops on closed symplectic manifolds,
//! computed from Maslov indices of the linearized flow in invariant charts and
//! weighted integrals of transition phases over chart overlaps.

pub mod cli;
pub mod error;
pub mod geom;
pub mod invariant;
pub mod par;
pub mod scenarios;
pub mod symp;
pub mod toric;

pub use error::{Error, Result};
pub use nalgebra;
pub use num_complex;
