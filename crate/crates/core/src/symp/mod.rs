//! Symplectic linear algebra: matrices, the circle map, windings and Maslov indices.

pub mod krein;
pub mod maslov;
pub mod matrix;
pub mod winding;

pub use krein::{krein_classify, rho, EigenKind, KreinEigenvalue, KreinSpectrum};
pub use maslov::{maslov_index, point_independence_check, MaslovResult, PointIndependence};
pub use matrix::{standard_j, symplectic_residual, SymplecticMatrix};
pub use winding::{winding_number, PhasePath};
