//! Exact integration over the moment trapezoid of Hirzebruch surfaces.

pub mod exact;
pub mod trapezoid;

pub use exact::ExactValue;
pub use trapezoid::{
    boundary_terms_psi, boundary_terms_psi_tilde, chern_pairing_exact, closed_form_invariants,
    manifold_volume, DelzantTrapezoid, MANIFOLD_NORMALIZATION,
};
