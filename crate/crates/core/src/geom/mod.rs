//! Charts, overlap chains, transition phases and integration of forms over them.

pub mod chain;
pub mod chart;
pub mod forms;
pub mod phase;
pub mod quadrature;

pub use chain::{build_overlap_chains, Chain, ChainMap};
pub use chart::{Atlas, Chart, ChartMap, ParamKind, Point};
pub use forms::{
    integrate_volume, integrate_weighted_phase_form, integrate_weighted_phase_forms, omega_power,
    Estimate, VolumeRegion, Weight,
};
pub use phase::{
    cocycle_defect, fd_jacobian, transition_phase_from_jacobian, JacobianMode, TransitionPhase,
};
pub use quadrature::{angle_nodes, gauss_legendre, periodic_nodes, QuadratureSpec};
