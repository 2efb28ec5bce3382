//! Evaluators for the Chern pairing, the loop invariant and its corollaries.

pub mod compute;
pub mod extrapolate;
pub mod model;

pub use compute::{
    certify_boundary_constant, chain_phase_winding, chern_pairing, compute_invariant,
    corollary_punctured, corollary_two_charts, integrable_invariant, ChartTerm, IntegrableResult,
    InvariantProblem, InvariantReport, Overlap, PairTerm,
};
pub use extrapolate::{
    extrapolate_ladder, extrapolate_ladder_in, linear_extrapolation, Extrapolation, LadderReport,
    LadderRung, LinearFit,
};
pub use model::{
    certify_chart_invariance, certify_closed_loop, certify_normalization, Certificate,
    HamiltonianLoopModel, LinearizationMode,
};
