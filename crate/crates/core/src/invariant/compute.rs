//! Chern pairing, the invariant decomposition and its corollaries.

use std::f64::consts::PI;

use serde::Serialize;

use super::model::HamiltonianLoopModel;
use crate::error::{Error, Result};
use crate::geom::{
    integrate_volume, integrate_weighted_phase_forms, Atlas, Chain, Chart, Estimate, Point,
    QuadratureSpec, TransitionPhase, VolumeRegion, Weight,
};
use crate::symp::winding::{winding_number, PhasePath};
use crate::symp::{maslov_index, point_independence_check, MaslovResult, SymplecticMatrix};

/// Relative spread allowed for a boundary Hamiltonian declared constant.
pub const BOUNDARY_SPREAD_TOL: f64 = 1e-6;

/// An overlap chain together with its transition phase.
#[derive(Debug, Clone)]
pub struct Overlap {
    pub chain: Chain,
    pub phase: TransitionPhase,
}

/// Everything `compute_invariant` needs besides the loop.
#[derive(Debug, Clone)]
pub struct InvariantProblem {
    pub label: String,
    pub atlas: Atlas,
    pub overlaps: Vec<Overlap>,
    /// Pieces of `B_i minus the earlier charts`, tagged by chart id.
    pub regions: Vec<VolumeRegion>,
    /// Points per chart id at which Maslov indices are evaluated.
    pub maslov_points: Vec<(usize, Vec<Point>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartTerm {
    pub chart_id: usize,
    pub chart: String,
    pub maslov: MaslovResult,
    pub points_checked: usize,
    pub volume: Estimate,
    /// `J_i * volume`.
    pub term: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTerm {
    pub pair: (usize, usize),
    pub chain: String,
    pub phase_mode: String,
    /// Winding of the phase once around the chain's circle.
    pub phase_winding: i64,
    pub value: Estimate,
    /// Same term with the closed-form time average of the Hamiltonian.
    pub collapsed: Option<f64>,
    /// This chain's share of the Chern pairing.
    pub chern_part: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub label: String,
    pub loop_name: String,
    pub n: usize,
    pub charts: Vec<ChartTerm>,
    pub pairs: Vec<PairTerm>,
    pub maslov_total: f64,
    pub pair_total: f64,
    /// `maslov_total + pair_total`, summed term by term in report order.
    pub total: f64,
    pub error_estimate: f64,
    pub chern: Estimate,
}

impl InvariantReport {
    /// Recomputes the total from the terms in report order.
    pub fn bookkeeping_total(&self) -> f64 {
        let mut acc = 0.0;
        for c in &self.charts {
            acc += c.term.value;
        }
        for p in &self.pairs {
            acc += p.value.value;
        }
        acc
    }

    pub fn pair(&self, i: usize, k: usize) -> Option<&PairTerm> {
        self.pairs.iter().find(|p| p.pair == (i, k))
    }

    pub fn chart(&self, id: usize) -> Option<&ChartTerm> {
        self.charts.iter().find(|c| c.chart_id == id)
    }
}

fn host<'a>(atlas: &'a Atlas, chain: &Chain) -> Result<&'a Chart> {
    atlas.chart(chain.pair.0).ok_or_else(|| {
        Error::InvalidParameter(format!("chain {} refers to a missing chart", chain.name))
    })
}

/// Winding of the phase around the designated circle at the middle of the other parameters.
pub fn chain_phase_winding(
    chain: &Chain,
    phase: &TransitionPhase,
    spec: &QuadratureSpec,
) -> Result<i64> {
    let c = chain
        .circle_direction()
        .ok_or_else(|| Error::InvalidParameter(format!("chain {} has no circle", chain.name)))?;
    let mid: Vec<f64> = chain
        .params()
        .iter()
        .map(|p| {
            let (lo, hi) = p.bounds();
            0.5 * (lo + hi)
        })
        .collect();
    let (lo, hi) = chain.params()[c].bounds();
    let path = PhasePath::sample(
        lo,
        hi,
        |s| {
            let mut u = mid.clone();
            u[c] = s;
            phase.eval(&chain.point(&u)?)
        },
        spec.circle_samples,
        spec.max_refine_depth,
    )?;
    winding_number(&path)
}

/// `(1/2 pi) sum_{i<k} int_{A_ik} dgamma_ik ^ omega^{n-1}`, with `s_ik = e^{i gamma_ik}`.
pub fn chern_pairing(
    atlas: &Atlas,
    overlaps: &[Overlap],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let n = atlas.n();
    let one = |_: &[f64]| 1.0;
    let mut acc = Estimate::exact(0.0);
    for o in overlaps {
        let v = integrate_weighted_phase_forms(
            &o.chain,
            host(atlas, &o.chain)?,
            &[&one],
            &o.phase,
            n - 1,
            spec,
        )?;
        acc = acc.add(v[0].scale(1.0 / (2.0 * PI)));
    }
    Ok(acc)
}

fn maslov_for_chart(
    model: &HamiltonianLoopModel,
    chart: &Chart,
    points: &[Point],
    spec: &QuadratureSpec,
) -> Result<MaslovResult> {
    let loops: Vec<_> = points
        .iter()
        .map(|p| {
            let p = p.clone();
            move |t: f64| -> Result<SymplecticMatrix> { model.linearization(chart, t, &p) }
        })
        .collect();
    match loops.len() {
        0 => Err(Error::InvalidParameter(format!(
            "no Maslov points for chart {}",
            chart.name
        ))),
        1 => maslov_index(&loops[0], spec.maslov_samples),
        _ => {
            let check = point_independence_check(&loops, spec.maslov_samples)?;
            if !check.agree {
                let idx: Vec<i64> = check.results.iter().map(|r| r.index).collect();
                return Err(Error::ValidationFailure(format!(
                    "Maslov index of chart {} depends on the point: {idx:?}",
                    chart.name
                )));
            }
            // Report the sample with the largest residual.
            Ok(check
                .results
                .into_iter()
                .fold(None::<MaslovResult>, |a, r| match a {
                    Some(b) if b.residual >= r.residual => Some(b),
                    _ => Some(r),
                })
                .expect("nonempty"))
        }
    }
}

/// `I = sum_i J_i vol(B_i minus earlier charts) + sum_{i<k} N_ik`, with
/// `N_ik = -(n / 2 pi) int_0^1 dt int_{A_ik} (f_t . psi_t) dgamma_ik ^ omega^{n-1}`.
pub fn compute_invariant(
    problem: &InvariantProblem,
    model: &HamiltonianLoopModel,
    spec: &QuadratureSpec,
) -> Result<InvariantReport> {
    spec.validate()?;
    let atlas = &problem.atlas;
    let n = atlas.n();
    if model.n != n {
        return Err(Error::InvalidParameter(format!(
            "loop of half-dimension {} on a {}-manifold",
            model.n,
            2 * n
        )));
    }
    for c in atlas.charts() {
        if !model.has_invariance_certificate(c.id) {
            return Err(Error::MissingInvarianceCertificate(c.name.clone()));
        }
    }

    let one = |_: &[f64]| 1.0;
    let mut charts = Vec::new();
    for chart in atlas.charts() {
        let points: Vec<Point> = problem
            .maslov_points
            .iter()
            .filter(|(id, _)| *id == chart.id)
            .flat_map(|(_, pts)| pts.iter().cloned())
            .collect();
        let maslov = maslov_for_chart(model, chart, &points, spec)?;
        let mut volume = Estimate::exact(0.0);
        for r in problem.regions.iter().filter(|r| r.chart_id == chart.id) {
            volume = volume.add(integrate_volume(r, chart, &one, spec)?);
        }
        charts.push(ChartTerm {
            chart_id: chart.id,
            chart: chart.name.clone(),
            maslov,
            points_checked: points.len(),
            volume,
            term: volume.scale(maslov.index as f64),
        });
    }

    let averaged = |p: &[f64]| {
        model
            .time_averaged_weight(p, spec.t_order, spec.t_cells)
            .unwrap_or(f64::NAN)
    };
    let collapsed = |p: &[f64]| model.collapsed_weight(p).unwrap_or(f64::NAN);
    let mut pairs = Vec::new();
    let factor = -(n as f64) / (2.0 * PI);
    for o in &problem.overlaps {
        let mut weights: Vec<Weight<'_>> = vec![&averaged, &one];
        if model.has_collapsed_weight() {
            weights.push(&collapsed);
        }
        let ints = integrate_weighted_phase_forms(
            &o.chain,
            host(atlas, &o.chain)?,
            &weights,
            &o.phase,
            n - 1,
            spec,
        )?;
        if !ints[0].value.is_finite() {
            return Err(Error::Integration(format!(
                "non-finite weight on chain {}",
                o.chain.name
            )));
        }
        pairs.push(PairTerm {
            pair: o.chain.pair,
            chain: o.chain.name.clone(),
            phase_mode: o.phase.mode_name().into(),
            phase_winding: chain_phase_winding(&o.chain, &o.phase, spec)?,
            value: ints[0].scale(factor),
            collapsed: ints.get(2).map(|e| e.value * factor),
            chern_part: ints[1].scale(1.0 / (2.0 * PI)),
        });
    }

    let maslov_total: f64 = charts.iter().map(|c| c.term.value).sum();
    let pair_total: f64 = pairs.iter().map(|p| p.value.value).sum();
    let mut report = InvariantReport {
        label: problem.label.clone(),
        loop_name: model.name.clone(),
        n,
        error_estimate: charts.iter().map(|c| c.term.error).sum::<f64>()
            + pairs.iter().map(|p| p.value.error).sum::<f64>(),
        chern: pairs
            .iter()
            .fold(Estimate::exact(0.0), |a, p| a.add(p.chern_part)),
        charts,
        pairs,
        maslov_total,
        pair_total,
        total: 0.0,
    };
    report.total = report.bookkeeping_total();
    Ok(report)
}

/// Two-chart evaluation when `int f_t . psi_t dt` equals `k_const` on the overlap boundary.
pub fn corollary_two_charts(
    j_u: i64,
    j_v: i64,
    vol_u: f64,
    vol_v_minus_u: f64,
    n: usize,
    k_const: f64,
    chern: f64,
) -> f64 {
    j_u as f64 * vol_u + j_v as f64 * vol_v_minus_u - n as f64 * k_const * chern
}

/// Mean of boundary samples, rejected if their relative spread exceeds the tolerance.
pub fn certify_boundary_constant(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("no boundary samples".into()));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let spread = (hi - lo) / mean.abs().max(1.0);
    if spread > BOUNDARY_SPREAD_TOL {
        return Err(Error::NonConstantBoundaryHamiltonian { spread });
    }
    Ok(mean)
}

/// Evaluation when the tangent bundle is trivial off a fixed point `q`.
pub fn corollary_punctured(
    j_u: i64,
    total_volume: f64,
    n: usize,
    f_at_q_integral: f64,
    chern: f64,
) -> f64 {
    j_u as f64 * total_volume - n as f64 * f_at_q_integral * chern
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrableResult {
    /// `-(n / 2 pi) int f dgamma ^ omega^{n-1}` per chain.
    pub z_prime: Vec<Estimate>,
    /// `(1 / 2 pi) int dgamma ^ omega^{n-1}` per chain.
    pub z: Vec<Estimate>,
    pub sum_z_prime: f64,
    pub sum_z: f64,
}

/// Boundary sums for an autonomous Hamiltonian on tubular neighbourhood chains.
pub fn integrable_invariant(
    atlas: &Atlas,
    chains: &[Overlap],
    f: Weight<'_>,
    spec: &QuadratureSpec,
) -> Result<IntegrableResult> {
    let n = atlas.n();
    let one = |_: &[f64]| 1.0;
    let mut z_prime = Vec::new();
    let mut z = Vec::new();
    for o in chains {
        let v = integrate_weighted_phase_forms(
            &o.chain,
            host(atlas, &o.chain)?,
            &[f, &one],
            &o.phase,
            n - 1,
            spec,
        )?;
        z_prime.push(v[0].scale(-(n as f64) / (2.0 * PI)));
        z.push(v[1].scale(1.0 / (2.0 * PI)));
    }
    Ok(IntegrableResult {
        sum_z_prime: z_prime.iter().map(|e| e.value).sum(),
        sum_z: z.iter().map(|e| e.value).sum(),
        z_prime,
        z,
    })
}
