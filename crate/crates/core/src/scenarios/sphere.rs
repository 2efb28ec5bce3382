//! Rotation of the round sphere of area `4 pi` about its polar axis.
//!
//! Ambient points are unit vectors `(x, y, z)`; the symplectic form is
//! `dphi ^ dz`. The north chart `U = {theta < pi/2 + e}` uses
//! `sqrt(2(1 - z)) e^{i phi}`, the south chart `V = {theta > pi/2 - e}` uses
//! `sqrt(2(1 + z)) e^{-i phi}`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{to_json, Check, ScenarioOutcome};
use crate::error::{Error, Result};
use crate::geom::{
    build_overlap_chains, integrate_volume, Atlas, Chain, Chart, ChartMap, Estimate, JacobianMode,
    ParamKind, Point, QuadratureSpec, TransitionPhase, VolumeRegion,
};
use crate::invariant::{
    certify_boundary_constant, certify_chart_invariance, certify_closed_loop,
    certify_normalization, chern_pairing, compute_invariant, corollary_punctured,
    corollary_two_charts, integrable_invariant, Certificate, HamiltonianLoopModel,
    IntegrableResult, InvariantProblem, InvariantReport, Overlap,
};
use crate::symp::SymplecticMatrix;

pub const NORTH: usize = 0;
pub const SOUTH: usize = 1;
pub const TOTAL_AREA: f64 = 4.0 * PI;

fn sphere_point(z: f64, phi: f64) -> Point {
    let s = (1.0 - z * z).max(0.0).sqrt();
    vec![s * phi.cos(), s * phi.sin(), z]
}

fn polar_angle(p: &[f64]) -> f64 {
    p[2].clamp(-1.0, 1.0).acos()
}

/// Cap chart; `sign = 1` for the north cap, `-1` for the south cap.
struct CapChart {
    sign: f64,
    /// Boundary value of the polar angle.
    theta_edge: f64,
}

impl ChartMap for CapChart {
    fn coords(&self, p: &[f64]) -> Result<Vec<f64>> {
        let z = p[2];
        let r = (2.0 * (1.0 - self.sign * z)).max(0.0).sqrt();
        let phi = p[1].atan2(p[0]);
        Ok(vec![r * phi.cos(), self.sign * r * phi.sin()])
    }

    fn point(&self, x: &[f64]) -> Result<Point> {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 > 4.0 {
            return Err(Error::InvalidParameter(format!(
                "cap coordinates {x:?} out of range"
            )));
        }
        let z = self.sign * (1.0 - 0.5 * r2);
        let phi = (self.sign * x[1]).atan2(x[0]);
        Ok(sphere_point(z, phi))
    }

    fn level(&self, p: &[f64]) -> f64 {
        let theta = polar_angle(p);
        if self.sign > 0.0 {
            self.theta_edge - theta
        } else {
            theta - self.theta_edge
        }
    }
}

/// Band `{-1 + eta < z < 1 - eta}` with action-angle coordinates `(phi, z)`.
struct BandChart {
    eta: f64,
}

impl ChartMap for BandChart {
    fn coords(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![p[1].atan2(p[0]), p[2]])
    }

    fn point(&self, x: &[f64]) -> Result<Point> {
        if x[1].abs() > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "height {} out of range",
                x[1]
            )));
        }
        Ok(sphere_point(x[1], x[0]))
    }

    fn level(&self, p: &[f64]) -> f64 {
        (1.0 - self.eta - p[2]).min(p[2] + 1.0 - self.eta)
    }
}

/// Polar cap `{z > 1 - 2 eta}` (north) or `{z < -1 + 2 eta}` (south).
struct PolarCap {
    sign: f64,
    eta: f64,
}

impl ChartMap for PolarCap {
    fn coords(&self, p: &[f64]) -> Result<Vec<f64>> {
        CapChart {
            sign: self.sign,
            theta_edge: 0.0,
        }
        .coords(p)
    }

    fn point(&self, x: &[f64]) -> Result<Point> {
        CapChart {
            sign: self.sign,
            theta_edge: 0.0,
        }
        .point(x)
    }

    fn level(&self, p: &[f64]) -> f64 {
        self.sign * p[2] - (1.0 - 2.0 * self.eta)
    }
}

fn xy_names(prefix: &str) -> Vec<String> {
    vec![format!("x_{prefix}"), format!("y_{prefix}")]
}

/// Jacobian of north coordinates with respect to south coordinates.
fn north_from_south_jacobian(p: &[f64]) -> Result<DMatrix<f64>> {
    let south = CapChart {
        sign: -1.0,
        theta_edge: 0.0,
    }
    .coords(p)?;
    let (a, b) = (south[0], south[1]);
    let s = a * a + b * b;
    if s <= 0.0 || s >= 4.0 {
        return Err(Error::InvalidParameter("point is not in both caps".into()));
    }
    // north = g(s) (a, -b) with g = sqrt((4 - s) / s)
    let g = ((4.0 - s) / s).sqrt();
    let dg = -0.5 / ((4.0 - s) * s).sqrt() - 0.5 * (4.0 - s).sqrt() / s.powf(1.5);
    Ok(DMatrix::from_row_slice(
        2,
        2,
        &[
            g + 2.0 * a * a * dg,
            2.0 * a * b * dg,
            -2.0 * a * b * dg,
            -g - 2.0 * b * b * dg,
        ],
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereExpected {
    pub j_u: i64,
    pub j_v: i64,
    pub invariant: f64,
    pub chern: f64,
}

pub fn sphere_expected() -> SphereExpected {
    SphereExpected {
        j_u: 1,
        j_v: -1,
        invariant: 0.0,
        chern: 2.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereScenario {
    /// Half-width of the band where the caps overlap, in `(0, pi/2)`.
    pub epsilon_hat: f64,
    /// Height of the tubular neighbourhoods for the integrable evaluation.
    pub eta: f64,
}

impl Default for SphereScenario {
    fn default() -> Self {
        Self {
            epsilon_hat: 0.3,
            eta: 0.1,
        }
    }
}

/// Everything built for the sphere.
#[derive(Debug, Clone)]
pub struct SphereBuild {
    pub problem: InvariantProblem,
    pub model: HamiltonianLoopModel,
    /// Closed-form variant of the cap-to-cap phase.
    pub closed_form_phase: TransitionPhase,
    pub integrable_atlas: Atlas,
    pub integrable_chains: Vec<Overlap>,
}

impl SphereScenario {
    pub fn new(epsilon_hat: f64) -> Result<Self> {
        if !(epsilon_hat > 0.0 && epsilon_hat < FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "epsilon_hat = {epsilon_hat} must lie in (0, pi/2)"
            )));
        }
        Ok(Self {
            epsilon_hat,
            ..Self::default()
        })
    }

    pub fn boundary_height(&self) -> f64 {
        -self.epsilon_hat.sin()
    }

    pub fn atlas(&self) -> Result<Atlas> {
        let e = self.epsilon_hat;
        let north = Chart::new(
            NORTH,
            "U",
            1,
            xy_names("N"),
            vec![None, None],
            Arc::new(CapChart {
                sign: 1.0,
                theta_edge: FRAC_PI_2 + e,
            }),
        )?;
        let south = Chart::new(
            SOUTH,
            "V",
            1,
            xy_names("S"),
            vec![None, None],
            Arc::new(CapChart {
                sign: -1.0,
                theta_edge: FRAC_PI_2 - e,
            }),
        )?;
        Atlas::new(vec![north, south])
    }

    /// Rotation by `2 pi t` with `f = -2 pi z`.
    pub fn loop_model(&self) -> HamiltonianLoopModel {
        fn rotate(p: &[f64], a: f64) -> Point {
            let (s, c) = a.sin_cos();
            vec![c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
        }
        HamiltonianLoopModel::new(
            "rotation",
            1,
            Arc::new(|t, p| Ok(rotate(p, 2.0 * PI * t))),
            Arc::new(|t, p| Ok(rotate(p, -2.0 * PI * t))),
            Arc::new(|_, p| -2.0 * PI * p[2]),
        )
        .with_collapsed_weight(Arc::new(|p| -2.0 * PI * p[2]))
        .with_linearization(Arc::new(|chart: &Chart, t, _| {
            // The north chart sees a rotation by 2 pi t, the south chart by -2 pi t.
            let dir = if chart.id == NORTH { 1.0 } else { -1.0 };
            Ok(SymplecticMatrix::rotation(-dir * 2.0 * PI * t))
        }))
    }

    fn sample_points(
        &self,
        rng: &mut ChaCha8Rng,
        count: usize,
        z_lo: f64,
        z_hi: f64,
    ) -> Vec<Point> {
        (0..count)
            .map(|_| sphere_point(rng.gen_range(z_lo..z_hi), rng.gen_range(0.0..2.0 * PI)))
            .collect()
    }

    pub fn build(&self) -> Result<SphereBuild> {
        let atlas = self.atlas()?;
        let zb = self.boundary_height();
        let mut rng = ChaCha8Rng::seed_from_u64(7);

        let chain = Chain::new(
            "dU.V",
            (NORTH, SOUTH),
            vec![ParamKind::circle(0.0, 2.0 * PI)],
            1.0,
            Some(0),
            Arc::new(move |u| Ok(sphere_point(zb, u[0]))),
        )?;
        let chains = build_overlap_chains(&atlas, vec![chain])?;
        let phase =
            TransitionPhase::from_charts(&atlas, NORTH, SOUTH, JacobianMode::FiniteDifference)?;
        let closed_form_phase = phase.with_mode(JacobianMode::ClosedForm(Arc::new(
            north_from_south_jacobian,
        )));
        let overlaps = chains
            .into_iter()
            .map(|chain| Overlap {
                chain,
                phase: phase.clone(),
            })
            .collect();

        let regions = vec![
            VolumeRegion::new(
                "U",
                NORTH,
                vec![
                    ParamKind::interval(zb, 1.0),
                    ParamKind::circle(0.0, 2.0 * PI),
                ],
                -1.0,
                Arc::new(|u| Ok(sphere_point(u[0], u[1]))),
            ),
            VolumeRegion::new(
                "V-U",
                SOUTH,
                vec![
                    ParamKind::interval(-1.0, zb),
                    ParamKind::circle(0.0, 2.0 * PI),
                ],
                -1.0,
                Arc::new(|u| Ok(sphere_point(u[0], u[1]))),
            ),
        ];

        let north_pts = self.sample_points(&mut rng, 5, zb + 0.05, 0.99);
        let south_pts = self.sample_points(&mut rng, 5, -0.99, -zb - 0.05);
        let mut model = self.loop_model();
        let any_pts = self.sample_points(&mut rng, 40, -1.0, 1.0);
        let times: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        for c in atlas.charts() {
            model.add_certificate(certify_chart_invariance(&model, c, &any_pts, &times)?);
        }
        model.add_certificate(certify_closed_loop(&model, &atlas.charts()[0], &north_pts)?);
        let spec = QuadratureSpec::default();
        let f = |p: &[f64]| -2.0 * PI * p[2];
        let mut mean = 0.0;
        let mut vol = 0.0;
        for r in &regions {
            let host = atlas.chart(r.chart_id).expect("chart");
            mean += integrate_volume(r, host, &f, &spec)?.value;
            vol += integrate_volume(r, host, &|_| 1.0, &spec)?.value;
        }
        model.add_certificate(certify_normalization(mean, vol)?);

        let problem = InvariantProblem {
            label: format!("sphere(epsilon_hat={})", self.epsilon_hat),
            atlas,
            overlaps,
            regions,
            maslov_points: vec![(NORTH, north_pts), (SOUTH, south_pts)],
        };
        let (integrable_atlas, integrable_chains) = self.integrable_data()?;
        Ok(SphereBuild {
            problem,
            model,
            closed_form_phase,
            integrable_atlas,
            integrable_chains,
        })
    }

    /// Band chart with two polar caps and the two boundary circles of the band.
    pub fn integrable_data(&self) -> Result<(Atlas, Vec<Overlap>)> {
        let eta = self.eta;
        let band = Chart::new(
            0,
            "band",
            1,
            vec!["phi".into(), "z".into()],
            vec![Some(2.0 * PI), None],
            Arc::new(BandChart { eta }),
        )?;
        let n_cap = Chart::new(
            1,
            "north-cap",
            1,
            xy_names("N"),
            vec![None, None],
            Arc::new(PolarCap { sign: 1.0, eta }),
        )?;
        let s_cap = Chart::new(
            2,
            "south-cap",
            1,
            xy_names("S"),
            vec![None, None],
            Arc::new(PolarCap { sign: -1.0, eta }),
        )?;
        let atlas = Atlas::new(vec![band, n_cap, s_cap])?;
        let top = 1.0 - eta;
        let chains = vec![
            Chain::new(
                "band.north",
                (0, 1),
                vec![ParamKind::circle(0.0, 2.0 * PI)],
                -1.0,
                Some(0),
                Arc::new(move |u| Ok(sphere_point(top, u[0]))),
            )?,
            Chain::new(
                "band.south",
                (0, 2),
                vec![ParamKind::circle(0.0, 2.0 * PI)],
                1.0,
                Some(0),
                Arc::new(move |u| Ok(sphere_point(-top, u[0]))),
            )?,
        ];
        let chains = build_overlap_chains(&atlas, chains)?;
        let overlaps = chains
            .into_iter()
            .map(|chain| -> Result<Overlap> {
                let phase = TransitionPhase::from_charts(
                    &atlas,
                    chain.pair.0,
                    chain.pair.1,
                    JacobianMode::FiniteDifference,
                )?;
                Ok(Overlap { chain, phase })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((atlas, overlaps))
    }

    /// `int_0^1 f_t(psi_t(p)) dt` sampled on the overlap boundary, certified constant.
    pub fn boundary_constant(
        &self,
        model: &HamiltonianLoopModel,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        let zb = self.boundary_height();
        let vals = (0..16)
            .map(|i| {
                model.time_averaged_weight(
                    &sphere_point(zb, i as f64 * PI / 8.0),
                    spec.t_order,
                    spec.t_cells,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        certify_boundary_constant(&vals)
    }

    pub fn run(&self, spec: &QuadratureSpec) -> Result<SphereRun> {
        let b = self.build()?;
        let report = compute_invariant(&b.problem, &b.model, spec)?;
        let chern = chern_pairing(&b.problem.atlas, &b.problem.overlaps, spec)?;
        let k_const = self.boundary_constant(&b.model, spec)?;
        let j_u = report.charts[0].maslov.index;
        let j_v = report.charts[1].maslov.index;
        let two_charts = corollary_two_charts(
            j_u,
            j_v,
            report.charts[0].volume.value,
            report.charts[1].volume.value,
            1,
            k_const,
            chern.value,
        );
        let south_pole = vec![0.0, 0.0, -1.0];
        let fixed = (0..8).all(|i| {
            b.model
                .flow(i as f64 / 8.0, &south_pole)
                .map(|q| {
                    q.iter()
                        .zip(&south_pole)
                        .all(|(a, c)| (a - c).abs() < 1e-12)
                })
                .unwrap_or(false)
        });
        if !fixed {
            return Err(Error::CertificateFailure {
                certificate: Certificate::FIXED_POINT.into(),
                detail: "south pole moves".into(),
            });
        }
        let f_q = b
            .model
            .time_averaged_weight(&south_pole, spec.t_order, spec.t_cells)?;
        let punctured = corollary_punctured(j_u, TOTAL_AREA, 1, f_q, chern.value);
        let f = |p: &[f64]| -2.0 * PI * p[2];
        let integrable = integrable_invariant(&b.integrable_atlas, &b.integrable_chains, &f, spec)?;
        Ok(SphereRun {
            scenario: *self,
            report,
            chern,
            boundary_constant: k_const,
            two_charts,
            punctured,
            f_at_pole: f_q,
            integrable,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereRun {
    pub scenario: SphereScenario,
    pub report: InvariantReport,
    pub chern: Estimate,
    pub boundary_constant: f64,
    pub two_charts: f64,
    pub punctured: f64,
    pub f_at_pole: f64,
    pub integrable: IntegrableResult,
}

/// Tolerances for the sphere checks.
pub const SPHERE_INVARIANT_TOL: f64 = 1e-6;
pub const SPHERE_CHERN_TOL: f64 = 1e-4;

impl SphereRun {
    pub fn checks(&self) -> Vec<Check> {
        let e = sphere_expected();
        let eh = self.scenario.epsilon_hat;
        vec![
            Check::exact("J_U", e.j_u, self.report.charts[0].maslov.index),
            Check::exact("J_V", e.j_v, self.report.charts[1].maslov.index),
            Check::absolute("I", e.invariant, self.report.total, SPHERE_INVARIANT_TOL),
            Check::absolute("chern", e.chern, self.chern.value, SPHERE_CHERN_TOL),
            Check::absolute(
                "vol U",
                2.0 * PI * (1.0 + eh.sin()),
                self.report.charts[0].volume.value,
                1e-8,
            ),
            Check::absolute(
                "boundary f",
                2.0 * PI * eh.sin(),
                self.boundary_constant,
                1e-9,
            ),
            Check::absolute(
                "two-chart corollary",
                0.0,
                self.two_charts,
                SPHERE_INVARIANT_TOL,
            ),
            Check::absolute(
                "punctured corollary",
                0.0,
                self.punctured,
                SPHERE_INVARIANT_TOL,
            ),
            Check::absolute(
                "integrable sum z'",
                0.0,
                self.integrable.sum_z_prime,
                SPHERE_INVARIANT_TOL,
            ),
            Check::absolute(
                "integrable sum z",
                2.0,
                self.integrable.sum_z,
                SPHERE_CHERN_TOL,
            ),
        ]
    }

    pub fn outcome(&self) -> ScenarioOutcome {
        ScenarioOutcome::new(
            "sphere",
            json!({ "epsilon_hat": self.scenario.epsilon_hat, "eta": self.scenario.eta }),
            to_json(&sphere_expected()),
            to_json(self),
            self.checks(),
        )
    }
}
