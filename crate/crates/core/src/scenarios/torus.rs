//! Reparameterized autonomous flows on the torus `T^{2n}`.
//!
//! Coordinates `(q_1..q_n, p_1..p_n)` have period one and `omega = sum dq ^ dp`.
//! For a trigonometric polynomial `g` the loop is `psi_t = Phi^g_{A(t)}` with
//! `A(t) = (1 - cos 2 pi t) / 2`, generated by `f_t = A'(t) g`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use ode_solvers::dop853::Dop853;
use ode_solvers::dop_shared::OutputType;
use ode_solvers::System;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{to_json, Check, ScenarioOutcome};
use crate::error::{Error, Result};
use crate::geom::{
    integrate_volume, Atlas, Chart, ChartMap, ParamKind, Point, QuadratureSpec, VolumeRegion,
};
use crate::invariant::{
    certify_chart_invariance, certify_closed_loop, certify_normalization, compute_invariant,
    HamiltonianLoopModel, InvariantProblem, InvariantReport,
};
use crate::symp::SymplecticMatrix;

/// Relative and absolute tolerance of the variational equation.
pub const VARIATIONAL_TOL: f64 = 1e-10;
/// Tolerance of point flows; tighter so finite differences of the flow stay accurate.
pub const FLOW_TOL: f64 = 1e-12;
pub const MASLOV_POINTS: usize = 5;

/// One Fourier mode `a cos(2 pi m.x) + b sin(2 pi m.x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mode {
    pub m: Vec<i32>,
    pub a: f64,
    pub b: f64,
}

/// Trigonometric polynomial without constant term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigPolynomial {
    pub modes: Vec<Mode>,
}

impl TrigPolynomial {
    /// Random modes with frequencies in `[-1, 1]` and coefficients in
    /// `[-1, 1] / (2 pi)^2`, which keeps the Hessian of order one.
    pub fn random(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Self {
        let scale = 1.0 / (4.0 * PI * PI);
        let mut modes = Vec::with_capacity(count);
        while modes.len() < count {
            let m: Vec<i32> = (0..dim).map(|_| rng.gen_range(-1..=1)).collect();
            if m.iter().all(|&v| v == 0) {
                continue;
            }
            modes.push(Mode {
                m,
                a: scale * rng.gen_range(-1.0..1.0),
                b: scale * rng.gen_range(-1.0..1.0),
            });
        }
        Self { modes }
    }

    fn phase(m: &[i32], x: &[f64]) -> f64 {
        2.0 * PI * m.iter().zip(x).map(|(&k, &v)| k as f64 * v).sum::<f64>()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.modes
            .iter()
            .map(|md| {
                let th = Self::phase(&md.m, x);
                md.a * th.cos() + md.b * th.sin()
            })
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> DVector<f64> {
        let mut g = DVector::zeros(x.len());
        for md in &self.modes {
            let (s, c) = Self::phase(&md.m, x).sin_cos();
            let amp = 2.0 * PI * (-md.a * s + md.b * c);
            for (j, &k) in md.m.iter().enumerate() {
                g[j] += amp * k as f64;
            }
        }
        g
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = x.len();
        let mut h = DMatrix::zeros(d, d);
        for md in &self.modes {
            let (s, c) = Self::phase(&md.m, x).sin_cos();
            let amp = -4.0 * PI * PI * (md.a * c + md.b * s);
            for i in 0..d {
                for j in 0..d {
                    h[(i, j)] += amp * md.m[i] as f64 * md.m[j] as f64;
                }
            }
        }
        h
    }

    /// Hamiltonian vector field `X` with `i_X omega = -dg`: `(-g_p, g_q)`.
    pub fn vector_field(&self, x: &[f64]) -> DVector<f64> {
        let n = x.len() / 2;
        let g = self.gradient(x);
        DVector::from_fn(2 * n, |i, _| if i < n { -g[n + i] } else { g[i - n] })
    }

    /// Derivative of the vector field, `-J H`.
    pub fn vector_field_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len() / 2;
        let h = self.hessian(x);
        DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if i < n {
                -h[(n + i, j)]
            } else {
                h[(i - n, j)]
            }
        })
    }
}

struct FlowSystem<'a> {
    g: &'a TrigPolynomial,
    dim: usize,
    variational: bool,
}

impl System<f64, DVector<f64>> for FlowSystem<'_> {
    fn system(&self, _s: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        let x = &y.as_slice()[..self.dim];
        let v = self.g.vector_field(x);
        dy.rows_mut(0, self.dim).copy_from(&v);
        if self.variational {
            let dx = self.g.vector_field_jacobian(x);
            let ymat = DMatrix::from_column_slice(self.dim, self.dim, &y.as_slice()[self.dim..]);
            let prod = dx * ymat;
            dy.rows_mut(self.dim, self.dim * self.dim)
                .copy_from_slice(prod.as_slice());
        }
    }
}

fn integrate(
    g: &TrigPolynomial,
    y0: DVector<f64>,
    dim: usize,
    s: f64,
    variational: bool,
    tol: f64,
) -> Result<DVector<f64>> {
    if s.abs() < 1e-15 {
        return Ok(y0);
    }
    let sys = FlowSystem {
        g,
        dim,
        variational,
    };
    let mut solver = Dop853::from_param(
        sys,
        0.0,
        s,
        s,
        y0,
        tol,
        tol,
        0.9,
        0.0,
        0.333,
        6.0,
        s.abs(),
        0.0,
        100_000,
        1000,
        OutputType::Sparse,
    );
    solver
        .integrate()
        .map_err(|e| Error::Integration(format!("flow integration failed: {e}")))?;
    solver
        .y_out()
        .last()
        .cloned()
        .ok_or_else(|| Error::Integration("empty flow output".into()))
}

/// Time-`s` flow of `g` from `x`.
pub fn hamiltonian_flow(g: &TrigPolynomial, x: &[f64], s: f64) -> Result<Point> {
    let y = integrate(
        g,
        DVector::from_column_slice(x),
        x.len(),
        s,
        false,
        FLOW_TOL,
    )?;
    Ok(y.as_slice().to_vec())
}

/// Time-`s` flow and its derivative at `x`, by the variational equation.
pub fn flow_with_derivative(
    g: &TrigPolynomial,
    x: &[f64],
    s: f64,
) -> Result<(Point, DMatrix<f64>)> {
    let d = x.len();
    let mut y0 = DVector::zeros(d + d * d);
    y0.rows_mut(0, d).copy_from_slice(x);
    for i in 0..d {
        y0[d + i * d + i] = 1.0;
    }
    let y = integrate(g, y0, d, s, true, VARIATIONAL_TOL)?;
    Ok((
        y.as_slice()[..d].to_vec(),
        DMatrix::from_column_slice(d, d, &y.as_slice()[d..]),
    ))
}

pub fn reparameterization(t: f64) -> f64 {
    0.5 * (1.0 - (2.0 * PI * t).cos())
}

pub fn reparameterization_rate(t: f64) -> f64 {
    PI * (2.0 * PI * t).sin()
}

struct TorusChart;

impl ChartMap for TorusChart {
    fn coords(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(p.iter().map(|v| v.rem_euclid(1.0)).collect())
    }

    fn point(&self, x: &[f64]) -> Result<Point> {
        Ok(x.to_vec())
    }

    fn level(&self, _p: &[f64]) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusExpected {
    pub maslov: i64,
    pub invariant: f64,
}

pub fn torus_expected() -> TorusExpected {
    TorusExpected {
        maslov: 0,
        invariant: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusScenario {
    pub n: usize,
    pub seed: u64,
    pub modes: usize,
}

#[derive(Debug, Clone)]
pub struct TorusBuild {
    pub problem: InvariantProblem,
    pub model: HamiltonianLoopModel,
    pub g: Arc<TrigPolynomial>,
}

impl TorusScenario {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n == 0 || n > 3 {
            return Err(Error::InvalidParameter(format!(
                "torus half-dimension {n} not in 1..=3"
            )));
        }
        Ok(Self {
            n,
            seed,
            modes: 2 * n + 2,
        })
    }

    pub fn hamiltonian(&self) -> TrigPolynomial {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        TrigPolynomial::random(2 * self.n, self.modes, &mut rng)
    }

    pub fn chart(&self) -> Result<Chart> {
        let n = self.n;
        let names = (1..=n)
            .map(|i| format!("q{i}"))
            .chain((1..=n).map(|i| format!("p{i}")))
            .collect();
        Chart::new(
            0,
            "T",
            n,
            names,
            vec![Some(1.0); 2 * n],
            Arc::new(TorusChart),
        )
    }

    pub fn loop_model(&self, g: Arc<TrigPolynomial>) -> HamiltonianLoopModel {
        let (gf, gi, gh, gl) = (g.clone(), g.clone(), g.clone(), g);
        HamiltonianLoopModel::new(
            "reparameterized-flow",
            self.n,
            Arc::new(move |t, p| hamiltonian_flow(&gf, p, reparameterization(t))),
            Arc::new(move |t, p| hamiltonian_flow(&gi, p, -reparameterization(t))),
            Arc::new(move |t, p| reparameterization_rate(t) * gh.value(p)),
        )
        // g is invariant under its own flow and A(1) = A(0).
        .with_collapsed_weight(Arc::new(|_| 0.0))
        .with_linearization(Arc::new(move |_c: &Chart, t, p: &[f64]| {
            let (_, d) = flow_with_derivative(&gl, p, reparameterization(t))?;
            SymplecticMatrix::with_tolerance(d, 1e-7).map(|m| m.inverse())
        }))
    }

    pub fn build(&self) -> Result<TorusBuild> {
        let chart = self.chart()?;
        let atlas = Atlas::new(vec![chart.clone()])?;
        let g = Arc::new(self.hamiltonian());
        let mut model = self.loop_model(g.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9);
        let points: Vec<Point> = (0..MASLOV_POINTS)
            .map(|_| (0..2 * self.n).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        model.add_certificate(certify_chart_invariance(
            &model,
            &chart,
            &points[..2],
            &[0.25, 0.5],
        )?);
        model.add_certificate(certify_closed_loop(&model, &chart, &points)?);
        let region = VolumeRegion::new(
            "T",
            0,
            vec![ParamKind::circle(0.0, 1.0); 2 * self.n],
            chart.orientation_sign(),
            Arc::new(|u| Ok(u.to_vec())),
        );
        let spec = QuadratureSpec {
            periodic_nodes: 8,
            ..QuadratureSpec::default()
        };
        let gv = g.clone();
        let mean = integrate_volume(&region, &chart, &move |p| gv.value(p), &spec)?;
        let vol = integrate_volume(&region, &chart, &|_| 1.0, &spec)?;
        model.add_certificate(certify_normalization(mean.value, vol.value)?);
        let problem = InvariantProblem {
            label: format!("torus(n={}, seed={})", self.n, self.seed),
            atlas,
            overlaps: vec![],
            regions: vec![region],
            maslov_points: vec![(0, points)],
        };
        Ok(TorusBuild { problem, model, g })
    }

    pub fn run(&self, spec: &QuadratureSpec) -> Result<TorusRun> {
        let b = self.build()?;
        let spec = QuadratureSpec {
            periodic_nodes: spec.periodic_nodes.min(8),
            ..*spec
        };
        let report = compute_invariant(&b.problem, &b.model, &spec)?;
        let chart = &b.problem.atlas.charts()[0];
        let mut worst: f64 = 0.0;
        for p in &b.problem.maslov_points[0].1[..2] {
            for t in [0.2, 0.45, 0.8] {
                let a = b.model.linearization(chart, t, p)?;
                let f = b.model.fd_linearization(chart, t, p)?;
                worst = worst.max((a.matrix() - f.matrix()).amax());
            }
        }
        Ok(TorusRun {
            scenario: *self,
            g: (*b.g).clone(),
            report,
            linearization_gap: worst,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusRun {
    pub scenario: TorusScenario,
    pub g: TrigPolynomial,
    pub report: InvariantReport,
    /// Largest entrywise gap between variational and finite-difference linearizations.
    pub linearization_gap: f64,
}

pub const TORUS_INVARIANT_TOL: f64 = 1e-6;
pub const LINEARIZATION_AGREEMENT_TOL: f64 = 1e-5;

impl TorusRun {
    pub fn checks(&self) -> Vec<Check> {
        let e = torus_expected();
        vec![
            Check::exact("J", e.maslov, self.report.charts[0].maslov.index),
            Check::absolute("I", e.invariant, self.report.total, TORUS_INVARIANT_TOL),
            Check::absolute(
                "linearization fd gap",
                0.0,
                self.linearization_gap,
                LINEARIZATION_AGREEMENT_TOL,
            ),
        ]
    }

    pub fn outcome(&self) -> ScenarioOutcome {
        ScenarioOutcome::new(
            "torus",
            json!({ "n": self.scenario.n, "seed": self.scenario.seed, "modes": self.scenario.modes }),
            to_json(&torus_expected()),
            to_json(self),
            self.checks(),
        )
    }
}
