//! Hamiltonian loops: flow, normalized Hamiltonian and linearization in charts.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::quadrature::gauss_legendre;
use crate::geom::{Chart, Point};
use crate::symp::SymplecticMatrix;

/// Finite-difference step for linearizations.
pub const LINEARIZATION_STEP: f64 = 1e-6;
/// Symplecticity bound for finite-difference linearizations.
pub const LINEARIZATION_TOL: f64 = 1e-5;
/// `psi_0 = psi_1 = id` tolerance.
pub const CLOSED_LOOP_TOL: f64 = 1e-9;

pub type FlowFn = Arc<dyn Fn(f64, &[f64]) -> Result<Point> + Send + Sync>;
pub type HamiltonianFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type LinearizationFn =
    Arc<dyn Fn(&Chart, f64, &[f64]) -> Result<SymplecticMatrix> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearizationMode {
    ClosedForm,
    FiniteDifference,
}

/// A machine-checked hypothesis attached to a model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub chart_id: Option<usize>,
    pub detail: String,
}

impl Certificate {
    pub const CHART_INVARIANCE: &'static str = "chart-invariance";
    pub const NORMALIZATION: &'static str = "normalization";
    pub const CLOSED_LOOP: &'static str = "closed-loop";
    pub const FIXED_POINT: &'static str = "fixed-point";
}

#[derive(Clone)]
pub struct HamiltonianLoopModel {
    pub name: String,
    pub n: usize,
    flow: FlowFn,
    inverse_flow: FlowFn,
    hamiltonian: HamiltonianFn,
    collapsed: Option<PointFn>,
    linearization: Option<LinearizationFn>,
    mode: LinearizationMode,
    certificates: Vec<Certificate>,
}

impl fmt::Debug for HamiltonianLoopModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianLoopModel")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("mode", &self.mode)
            .field("certificates", &self.certificates)
            .finish()
    }
}

impl HamiltonianLoopModel {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        flow: FlowFn,
        inverse_flow: FlowFn,
        hamiltonian: HamiltonianFn,
    ) -> Self {
        Self {
            name: name.into(),
            n,
            flow,
            inverse_flow,
            hamiltonian,
            collapsed: None,
            linearization: None,
            mode: LinearizationMode::FiniteDifference,
            certificates: Vec::new(),
        }
    }

    /// The constant loop with `f = 0`.
    pub fn identity(n: usize) -> Self {
        let id: FlowFn = Arc::new(|_, p| Ok(p.to_vec()));
        let mut m = Self::new("identity", n, id.clone(), id, Arc::new(|_, _| 0.0));
        m.collapsed = Some(Arc::new(|_| 0.0));
        m.linearization = Some(Arc::new(move |c: &Chart, _, _| {
            Ok(SymplecticMatrix::identity(c.n))
        }));
        m.mode = LinearizationMode::ClosedForm;
        m
    }

    /// Closed-form linearization; switches the mode to closed form.
    pub fn with_linearization(mut self, f: LinearizationFn) -> Self {
        self.linearization = Some(f);
        self.mode = LinearizationMode::ClosedForm;
        self
    }

    /// Closed form of `int_0^1 f_t(psi_t(p)) dt`, used as a cross-check.
    pub fn with_collapsed_weight(mut self, f: PointFn) -> Self {
        self.collapsed = Some(f);
        self
    }

    pub fn with_mode(mut self, mode: LinearizationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> LinearizationMode {
        self.mode
    }

    pub fn add_certificate(&mut self, c: Certificate) {
        self.certificates.push(c);
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.certificates
    }

    pub fn has_invariance_certificate(&self, chart_id: usize) -> bool {
        self.certificates
            .iter()
            .any(|c| c.name == Certificate::CHART_INVARIANCE && c.chart_id == Some(chart_id))
    }

    pub fn flow(&self, t: f64, p: &[f64]) -> Result<Point> {
        (self.flow)(t, p)
    }

    pub fn inverse_flow(&self, t: f64, p: &[f64]) -> Result<Point> {
        (self.inverse_flow)(t, p)
    }

    pub fn hamiltonian(&self, t: f64, p: &[f64]) -> f64 {
        (self.hamiltonian)(t, p)
    }

    pub fn collapsed_weight(&self, p: &[f64]) -> Option<f64> {
        self.collapsed.as_ref().map(|f| f(p))
    }

    pub fn has_collapsed_weight(&self) -> bool {
        self.collapsed.is_some()
    }

    /// `int_0^1 f_t(psi_t(p)) dt` by composite Gauss-Legendre in `t`.
    pub fn time_averaged_weight(&self, p: &[f64], order: usize, cells: usize) -> Result<f64> {
        let mut acc = 0.0;
        for (t, w) in gauss_legendre(0.0, 1.0, order, cells) {
            acc += w * self.hamiltonian(t, &self.flow(t, p)?);
        }
        Ok(acc)
    }

    /// Matrix of `(psi_t)_*^{-1}` in the chart frame at `psi_t(p)`, per the current mode.
    pub fn linearization(&self, chart: &Chart, t: f64, p: &[f64]) -> Result<SymplecticMatrix> {
        match (self.mode, &self.linearization) {
            (LinearizationMode::ClosedForm, Some(f)) => f(chart, t, p),
            (LinearizationMode::ClosedForm, None) => Err(Error::InvalidParameter(format!(
                "model {} has no closed-form linearization",
                self.name
            ))),
            (LinearizationMode::FiniteDifference, _) => self.fd_linearization(chart, t, p),
        }
    }

    /// Central differences of `coords . psi_t^{-1} . point` at the coordinates of `psi_t(p)`.
    pub fn fd_linearization(&self, chart: &Chart, t: f64, p: &[f64]) -> Result<SymplecticMatrix> {
        let x = chart.coords(&self.flow(t, p)?)?;
        let dim = x.len();
        let mut jac = DMatrix::zeros(dim, dim);
        let mut y = x.clone();
        for c in 0..dim {
            y[c] = x[c] + LINEARIZATION_STEP;
            let plus = chart.coords(&self.inverse_flow(t, &chart.point(&y)?)?)?;
            y[c] = x[c] - LINEARIZATION_STEP;
            let minus = chart.coords(&self.inverse_flow(t, &chart.point(&y)?)?)?;
            y[c] = x[c];
            for (r, d) in chart.coord_delta(&minus, &plus).into_iter().enumerate() {
                jac[(r, c)] = d / (2.0 * LINEARIZATION_STEP);
            }
        }
        SymplecticMatrix::with_tolerance(jac, LINEARIZATION_TOL)
    }

    /// `t -> psi_{1-t}`, generated by `-f_{1-t}`.
    pub fn reversed(&self) -> Self {
        let (flow, inv, ham) = (
            self.flow.clone(),
            self.inverse_flow.clone(),
            self.hamiltonian.clone(),
        );
        Self {
            name: format!("{}-reversed", self.name),
            n: self.n,
            flow: Arc::new(move |t, p| flow(1.0 - t, p)),
            inverse_flow: Arc::new(move |t, p| inv(1.0 - t, p)),
            hamiltonian: Arc::new(move |t, p| -ham(1.0 - t, p)),
            collapsed: self
                .collapsed
                .clone()
                .map(|f| Arc::new(move |p: &[f64]| -f(p)) as PointFn),
            linearization: self.linearization.clone().map(|f| {
                Arc::new(move |c: &Chart, t, p: &[f64]| f(c, 1.0 - t, p)) as LinearizationFn
            }),
            mode: self.mode,
            certificates: self.certificates.clone(),
        }
    }

    /// `t -> psi_{2t mod 1}`, generated by `2 f_{2t mod 1}`.
    pub fn doubled(&self) -> Self {
        fn s(t: f64) -> f64 {
            let u = 2.0 * t;
            u - u.floor()
        }
        let (flow, inv, ham) = (
            self.flow.clone(),
            self.inverse_flow.clone(),
            self.hamiltonian.clone(),
        );
        Self {
            name: format!("{}-doubled", self.name),
            n: self.n,
            flow: Arc::new(move |t, p| flow(s(t), p)),
            inverse_flow: Arc::new(move |t, p| inv(s(t), p)),
            hamiltonian: Arc::new(move |t, p| 2.0 * ham(s(t), p)),
            collapsed: self
                .collapsed
                .clone()
                .map(|f| Arc::new(move |p: &[f64]| 2.0 * f(p)) as PointFn),
            linearization: self
                .linearization
                .clone()
                .map(|f| Arc::new(move |c: &Chart, t, p: &[f64]| f(c, s(t), p)) as LinearizationFn),
            mode: self.mode,
            certificates: self.certificates.clone(),
        }
    }
}

fn failure(name: &str, detail: String) -> Error {
    Error::CertificateFailure {
        certificate: name.into(),
        detail,
    }
}

/// Checks `psi_t(B) = B` by comparing chart membership of `p` and `psi_t(p)`.
pub fn certify_chart_invariance(
    model: &HamiltonianLoopModel,
    chart: &Chart,
    points: &[Point],
    times: &[f64],
) -> Result<Certificate> {
    for p in points {
        let inside = chart.contains(p);
        for &t in times {
            if chart.contains(&model.flow(t, p)?) != inside {
                return Err(failure(
                    Certificate::CHART_INVARIANCE,
                    format!("chart {} is not invariant at t = {t}", chart.name),
                ));
            }
        }
    }
    Ok(Certificate {
        name: Certificate::CHART_INVARIANCE.into(),
        chart_id: Some(chart.id),
        detail: format!("{} points x {} times", points.len(), times.len()),
    })
}

/// Checks `psi_0 = psi_1 = id` at the given points, comparing chart coordinates.
pub fn certify_closed_loop(
    model: &HamiltonianLoopModel,
    chart: &Chart,
    points: &[Point],
) -> Result<Certificate> {
    let mut worst = 0.0f64;
    for p in points {
        let x = chart.coords(p)?;
        for t in [0.0, 1.0] {
            let y = chart.coords(&model.flow(t, p)?)?;
            let gap = chart
                .coord_delta(&x, &y)
                .iter()
                .fold(0.0f64, |a, d| a.max(d.abs()));
            worst = worst.max(gap);
        }
    }
    if worst > CLOSED_LOOP_TOL {
        return Err(failure(
            Certificate::CLOSED_LOOP,
            format!("endpoint gap {worst:.3e}"),
        ));
    }
    Ok(Certificate {
        name: Certificate::CLOSED_LOOP.into(),
        chart_id: Some(chart.id),
        detail: format!("max endpoint gap {worst:.1e}"),
    })
}

/// Records `|int f omega^n| <= 1e-8 int omega^n`.
pub fn certify_normalization(mean_integral: f64, volume: f64) -> Result<Certificate> {
    if mean_integral.abs() > 1e-8 * volume.abs() {
        return Err(failure(
            Certificate::NORMALIZATION,
            format!("int f omega^n = {mean_integral:.3e} over volume {volume:.6}"),
        ));
    }
    Ok(Certificate {
        name: Certificate::NORMALIZATION.into(),
        chart_id: None,
        detail: format!("int f omega^n = {mean_integral:.1e}"),
    })
}
