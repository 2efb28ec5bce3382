//! Transition phases: the circle map applied to Jacobians of coordinate changes.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::chart::{Atlas, Chart};
use crate::error::{Error, Result};
use crate::symp::{rho, SymplecticMatrix};

/// Step of the central differences used for Jacobians.
pub const FD_STEP: f64 = 1e-6;
/// Symplecticity bound for Jacobians before the circle map is applied.
pub const JACOBIAN_SYMPLECTIC_TOL: f64 = 1e-5;

pub type JacobianFn = Arc<dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync>;
pub type PhaseFn = Arc<dyn Fn(&[f64]) -> Result<Complex64> + Send + Sync>;

#[derive(Clone)]
pub enum JacobianMode {
    /// Jacobian supplied in closed form as a function of the ambient point.
    ClosedForm(JacobianFn),
    FiniteDifference,
}

impl JacobianMode {
    pub fn name(&self) -> &'static str {
        match self {
            JacobianMode::ClosedForm(_) => "closed-form",
            JacobianMode::FiniteDifference => "finite-difference",
        }
    }
}

/// `d(coords of chart_i) / d(coords of chart_k)` at `p` by central differences.
pub fn fd_jacobian(chart_i: &Chart, chart_k: &Chart, p: &[f64]) -> Result<DMatrix<f64>> {
    let x = chart_k.coords(p)?;
    let dim = x.len();
    let mut jac = DMatrix::zeros(chart_i.dim(), dim);
    let mut y = x.clone();
    for c in 0..dim {
        y[c] = x[c] + FD_STEP;
        let plus = chart_i.coords(&chart_k.point(&y)?)?;
        y[c] = x[c] - FD_STEP;
        let minus = chart_i.coords(&chart_k.point(&y)?)?;
        y[c] = x[c];
        for (r, d) in chart_i.coord_delta(&minus, &plus).into_iter().enumerate() {
            jac[(r, c)] = d / (2.0 * FD_STEP);
        }
    }
    Ok(jac)
}

fn checked_rho(jac: DMatrix<f64>) -> Result<Complex64> {
    let m =
        SymplecticMatrix::with_tolerance(jac, JACOBIAN_SYMPLECTIC_TOL).map_err(|e| match e {
            Error::NonSymplectic { residual, tol } => {
                Error::NonSymplecticJacobian { residual, tol }
            }
            other => other,
        })?;
    rho(&m)
}

/// `rho` of the Jacobian of the change from chart `k` coordinates to chart `i` coordinates.
pub fn transition_phase_from_jacobian(
    chart_i: &Chart,
    chart_k: &Chart,
    p: &[f64],
    mode: &JacobianMode,
) -> Result<Complex64> {
    let jac = match mode {
        JacobianMode::ClosedForm(f) => f(p)?,
        JacobianMode::FiniteDifference => fd_jacobian(chart_i, chart_k, p)?,
    };
    checked_rho(jac)
}

#[derive(Clone)]
enum Source {
    Jacobian {
        chart_i: Chart,
        chart_k: Chart,
        mode: JacobianMode,
    },
    Function(PhaseFn),
}

/// Phase `r_ik` on the overlap of charts `i` (source) and `k` (target).
#[derive(Clone)]
pub struct TransitionPhase {
    pub source: usize,
    pub target: usize,
    inner: Source,
}

impl fmt::Debug for TransitionPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransitionPhase")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("mode", &self.mode_name())
            .finish()
    }
}

impl TransitionPhase {
    pub fn from_charts(atlas: &Atlas, i: usize, k: usize, mode: JacobianMode) -> Result<Self> {
        let get = |id| {
            atlas
                .chart(id)
                .cloned()
                .ok_or_else(|| Error::InvalidParameter(format!("no chart with id {id}")))
        };
        Ok(Self {
            source: i,
            target: k,
            inner: Source::Jacobian {
                chart_i: get(i)?,
                chart_k: get(k)?,
                mode,
            },
        })
    }

    /// A phase given directly as a function of the point.
    pub fn from_fn(source: usize, target: usize, f: PhaseFn) -> Self {
        Self {
            source,
            target,
            inner: Source::Function(f),
        }
    }

    /// Same charts with a different Jacobian mode; function phases are unchanged.
    pub fn with_mode(&self, mode: JacobianMode) -> Self {
        match &self.inner {
            Source::Jacobian {
                chart_i, chart_k, ..
            } => Self {
                source: self.source,
                target: self.target,
                inner: Source::Jacobian {
                    chart_i: chart_i.clone(),
                    chart_k: chart_k.clone(),
                    mode,
                },
            },
            Source::Function(_) => self.clone(),
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match &self.inner {
            Source::Jacobian { mode, .. } => mode.name(),
            Source::Function(_) => "function",
        }
    }

    pub fn eval(&self, p: &[f64]) -> Result<Complex64> {
        match &self.inner {
            Source::Jacobian {
                chart_i,
                chart_k,
                mode,
            } => transition_phase_from_jacobian(chart_i, chart_k, p, mode),
            Source::Function(f) => {
                let v = f(p)?;
                Ok(v / v.norm())
            }
        }
    }
}

/// `|r_ij r_jk r_ki - 1|` at a point of a triple overlap.
pub fn cocycle_defect(
    r_ij: &TransitionPhase,
    r_jk: &TransitionPhase,
    r_ki: &TransitionPhase,
    p: &[f64],
) -> Result<f64> {
    Ok((r_ij.eval(p)? * r_jk.eval(p)? * r_ki.eval(p)? - 1.0).norm())
}
