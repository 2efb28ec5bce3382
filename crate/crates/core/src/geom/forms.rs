//! Pullbacks of powers of the symplectic form and integration over chains and regions.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::sync::Arc;

use super::chain::Chain;
use super::chart::{Chart, ParamKind, Point};
use super::phase::TransitionPhase;
use super::quadrature::{gauss_legendre, periodic_nodes, QuadratureSpec};
use crate::error::{Error, Result};
use crate::par;
use crate::symp::winding::{phase_step, PhasePath};

/// Step for finite-difference tangents in parameter space.
pub const TANGENT_STEP: f64 = 1e-6;
/// Phase derivatives below this along non-designated directions are treated as zero.
pub const PHASE_DERIVATIVE_FLOOR: f64 = 1e-9;
/// Relative floor of every error estimate.
pub const ERROR_FLOOR: f64 = 1e-10;

/// A real weight on ambient points.
pub type Weight<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            value: c * self.value,
            error: c.abs() * self.error,
        }
    }

    pub fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            error: self.error + o.error,
        }
    }
}

fn from_passes(full: f64, half: f64) -> Estimate {
    Estimate {
        value: full,
        error: (full - half).abs() + ERROR_FLOOR * full.abs().max(1.0),
    }
}

/// Pfaffian of an even-dimensional antisymmetric matrix (expansion along the first row).
pub fn pfaffian(w: &DMatrix<f64>) -> f64 {
    let m = w.nrows();
    if m == 0 {
        return 1.0;
    }
    if m % 2 == 1 {
        return 0.0;
    }
    if m == 2 {
        return w[(0, 1)];
    }
    let mut acc = 0.0;
    for j in 1..m {
        if w[(0, j)] == 0.0 {
            continue;
        }
        let keep: Vec<usize> = (1..m).filter(|&r| r != j).collect();
        let minor = DMatrix::from_fn(m - 2, m - 2, |a, b| w[(keep[a], keep[b])]);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * w[(0, j)] * pfaffian(&minor);
    }
    acc
}

/// `omega^p(v_1, .., v_{2p})` for the standard form in `(q, p)` coordinates.
pub fn omega_power(vectors: &[DVector<f64>]) -> f64 {
    let m = vectors.len();
    if m == 0 {
        return 1.0;
    }
    if m % 2 == 1 {
        return 0.0;
    }
    let n = vectors[0].len() / 2;
    let omega = |a: &DVector<f64>, b: &DVector<f64>| -> f64 {
        (0..n).map(|i| a[i] * b[n + i] - a[n + i] * b[i]).sum()
    };
    let w = DMatrix::from_fn(m, m, |a, b| omega(&vectors[a], &vectors[b]));
    let p = m / 2;
    let factorial: f64 = (1..=p).map(|k| k as f64).product();
    factorial * pfaffian(&w)
}

/// Central-difference tangents `d(chart coords)/du_j` of a parameterization.
pub fn tangents<F>(chart: &Chart, map: &F, u: &[f64], dirs: &[usize]) -> Result<Vec<DVector<f64>>>
where
    F: Fn(&[f64]) -> Result<Point> + ?Sized,
{
    let mut out = Vec::with_capacity(dirs.len());
    let mut v = u.to_vec();
    for &j in dirs {
        v[j] = u[j] + TANGENT_STEP;
        let plus = chart.coords(&map(&v)?)?;
        v[j] = u[j] - TANGENT_STEP;
        let minus = chart.coords(&map(&v)?)?;
        v[j] = u[j];
        let d = chart.coord_delta(&minus, &plus);
        out.push(DVector::from_iterator(
            d.len(),
            d.into_iter().map(|x| x / (2.0 * TANGENT_STEP)),
        ));
    }
    Ok(out)
}

fn param_nodes(p: &ParamKind, spec: &QuadratureSpec) -> Vec<(f64, f64)> {
    match *p {
        ParamKind::Interval { lo, hi } => gauss_legendre(lo, hi, spec.gl_order, spec.cells),
        ParamKind::Circle { lo, hi } => periodic_nodes(lo, hi, spec.periodic_nodes),
    }
}

/// Tensor grid over the listed parameters: `(coordinates, product weight)` in lexicographic order.
fn tensor_grid(
    params: &[ParamKind],
    dirs: &[usize],
    spec: &QuadratureSpec,
) -> Vec<(Vec<f64>, f64)> {
    let mut grid: Vec<(Vec<f64>, f64)> = vec![(vec![0.0; params.len()], 1.0)];
    for &d in dirs {
        let nodes = param_nodes(&params[d], spec);
        let mut next = Vec::with_capacity(grid.len() * nodes.len());
        for (u, w) in &grid {
            for &(x, wx) in &nodes {
                let mut v = u.clone();
                v[d] = x;
                next.push((v, w * wx));
            }
        }
        grid = next;
    }
    grid
}

fn alt_sign(j: usize) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn phase_derivative(phase: &TransitionPhase, chain: &Chain, u: &[f64], j: usize) -> Result<f64> {
    let mut v = u.to_vec();
    v[j] = u[j] + TANGENT_STEP;
    let plus = phase.eval(&chain.point(&v)?)?;
    v[j] = u[j] - TANGENT_STEP;
    let minus = phase.eval(&chain.point(&v)?)?;
    Ok(phase_step(minus, plus) / (2.0 * TANGENT_STEP))
}

/// Non-designated directions along which the phase visibly varies.
fn varying_directions(
    chain: &Chain,
    phase: &TransitionPhase,
    c: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<usize>> {
    let params = chain.params();
    let probe = QuadratureSpec {
        gl_order: 3,
        periodic_nodes: 3,
        cells: 1,
        ..*spec
    };
    let dirs: Vec<usize> = (0..params.len()).collect();
    let mut varying = Vec::new();
    for j in (0..params.len()).filter(|&j| j != c) {
        for (u, _) in tensor_grid(params, &dirs, &probe) {
            if phase_derivative(phase, chain, &u, j)?.abs() > PHASE_DERIVATIVE_FLOOR {
                varying.push(j);
                break;
            }
        }
    }
    Ok(varying)
}

fn weighted_phase_pass(
    chain: &Chain,
    host: &Chart,
    weights: &[Weight<'_>],
    phase: &TransitionPhase,
    power: usize,
    spec: &QuadratureSpec,
    varying: &[usize],
) -> Result<Vec<f64>> {
    let c = chain.circle_direction().expect("checked by caller");
    let params = chain.params();
    let d = params.len();
    let (clo, chi) = params[c].bounds();
    let outer: Vec<usize> = (0..d).filter(|&j| j != c).collect();
    let grid = tensor_grid(params, &outer, spec);
    let chain_map = |u: &[f64]| chain.point(u);

    let partials = par::map(&grid, |(u0, w0)| -> Result<Vec<f64>> {
        let mut u = u0.clone();
        let path = PhasePath::sample(
            clo,
            chi,
            |s| {
                let mut v = u0.clone();
                v[c] = s;
                phase.eval(&chain.point(&v)?)
            },
            spec.circle_samples,
            spec.max_refine_depth,
        )?;
        let mut acc = vec![0.0; weights.len()];
        for (s0, s1, dg) in path.increments() {
            u[c] = 0.5 * (s0 + s1);
            let p = chain.point(&u)?;
            let tan = tangents(host, &chain_map, &u, &outer)?;
            let mut form = alt_sign(c) * omega_power(&tan) * dg;
            if !varying.is_empty() {
                let all: Vec<usize> = (0..d).collect();
                let full = tangents(host, &chain_map, &u, &all)?;
                for &j in varying {
                    let others: Vec<DVector<f64>> = (0..d)
                        .filter(|&a| a != j)
                        .map(|a| full[a].clone())
                        .collect();
                    let dj = phase_derivative(phase, chain, &u, j)?;
                    form += alt_sign(j) * dj * omega_power(&others) * (s1 - s0);
                }
            }
            for (a, w) in acc.iter_mut().zip(weights) {
                *a += w(&p) * form;
            }
        }
        Ok(acc.into_iter().map(|a| a * w0).collect())
    });

    let mut total = vec![0.0; weights.len()];
    for part in partials {
        for (t, v) in total.iter_mut().zip(part?) {
            *t += v;
        }
    }
    debug_assert_eq!(power * 2 + 1, d);
    Ok(total
        .into_iter()
        .map(|t| t * chain.orientation_sign())
        .collect())
}

/// `int_chain w * dgamma ^ omega^power` for each weight, where `phase = e^{i gamma}`.
///
/// The designated circle is integrated by unwrapped phase increments; the
/// other parameters by tensor quadrature. The error estimate compares with a
/// pass at half resolution.
pub fn integrate_weighted_phase_forms(
    chain: &Chain,
    host: &Chart,
    weights: &[Weight<'_>],
    phase: &TransitionPhase,
    power: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<Estimate>> {
    spec.validate()?;
    let c = chain.circle_direction().ok_or_else(|| {
        Error::InvalidParameter(format!("chain {} has no circle direction", chain.name))
    })?;
    if chain.params().len() != 2 * power + 1 {
        return Err(Error::InvalidParameter(format!(
            "chain {} has dimension {}, form has degree {}",
            chain.name,
            chain.params().len(),
            2 * power + 1
        )));
    }
    if host.dim() != 2 * (power + 1) {
        return Err(Error::InvalidParameter(
            "host chart dimension mismatch".into(),
        ));
    }
    let varying = varying_directions(chain, phase, c, spec)?;
    let full = weighted_phase_pass(chain, host, weights, phase, power, spec, &varying)?;
    let half = weighted_phase_pass(chain, host, weights, phase, power, &spec.halved(), &varying)?;
    Ok(full
        .into_iter()
        .zip(half)
        .map(|(f, h)| from_passes(f, h))
        .collect())
}

pub fn integrate_weighted_phase_form(
    chain: &Chain,
    host: &Chart,
    weight: Weight<'_>,
    phase: &TransitionPhase,
    power: usize,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    Ok(integrate_weighted_phase_forms(chain, host, &[weight], phase, power, spec)?[0])
}

/// A full-dimensional parameterized piece of a chart domain.
#[derive(Clone)]
pub struct VolumeRegion {
    pub name: String,
    pub chart_id: usize,
    params: Vec<ParamKind>,
    /// Sign of `omega^n` on the parameter frame.
    orientation_sign: f64,
    map: Arc<dyn Fn(&[f64]) -> Result<Point> + Send + Sync>,
}

impl std::fmt::Debug for VolumeRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VolumeRegion")
            .field("name", &self.name)
            .field("chart_id", &self.chart_id)
            .field("params", &self.params)
            .field("orientation_sign", &self.orientation_sign)
            .finish()
    }
}

impl VolumeRegion {
    pub fn new(
        name: impl Into<String>,
        chart_id: usize,
        params: Vec<ParamKind>,
        orientation_sign: f64,
        map: Arc<dyn Fn(&[f64]) -> Result<Point> + Send + Sync>,
    ) -> Self {
        Self {
            name: name.into(),
            chart_id,
            params,
            orientation_sign: orientation_sign.signum(),
            map,
        }
    }

    pub fn params(&self) -> &[ParamKind] {
        &self.params
    }

    pub fn point(&self, u: &[f64]) -> Result<Point> {
        (self.map)(u)
    }
}

fn volume_pass(
    region: &VolumeRegion,
    host: &Chart,
    weight: Weight<'_>,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let dirs: Vec<usize> = (0..region.params.len()).collect();
    let grid = tensor_grid(&region.params, &dirs, spec);
    let map = |u: &[f64]| region.point(u);
    let parts = par::map(&grid, |(u, w)| -> Result<f64> {
        let tan = tangents(host, &map, u, &dirs)?;
        let vol = omega_power(&tan) * region.orientation_sign;
        let scale: f64 = tan.iter().map(|t| t.amax()).product::<f64>().max(1e-300);
        if vol < -1e-6 * scale {
            return Err(Error::ValidationFailure(format!(
                "region {} is not positively oriented at {u:?}",
                region.name
            )));
        }
        Ok(w * weight(&region.point(u)?) * vol)
    });
    parts.into_iter().sum()
}

/// `int_region w * omega^n`.
pub fn integrate_volume(
    region: &VolumeRegion,
    host: &Chart,
    weight: Weight<'_>,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    if region.params.len() != host.dim() {
        return Err(Error::InvalidParameter(format!(
            "region {} has {} parameters in a {}-dimensional chart",
            region.name,
            region.params.len(),
            host.dim()
        )));
    }
    let full = volume_pass(region, host, weight, spec)?;
    let half = volume_pass(region, host, weight, &spec.halved())?;
    Ok(from_passes(full, half))
}
