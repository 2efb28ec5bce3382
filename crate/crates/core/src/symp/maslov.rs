//! Maslov index of a loop of symplectic matrices based at the identity.

use nalgebra::DMatrix;
use serde::Serialize;

use super::krein::rho;
use super::matrix::SymplecticMatrix;
use super::winding::{raw_winding, PhasePath, MAX_REFINE_DEPTH};
use crate::error::{Error, Result};

/// Largest accepted `|raw_winding - index|`.
pub const MASLOV_RESIDUAL_LIMIT: f64 = 0.05;
/// Endpoint tolerance for `loop(0) = loop(1) = I`.
pub const LOOP_IDENTITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaslovResult {
    pub index: i64,
    pub raw_winding: f64,
    pub residual: f64,
}

/// `loop_fn(t)` is the matrix of the inverse linearized flow at time `t`.
/// The index is the winding of `t -> rho(loop_fn(t))^{-1}`.
pub fn maslov_index<F>(loop_fn: F, samples: usize) -> Result<MaslovResult>
where
    F: Fn(f64) -> Result<SymplecticMatrix>,
{
    for t in [0.0, 1.0] {
        let m = loop_fn(t)?;
        let dim = m.matrix().nrows();
        let gap = (m.matrix() - DMatrix::<f64>::identity(dim, dim)).amax();
        if gap > LOOP_IDENTITY_TOL {
            return Err(Error::NotClosed(gap));
        }
    }
    let path = PhasePath::sample(
        0.0,
        1.0,
        |t| Ok(rho(&loop_fn(t)?)?.inv()),
        samples,
        MAX_REFINE_DEPTH,
    )?;
    if !path.is_closed() {
        let s = path.samples();
        return Err(Error::NotClosed((s[0].1 - s[s.len() - 1].1).norm()));
    }
    let raw = raw_winding(&path);
    let index = raw.round() as i64;
    let residual = (raw - index as f64).abs();
    if residual > MASLOV_RESIDUAL_LIMIT {
        return Err(Error::MaslovResidual {
            residual,
            limit: MASLOV_RESIDUAL_LIMIT,
        });
    }
    Ok(MaslovResult {
        index,
        raw_winding: raw,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointIndependence {
    pub agree: bool,
    pub results: Vec<MaslovResult>,
}

impl PointIndependence {
    /// The shared index, if all points agree.
    pub fn common(&self) -> Option<i64> {
        if self.agree {
            self.results.first().map(|r| r.index)
        } else {
            None
        }
    }
}

/// Computes the index at every supplied point and reports whether they agree.
pub fn point_independence_check<F>(loops: &[F], samples: usize) -> Result<PointIndependence>
where
    F: Fn(f64) -> Result<SymplecticMatrix>,
{
    if loops.len() < 2 {
        return Err(Error::InvalidParameter(
            "point independence needs at least two points".into(),
        ));
    }
    let results = loops
        .iter()
        .map(|l| maslov_index(l, samples))
        .collect::<Result<Vec<_>>>()?;
    let agree = results.iter().all(|r| r.index == results[0].index);
    Ok(PointIndependence { agree, results })
}
