//! Oriented overlap chains and their validation against an atlas.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::chart::{Atlas, Chart, ParamKind, Point};
use super::forms::{omega_power, tangents, TANGENT_STEP};
use crate::error::{Error, Result};

/// Largest `|level|` of the source chart accepted on its boundary.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Samples per chain during validation.
pub const VALIDATION_SAMPLES: usize = 24;

pub type ChainMap = Arc<dyn Fn(&[f64]) -> Result<Point> + Send + Sync>;

/// A parameterized piece of `(dB_i minus the earlier charts) meet B_k`.
#[derive(Clone)]
pub struct Chain {
    pub name: String,
    /// `(i, k)` with `i < k`; the chain lies on the boundary of chart `i`.
    pub pair: (usize, usize),
    params: Vec<ParamKind>,
    orientation_sign: f64,
    circle_direction: Option<usize>,
    map: ChainMap,
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chain")
            .field("name", &self.name)
            .field("pair", &self.pair)
            .field("params", &self.params)
            .field("orientation_sign", &self.orientation_sign)
            .field("circle_direction", &self.circle_direction)
            .finish()
    }
}

impl Chain {
    pub fn new(
        name: impl Into<String>,
        pair: (usize, usize),
        params: Vec<ParamKind>,
        orientation_sign: f64,
        circle_direction: Option<usize>,
        map: ChainMap,
    ) -> Result<Self> {
        if let Some(c) = circle_direction {
            if c >= params.len() || !params[c].is_circle() {
                return Err(Error::InvalidParameter(format!(
                    "circle direction {c} is not a circle parameter"
                )));
            }
        }
        if orientation_sign.abs() != 1.0 {
            return Err(Error::InvalidParameter(
                "orientation sign must be +1 or -1".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            pair,
            params,
            orientation_sign,
            circle_direction,
            map,
        })
    }

    pub fn params(&self) -> &[ParamKind] {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn orientation_sign(&self) -> f64 {
        self.orientation_sign
    }

    pub fn circle_direction(&self) -> Option<usize> {
        self.circle_direction
    }

    pub fn point(&self, u: &[f64]) -> Result<Point> {
        (self.map)(u)
    }

    /// The same chain with opposite orientation.
    pub fn reversed(&self) -> Self {
        Self {
            orientation_sign: -self.orientation_sign,
            name: format!("-{}", self.name),
            ..self.clone()
        }
    }
}

fn interior_sample(params: &[ParamKind], rng: &mut ChaCha8Rng) -> Vec<f64> {
    params
        .iter()
        .map(|p| {
            let (lo, hi) = p.bounds();
            let m = 0.05 * (hi - lo);
            rng.gen_range(lo + m..hi - m)
        })
        .collect()
}

fn chart_of<'a>(atlas: &'a Atlas, id: usize) -> Result<&'a Chart> {
    atlas
        .chart(id)
        .ok_or_else(|| Error::ValidationFailure(format!("no chart with id {id}")))
}

/// Outward direction of chart `i` at `p`: minus the coordinate gradient of its level function.
fn outward_normal(chart: &Chart, p: &[f64]) -> Result<DVector<f64>> {
    let x = chart.coords(p)?;
    let mut y = x.clone();
    let mut g = DVector::zeros(x.len());
    for j in 0..x.len() {
        y[j] = x[j] + TANGENT_STEP;
        let plus = chart.level(&chart.point(&y)?);
        y[j] = x[j] - TANGENT_STEP;
        let minus = chart.level(&chart.point(&y)?);
        y[j] = x[j];
        g[j] = -(plus - minus) / (2.0 * TANGENT_STEP);
    }
    Ok(g)
}

fn validate_chain(atlas: &Atlas, chain: &Chain, rng: &mut ChaCha8Rng) -> Result<()> {
    let fail = |msg: String| {
        Err(Error::ValidationFailure(format!(
            "chain {}: {msg}",
            chain.name
        )))
    };
    let (i, k) = chain.pair;
    if i >= k {
        return fail(format!("pair ({i}, {k}) is not ordered"));
    }
    let ci = chart_of(atlas, i)?;
    let ck = chart_of(atlas, k)?;
    if chain.dim() + 1 != ci.dim() {
        return fail(format!(
            "dimension {} in a {}-manifold",
            chain.dim(),
            ci.dim()
        ));
    }
    let earlier: Vec<&Chart> = atlas
        .charts()
        .iter()
        .filter(|c| c.id < k && c.id != i)
        .collect();
    let all: Vec<usize> = (0..chain.dim()).collect();
    let map = |u: &[f64]| chain.point(u);
    let mut seen: Vec<(Vec<f64>, Point)> = Vec::new();
    for _ in 0..VALIDATION_SAMPLES {
        let u = interior_sample(chain.params(), rng);
        let p = chain.point(&u)?;
        let li = ci.level(&p);
        if li.abs() > BOUNDARY_TOL {
            return fail(format!(
                "point at {u:?} is off the boundary of chart {i} (level {li:.3e})"
            ));
        }
        if !ck.contains(&p) {
            return fail(format!("point at {u:?} is outside chart {k}"));
        }
        if let Some(c) = earlier.iter().find(|c| c.contains(&p)) {
            return fail(format!("point at {u:?} lies in earlier chart {}", c.id));
        }
        let mut frame = vec![outward_normal(ci, &p)?];
        frame.extend(tangents(ci, &map, &u, &all)?);
        let vol = omega_power(&frame);
        if vol * chain.orientation_sign() <= 0.0 {
            return fail(format!(
                "declared orientation {} disagrees with the boundary orientation of chart {i}",
                chain.orientation_sign()
            ));
        }
        for (v, q) in &seen {
            let dp: f64 = chain
                .params()
                .iter()
                .zip(v.iter().zip(&u))
                .map(|(kind, (a, b))| {
                    let d = (a - b).abs();
                    if kind.is_circle() {
                        d.min(kind.length() - d)
                    } else {
                        d
                    }
                })
                .fold(0.0, f64::max);
            let dq = q
                .iter()
                .zip(&p)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if dp > 1e-6 && dq < 1e-12 {
                return fail("parameterization is not injective".into());
            }
        }
        seen.push((u, p));
    }
    Ok(())
}

/// Validates the declared chains against the atlas and returns them ordered by `(i, k)`.
///
/// Each chain is spot-checked for lying on the boundary of chart `i`, inside
/// chart `k` and outside every other chart before `k`, for injectivity, and
/// for carrying the boundary orientation of chart `i`.
pub fn build_overlap_chains(atlas: &Atlas, declared: Vec<Chain>) -> Result<Vec<Chain>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for chain in &declared {
        validate_chain(atlas, chain, &mut rng)?;
    }
    let mut out = declared;
    out.sort_by_key(|c| c.pair);
    Ok(out)
}
