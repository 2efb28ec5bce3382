//! Darboux charts and ordered atlases.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// A point of the ambient model space; its meaning is scenario-defined.
pub type Point = Vec<f64>;

/// One parameter direction of a chain or region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ParamKind {
    Interval {
        lo: f64,
        hi: f64,
    },
    /// Periodic parameter; `lo` and `hi` are identified.
    Circle {
        lo: f64,
        hi: f64,
    },
}

impl ParamKind {
    pub fn interval(lo: f64, hi: f64) -> Self {
        ParamKind::Interval { lo, hi }
    }

    pub fn circle(lo: f64, hi: f64) -> Self {
        ParamKind::Circle { lo, hi }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            ParamKind::Interval { lo, hi } | ParamKind::Circle { lo, hi } => (lo, hi),
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, ParamKind::Circle { .. })
    }

    pub fn length(&self) -> f64 {
        let (lo, hi) = self.bounds();
        hi - lo
    }
}

/// Coordinate functions of a chart.
pub trait ChartMap: Send + Sync {
    /// Darboux coordinates `(q_1..q_n, p_1..p_n)` of an ambient point.
    fn coords(&self, p: &[f64]) -> Result<Vec<f64>>;
    /// Ambient point with the given coordinates.
    fn point(&self, x: &[f64]) -> Result<Point>;
    /// Signed depth: positive inside the chart domain, zero on its boundary.
    fn level(&self, p: &[f64]) -> f64;
}

#[derive(Clone)]
pub struct Chart {
    pub id: usize,
    pub name: String,
    pub n: usize,
    pub coord_names: Vec<String>,
    /// Period of each coordinate, `None` for non-periodic ones.
    pub periods: Vec<Option<f64>>,
    map: Arc<dyn ChartMap>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("id", &self.id)
            .field("name", &self.name)
            .field("n", &self.n)
            .field("coord_names", &self.coord_names)
            .finish()
    }
}

impl Chart {
    pub fn new(
        id: usize,
        name: impl Into<String>,
        n: usize,
        coord_names: Vec<String>,
        periods: Vec<Option<f64>>,
        map: Arc<dyn ChartMap>,
    ) -> Result<Self> {
        if n == 0 || coord_names.len() != 2 * n || periods.len() != 2 * n {
            return Err(Error::InvalidParameter(format!(
                "chart needs 2n = {} coordinate names and periods",
                2 * n
            )));
        }
        Ok(Self {
            id,
            name: name.into(),
            n,
            coord_names,
            periods,
            map,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn coords(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.map.coords(p)
    }

    pub fn point(&self, x: &[f64]) -> Result<Point> {
        self.map.point(x)
    }

    pub fn level(&self, p: &[f64]) -> f64 {
        self.map.level(p)
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.map.level(p) > 0.0
    }

    /// Sign of `omega^n` on the coordinate frame `(dq_1..dq_n, dp_1..dp_n)`,
    /// namely `(-1)^{n(n-1)/2}`.
    pub fn orientation_sign(&self) -> f64 {
        if (self.n * (self.n - 1) / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `b - a` with periodic components reduced to the shortest representative.
    pub fn coord_delta(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter()
            .zip(b)
            .zip(&self.periods)
            .map(|((&x, &y), per)| match per {
                Some(p) => {
                    let d = y - x;
                    d - p * (d / p).round()
                }
                None => y - x,
            })
            .collect()
    }
}

/// Charts ordered by their ordinal `id`.
#[derive(Debug, Clone)]
pub struct Atlas {
    charts: Vec<Chart>,
}

impl Atlas {
    /// Sorts by id; ids must be distinct and all charts of the same dimension.
    pub fn new(mut charts: Vec<Chart>) -> Result<Self> {
        if charts.is_empty() {
            return Err(Error::InvalidParameter("empty atlas".into()));
        }
        charts.sort_by_key(|c| c.id);
        for w in charts.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::InvalidParameter(format!(
                    "duplicate chart id {}",
                    w[0].id
                )));
            }
        }
        let n = charts[0].n;
        if charts.iter().any(|c| c.n != n) {
            return Err(Error::InvalidParameter(
                "charts of different dimension".into(),
            ));
        }
        Ok(Self { charts })
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, id: usize) -> Option<&Chart> {
        self.charts.iter().find(|c| c.id == id)
    }

    pub fn n(&self) -> usize {
        self.charts[0].n
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }
}
