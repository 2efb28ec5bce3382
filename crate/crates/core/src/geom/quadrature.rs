//! Quadrature settings and one-dimensional node sets.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symp::winding::{DEFAULT_SAMPLES, MAX_REFINE_DEPTH};

/// Resolution of every numerical integral in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre order per interval cell.
    pub gl_order: usize,
    /// Equal cells per interval parameter.
    pub cells: usize,
    /// Base samples along the phase-winding circle (refined adaptively).
    pub circle_samples: usize,
    /// Uniform nodes on every other circle parameter.
    pub periodic_nodes: usize,
    /// Gauss-Legendre order per cell of the outer time integral.
    pub t_order: usize,
    /// Cells of the time integral; two keeps reparameterized loops with a kink at 1/2 exact.
    pub t_cells: usize,
    /// Samples of each Maslov loop.
    pub maslov_samples: usize,
    pub max_refine_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            gl_order: 16,
            cells: 1,
            circle_samples: DEFAULT_SAMPLES,
            periodic_nodes: 16,
            t_order: 16,
            t_cells: 2,
            maslov_samples: DEFAULT_SAMPLES,
            max_refine_depth: MAX_REFINE_DEPTH,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.gl_order < 2 || self.t_order < 2 {
            return Err(Error::InvalidParameter(
                "Gauss-Legendre orders must be >= 2".into(),
            ));
        }
        if self.cells == 0 || self.t_cells == 0 {
            return Err(Error::InvalidParameter(
                "cell counts must be positive".into(),
            ));
        }
        if self.circle_samples < 4 || self.periodic_nodes == 0 || self.maslov_samples < 4 {
            return Err(Error::InvalidParameter("sample counts too small".into()));
        }
        Ok(())
    }

    /// Every order and sample count halved (rounded up, with floors); used for error estimates.
    pub fn halved(&self) -> Self {
        Self {
            gl_order: (self.gl_order / 2).max(2),
            cells: self.cells,
            circle_samples: (self.circle_samples / 2).max(4),
            periodic_nodes: self.periodic_nodes.div_ceil(2).max(1),
            t_order: (self.t_order / 2).max(2),
            t_cells: self.t_cells,
            maslov_samples: (self.maslov_samples / 2).max(4),
            max_refine_depth: self.max_refine_depth,
        }
    }

    pub fn doubled(&self) -> Self {
        Self {
            gl_order: self.gl_order * 2,
            cells: self.cells,
            circle_samples: self.circle_samples * 2,
            periodic_nodes: self.periodic_nodes * 2,
            t_order: self.t_order * 2,
            t_cells: self.t_cells,
            maslov_samples: self.maslov_samples * 2,
            max_refine_depth: self.max_refine_depth,
        }
    }
}

/// Composite Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64, order: usize, cells: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).expect("nonzero"));
    let cells = cells.max(1);
    let h = (b - a) / cells as f64;
    let mut out = Vec::with_capacity(order * cells);
    for c in 0..cells {
        let lo = a + h * c as f64;
        for &(x, w) in rule.iter() {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

/// Uniform nodes on a circle of length `b - a`, offset by half a spacing.
pub fn periodic_nodes(a: f64, b: f64, count: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / count as f64;
    (0..count).map(|i| (a + h * (i as f64 + 0.5), h)).collect()
}

/// Uniform nodes for the full circle `[0, 2 pi)`.
pub fn angle_nodes(count: usize) -> Vec<(f64, f64)> {
    periodic_nodes(0.0, 2.0 * PI, count)
}
