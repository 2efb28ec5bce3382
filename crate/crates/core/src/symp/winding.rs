//! Sampled circle-valued paths and their winding numbers.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Consecutive samples must differ in phase by strictly less than this.
pub const PHASE_STEP_LIMIT: f64 = FRAC_PI_2;
pub const DEFAULT_SAMPLES: usize = 2048;
pub const MAX_REFINE_DEPTH: u32 = 12;
/// Endpoint gap allowed for a closed path.
pub const PHASE_TOL: f64 = 1e-8;
const UNIT_MODULUS_TOL: f64 = 1e-10;

/// Phase increment from `a` to `b` in `(-pi, pi]`.
pub fn phase_step(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePath {
    samples: Vec<(f64, Complex64)>,
    closed: bool,
}

impl PhasePath {
    /// Validates unit modulus, increasing parameters and the step bound.
    pub fn new(samples: Vec<(f64, Complex64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter(
                "phase path needs at least two samples".into(),
            ));
        }
        for (t, v) in &samples {
            if (v.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::InvalidParameter(format!(
                    "sample at t={t} has modulus {}",
                    v.norm()
                )));
            }
        }
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter(
                    "sample parameters must increase".into(),
                ));
            }
            let step = phase_step(w[0].1, w[1].1);
            if step.abs() >= PHASE_STEP_LIMIT {
                return Err(Error::InsufficientResolution(format!(
                    "phase step {step:.3} between t={} and t={}",
                    w[0].0, w[1].0
                )));
            }
        }
        let closed = (samples[0].1 - samples[samples.len() - 1].1).norm() <= PHASE_TOL;
        Ok(Self { samples, closed })
    }

    /// Samples `f` on `base + 1` uniform points of `[lo, hi]`, bisecting any
    /// interval whose phase step reaches the limit, to at most `max_depth` levels.
    pub fn sample<F>(lo: f64, hi: f64, mut f: F, base: usize, max_depth: u32) -> Result<Self>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        if base == 0 || hi <= lo {
            return Err(Error::InvalidParameter(format!(
                "bad sampling request [{lo}, {hi}] x {base}"
            )));
        }
        let mut eval = |t: f64| -> Result<Complex64> {
            let v = f(t)?;
            let r = v.norm();
            if !r.is_finite() || r == 0.0 {
                return Err(Error::InvalidParameter(format!("phase value {v} at t={t}")));
            }
            Ok(v / r)
        };
        let h = (hi - lo) / base as f64;
        let mut out = Vec::with_capacity(base + 1);
        let mut prev = (lo, eval(lo)?);
        out.push(prev);
        for i in 1..=base {
            let t = if i == base { hi } else { lo + h * i as f64 };
            let next = (t, eval(t)?);
            refine(&mut eval, prev, next, max_depth, &mut out)?;
            prev = next;
        }
        let closed = (out[0].1 - out[out.len() - 1].1).norm() <= PHASE_TOL;
        Ok(Self {
            samples: out,
            closed,
        })
    }

    pub fn samples(&self) -> &[(f64, Complex64)] {
        &self.samples
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// `(t_start, t_end, phase increment)` per interval.
    pub fn increments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.samples
            .windows(2)
            .map(|w| (w[0].0, w[1].0, phase_step(w[0].1, w[1].1)))
    }

    pub fn total_phase(&self) -> f64 {
        self.increments().map(|(_, _, d)| d).sum()
    }

    pub fn max_step(&self) -> f64 {
        self.increments()
            .map(|(_, _, d)| d.abs())
            .fold(0.0, f64::max)
    }

    /// Pointwise inverse (complex conjugate) of the path.
    pub fn inverse(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|&(t, v)| (t, v.conj())).collect(),
            closed: self.closed,
        }
    }

    /// The path traversed backwards over the same parameter interval.
    pub fn reversed(&self) -> Self {
        let lo = self.samples[0].0;
        let hi = self.samples[self.samples.len() - 1].0;
        Self {
            samples: self
                .samples
                .iter()
                .rev()
                .map(|&(t, v)| (lo + hi - t, v))
                .collect(),
            closed: self.closed,
        }
    }

    /// Concatenation; `other` starts where `self` ends and is shifted in `t`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let (t_end, v_end) = self.samples[self.samples.len() - 1];
        let (t0, v0) = other.samples[0];
        if (v_end - v0).norm() > PHASE_TOL {
            return Err(Error::InvalidParameter("paths do not join".into()));
        }
        let mut samples = self.samples.clone();
        samples.extend(other.samples[1..].iter().map(|&(t, v)| (t - t0 + t_end, v)));
        Self::new(samples)
    }
}

fn refine<F>(
    eval: &mut F,
    a: (f64, Complex64),
    b: (f64, Complex64),
    depth: u32,
    out: &mut Vec<(f64, Complex64)>,
) -> Result<()>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if phase_step(a.1, b.1).abs() < PHASE_STEP_LIMIT {
        out.push(b);
        return Ok(());
    }
    if depth == 0 {
        return Err(Error::InsufficientResolution(format!(
            "phase step {:.3} on [{:.6e}, {:.6e}] after maximal refinement",
            phase_step(a.1, b.1),
            a.0,
            b.0
        )));
    }
    let tm = 0.5 * (a.0 + b.0);
    let m = (tm, eval(tm)?);
    refine(eval, a, m, depth - 1, out)?;
    refine(eval, m, b, depth - 1, out)
}

/// Total unwrapped phase divided by `2 pi`, before rounding.
pub fn raw_winding(p: &PhasePath) -> f64 {
    p.total_phase() / (2.0 * PI)
}

/// Winding number of a closed path; `t -> e^{2 pi i t}` has winding `+1`.
pub fn winding_number(p: &PhasePath) -> Result<i64> {
    if !p.is_closed() {
        let gap = (p.samples[0].1 - p.samples[p.samples.len() - 1].1).norm();
        return Err(Error::NotClosed(gap));
    }
    Ok(raw_winding(p).round() as i64)
}
