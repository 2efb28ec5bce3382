//! Toric loops on the Hirzebruch surface `M_{k, tau, mu}`.
//!
//! Points are representatives `z in C^4` (stored as eight reals) of
//! `{k|z1|^2 + |z2|^2 + |z4|^2 = tau/pi, |z1|^2 + |z3|^2 = mu/pi} / T^2` with
//! `(a, b) . z = (a^k b z1, a z2, b z3, a z4)`. Moment coordinates are
//! `y = pi |z1|^2` and `x = pi |z2|^2`.
//!
//! Chart 0 is `B0 = {|z_j| > eps}` with `(rho1^2/2, rho2^2/2; phi1, phi2)`;
//! chart `j` is `B'_j = {|z_j| < 2 eps, |z_r| > eps for r != j}` with a
//! complex Darboux pair for `z_j` and an action-angle pair. Coordinates are
//! always listed as `(q1, q2, p1, p2)`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{to_json, Check, ScenarioOutcome};
use crate::error::{Error, Result};
use crate::geom::{
    build_overlap_chains, gauss_legendre, Atlas, Chain, Chart, ChartMap, Estimate, JacobianMode,
    ParamKind, Point, QuadratureSpec, TransitionPhase, VolumeRegion,
};
use crate::invariant::{
    certify_chart_invariance, certify_closed_loop, certify_normalization, chern_pairing,
    compute_invariant, extrapolate_ladder_in, linear_extrapolation, Extrapolation,
    HamiltonianLoopModel, InvariantProblem, LadderReport, LadderRung, LinearFit, Overlap,
};
use crate::symp::SymplecticMatrix;
use crate::toric::{
    boundary_terms_psi, boundary_terms_psi_tilde, chern_pairing_exact, closed_form_invariants,
    manifold_volume, DelzantTrapezoid, ExactValue,
};

pub const DEFAULT_LADDER: [f64; 3] = [0.05, 0.025, 0.0125];
pub const MASLOV_POINTS: usize = 3;

/// Relative tolerance on the extrapolated invariants.
pub const INVARIANT_REL_TOL: f64 = 0.01;
/// Relative tolerance on each extrapolated boundary term.
pub const TERM_REL_TOL: f64 = 0.02;
pub const RATIO_REL_TOL: f64 = 0.02;
pub const CHERN_REL_TOL: f64 = 0.01;
pub const KAPPA_TOL: f64 = 1e-12;

const TWO_PI: f64 = 2.0 * PI;

/// The rotated coordinate: `z1` for `psi`, `z2` for `psi_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HirzebruchLoop {
    Psi,
    PsiTilde,
}

impl HirzebruchLoop {
    pub fn name(self) -> &'static str {
        match self {
            HirzebruchLoop::Psi => "psi",
            HirzebruchLoop::PsiTilde => "psi-tilde",
        }
    }

    fn index(self) -> usize {
        match self {
            HirzebruchLoop::Psi => 0,
            HirzebruchLoop::PsiTilde => 1,
        }
    }

    /// Winding of the complex Darboux pair of each chart under the loop.
    pub fn chart_windings(self, k: u32) -> [i64; 5] {
        match self {
            HirzebruchLoop::Psi => [0, 1, 0, -1, 0],
            HirzebruchLoop::PsiTilde => [0, 0, 1, k as i64, -1],
        }
    }
}

/// Floating-point view of the surface with a tube radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub k: u32,
    pub tau: f64,
    pub mu: f64,
    pub eps: f64,
}

impl Geometry {
    fn kf(&self) -> f64 {
        self.k as f64
    }

    pub fn lambda(&self) -> f64 {
        self.tau - self.kf() * self.mu
    }

    /// `pi eps^2`, the moment value where `|z_j| = eps`.
    pub fn e(&self) -> f64 {
        PI * self.eps * self.eps
    }

    /// `eps^2 / 2`, the action value where `|z_j| = eps`.
    fn e2(&self) -> f64 {
        0.5 * self.eps * self.eps
    }
}

fn zs(p: &[f64]) -> [Complex64; 4] {
    [
        Complex64::new(p[0], p[1]),
        Complex64::new(p[2], p[3]),
        Complex64::new(p[4], p[5]),
        Complex64::new(p[6], p[7]),
    ]
}

fn pack(z: [Complex64; 4]) -> Point {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn unit(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / r
    }
}

fn modulus(sq: f64, what: &str) -> Result<f64> {
    if sq < -1e-12 || !sq.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{what}^2 = {sq:.3e} is negative"
        )));
    }
    Ok(sq.max(0.0).sqrt())
}

fn polar(r: f64, a: f64) -> Complex64 {
    Complex64::from_polar(r, a)
}

fn real(r: f64) -> Complex64 {
    Complex64::new(r, 0.0)
}

struct HirzebruchChart {
    id: usize,
    g: Geometry,
}

impl HirzebruchChart {
    fn rho1_sq_from_rho3_sq(&self, r3: f64) -> f64 {
        self.g.mu / PI - r3
    }

    fn rho4_sq(&self, r1: f64, r2: f64) -> f64 {
        self.g.tau / PI - self.g.kf() * r1 - r2
    }
}

impl ChartMap for HirzebruchChart {
    fn coords(&self, p: &[f64]) -> Result<Vec<f64>> {
        let z = zs(p);
        let k = self.g.k;
        let u = z.map(unit);
        Ok(match self.id {
            0 => {
                let phi1 = (z[0] * u[2].conj() * u[3].conj().powu(k)).arg();
                let phi2 = (z[1] * u[3].conj()).arg();
                vec![0.5 * z[0].norm_sqr(), 0.5 * z[1].norm_sqr(), phi1, phi2]
            }
            1 => {
                let w = z[0] * u[2].conj() * u[3].conj().powu(k);
                let phi2 = (z[1] * u[3].conj()).arg();
                vec![w.re, 0.5 * z[1].norm_sqr(), w.im, phi2]
            }
            2 => {
                let w = z[1] * u[3].conj();
                let xi3 = (z[2] * u[0].conj() * u[3].powu(k)).arg();
                vec![w.re, 0.5 * z[2].norm_sqr(), w.im, xi3]
            }
            3 => {
                let w = z[2] * u[0].conj() * u[1].powu(k);
                let chi4 = (z[3] * u[1].conj()).arg();
                vec![w.re, 0.5 * z[3].norm_sqr(), w.im, chi4]
            }
            _ => {
                let zeta1 = (z[0] * u[2].conj() * u[1].conj().powu(k)).arg();
                let w = z[3] * u[1].conj();
                vec![0.5 * z[0].norm_sqr(), w.re, zeta1, w.im]
            }
        })
    }

    fn point(&self, x: &[f64]) -> Result<Point> {
        let z = match self.id {
            0 => {
                let (r1s, r2s) = (2.0 * x[0], 2.0 * x[1]);
                let r1 = modulus(r1s, "rho1")?;
                let r2 = modulus(r2s, "rho2")?;
                let r3 = modulus(self.g.mu / PI - r1s, "rho3")?;
                let r4 = modulus(self.rho4_sq(r1s, r2s), "rho4")?;
                [polar(r1, x[2]), polar(r2, x[3]), real(r3), real(r4)]
            }
            1 => {
                let z1 = Complex64::new(x[0], x[2]);
                let r1s = z1.norm_sqr();
                let r2s = 2.0 * x[1];
                let r2 = modulus(r2s, "rho2")?;
                let r3 = modulus(self.g.mu / PI - r1s, "rho3")?;
                let r4 = modulus(self.rho4_sq(r1s, r2s), "rho4")?;
                [z1, polar(r2, x[3]), real(r3), real(r4)]
            }
            2 => {
                let z2 = Complex64::new(x[0], x[2]);
                let r3s = 2.0 * x[1];
                let r3 = modulus(r3s, "rho3")?;
                let r1s = self.rho1_sq_from_rho3_sq(r3s);
                let r1 = modulus(r1s, "rho1")?;
                let r4 = modulus(self.rho4_sq(r1s, z2.norm_sqr()), "rho4")?;
                [real(r1), z2, polar(r3, x[3]), real(r4)]
            }
            3 => {
                let z3 = Complex64::new(x[0], x[2]);
                let r1s = self.rho1_sq_from_rho3_sq(z3.norm_sqr());
                let r1 = modulus(r1s, "rho1")?;
                let r4s = 2.0 * x[1];
                let r4 = modulus(r4s, "rho4")?;
                let r2 = modulus(self.g.tau / PI - self.g.kf() * r1s - r4s, "rho2")?;
                [real(r1), real(r2), z3, polar(r4, x[3])]
            }
            _ => {
                let z4 = Complex64::new(x[1], x[3]);
                let r1s = 2.0 * x[0];
                let r1 = modulus(r1s, "rho1")?;
                let r3 = modulus(self.g.mu / PI - r1s, "rho3")?;
                let r2 = modulus(self.g.tau / PI - self.g.kf() * r1s - z4.norm_sqr(), "rho2")?;
                [polar(r1, x[2]), real(r2), real(r3), z4]
            }
        };
        Ok(pack(z))
    }

    fn level(&self, p: &[f64]) -> f64 {
        let z = zs(p);
        let eps = self.g.eps;
        let mut lv = f64::INFINITY;
        for (j, zj) in z.iter().enumerate() {
            let v = if self.id == j + 1 {
                2.0 * eps - zj.norm()
            } else {
                zj.norm() - eps
            };
            lv = lv.min(v);
        }
        lv
    }
}

fn chart_names(id: usize) -> Vec<String> {
    let names: [&str; 4] = match id {
        0 => ["Q1", "Q2", "phi1", "phi2"],
        1 => ["x1", "Q2", "y1", "phi2"],
        2 => ["a2", "Q3", "b2", "xi3"],
        3 => ["x3", "Q4", "y3", "chi4"],
        _ => ["Q1", "a4", "zeta1", "b4"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

fn chart_periods(id: usize) -> Vec<Option<f64>> {
    let a = Some(TWO_PI);
    match id {
        0 => vec![None, None, a, a],
        4 => vec![None, None, a, None],
        _ => vec![None, None, None, a],
    }
}

/// Charts `B0, B'1, ..., B'4` at tube radius `g.eps`.
pub fn hirzebruch_atlas(g: Geometry) -> Result<Atlas> {
    let names = ["B0", "B'1", "B'2", "B'3", "B'4"];
    let charts = (0..5)
        .map(|id| {
            Chart::new(
                id,
                names[id],
                2,
                chart_names(id),
                chart_periods(id),
                Arc::new(HirzebruchChart { id, g }),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Atlas::new(charts)
}

/// `d(Q1, Q2, phi1, phi2) / d(x1, Q2, y1, phi2)` at a point of `B0 and B'1`.
pub fn r01_jacobian(g: Geometry, p: &[f64]) -> Result<DMatrix<f64>> {
    let x = HirzebruchChart { id: 1, g }.coords(p)?;
    let (x1, y1) = (x[0], x[2]);
    let r2 = x1 * x1 + y1 * y1;
    if r2 == 0.0 {
        return Err(Error::InvalidParameter(
            "r01 is undefined where z1 = 0".into(),
        ));
    }
    Ok(DMatrix::from_row_slice(
        4,
        4,
        &[
            x1,
            0.0,
            y1,
            0.0, //
            0.0,
            1.0,
            0.0,
            0.0, //
            -y1 / r2,
            0.0,
            x1 / r2,
            0.0, //
            0.0,
            0.0,
            0.0,
            1.0,
        ],
    ))
}

/// Point of the boundary chain `A'_{0j}` from its parameters, in `B0` coordinates.
pub fn chain_point(g: Geometry, j: usize, u: &[f64]) -> Result<Point> {
    let b0 = HirzebruchChart { id: 0, g };
    let e2 = g.e2();
    let x = match j {
        1 => [e2, u[1], u[0], u[2]],
        2 => [u[0], e2, u[1], u[2]],
        3 => [(g.mu - g.e()) / TWO_PI, u[1], u[0], u[2]],
        4 => [
            u[0],
            (g.tau - TWO_PI * g.kf() * u[0] - g.e()) / TWO_PI,
            u[1],
            u[2],
        ],
        _ => return Err(Error::InvalidParameter(format!("no chain A'0{j}"))),
    };
    b0.point(&x)
}

/// Parameter ranges, orientation sign and designated circle of `A'_{0j}`.
pub fn chain_layout(g: Geometry, j: usize) -> (Vec<ParamKind>, f64, usize) {
    let (e, e2, k) = (g.e(), g.e2(), g.kf());
    let circle = ParamKind::circle(0.0, TWO_PI);
    match j {
        1 => (
            vec![
                circle,
                ParamKind::interval(e2, (g.tau - k * e - e) / TWO_PI),
                circle,
            ],
            -1.0,
            0,
        ),
        2 => (
            vec![ParamKind::interval(e2, (g.mu - e) / TWO_PI), circle, circle],
            -1.0,
            2,
        ),
        3 => (
            vec![
                circle,
                ParamKind::interval(e2, (g.lambda() + k * e - e) / TWO_PI),
                circle,
            ],
            1.0,
            0,
        ),
        _ => (
            vec![ParamKind::interval(e2, (g.mu - e) / TWO_PI), circle, circle],
            1.0,
            2,
        ),
    }
}

/// Point of the volume region of chart `j` (`j = 0` is `B0`, otherwise `{|z_j| <= eps}`).
///
/// Region 0 uses `(Q1, phi1, s, phi2)`; regions 1..3 use `(r, theta, s, angle)`
/// and region 4 uses `(s, zeta1, r, theta)`, with `s` in `[0, 1]` spanning the
/// remaining action between its `eps` limits.
pub fn region_point(g: Geometry, j: usize, u: &[f64]) -> Result<Point> {
    let chart = HirzebruchChart { id: j, g };
    let (e, e2, k) = (g.e(), g.e2(), g.kf());
    let lerp = |s: f64, hi: f64| e2 + s * (hi - e2);
    let x = match j {
        0 => {
            let q1 = u[0];
            let q2 = lerp(u[2], (g.tau - TWO_PI * k * q1 - e) / TWO_PI);
            [q1, q2, u[1], u[3]]
        }
        1 => {
            let w = polar(u[0], u[1]);
            let q2 = lerp(u[2], (g.tau - k * PI * u[0] * u[0] - e) / TWO_PI);
            [w.re, q2, w.im, u[3]]
        }
        2 => {
            let w = polar(u[0], u[1]);
            [w.re, lerp(u[2], (g.mu - e) / TWO_PI), w.im, u[3]]
        }
        3 => {
            let w = polar(u[0], u[1]);
            let r1s = g.mu / PI - u[0] * u[0];
            let hi = 0.5 * (g.tau / PI - k * r1s - g.eps * g.eps);
            [w.re, lerp(u[2], hi), w.im, u[3]]
        }
        _ => {
            let w = polar(u[2], u[3]);
            let hi =
                ((g.mu - e) / TWO_PI).min((g.tau / PI - u[2] * u[2] - g.eps * g.eps) / (2.0 * k));
            [lerp(u[0], hi), w.re, u[1], w.im]
        }
    };
    chart.point(&x)
}

fn region_params(g: Geometry, j: usize) -> Vec<ParamKind> {
    let circle = ParamKind::circle(0.0, TWO_PI);
    let unit = ParamKind::interval(0.0, 1.0);
    let disk = ParamKind::interval(0.0, g.eps);
    match j {
        0 => vec![
            ParamKind::interval(g.e2(), (g.mu - g.e()) / TWO_PI),
            circle,
            unit,
            circle,
        ],
        4 => vec![unit, circle, disk, circle],
        _ => vec![disk, circle, unit, circle],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HirzebruchExpected {
    pub kappa: ExactValue,
    pub kappa_tilde: ExactValue,
    pub n_psi: [ExactValue; 4],
    pub n_psi_tilde: [ExactValue; 4],
    pub i_psi: ExactValue,
    pub i_psi_tilde: ExactValue,
    pub ratio: ExactValue,
    pub chern: ExactValue,
    pub volume: ExactValue,
}

pub fn hirzebruch_expected(t: &DelzantTrapezoid) -> HirzebruchExpected {
    let (i_psi, i_psi_tilde) = closed_form_invariants(t);
    HirzebruchExpected {
        kappa: t.kappa(),
        kappa_tilde: t.kappa_tilde(),
        n_psi: boundary_terms_psi(t),
        n_psi_tilde: boundary_terms_psi_tilde(t),
        ratio: i_psi_tilde.clone() / i_psi.clone(),
        i_psi,
        i_psi_tilde,
        chern: chern_pairing_exact(t),
        volume: manifold_volume(t),
    }
}

/// Problem and loop model at one tube radius.
#[derive(Debug, Clone)]
pub struct HirzebruchBuild {
    pub geometry: Geometry,
    pub problem: InvariantProblem,
    pub model: HamiltonianLoopModel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HirzebruchScenario {
    pub trapezoid: DelzantTrapezoid,
    /// Strictly decreasing tube radii.
    pub ladder: Vec<f64>,
    pub extrapolation: Extrapolation,
}

impl HirzebruchScenario {
    pub fn new(trapezoid: DelzantTrapezoid) -> Self {
        Self {
            trapezoid,
            ladder: DEFAULT_LADDER.to_vec(),
            extrapolation: Extrapolation::Eps,
        }
    }

    pub fn with_extrapolation(mut self, variable: Extrapolation) -> Self {
        self.extrapolation = variable;
        self
    }

    pub fn parse(k: u32, tau: &str, mu: &str) -> Result<Self> {
        Ok(Self::new(DelzantTrapezoid::parse(k, tau, mu)?))
    }

    pub fn with_ladder(mut self, ladder: Vec<f64>) -> Result<Self> {
        if ladder.len() < 2
            || ladder.windows(2).any(|w| w[1] >= w[0])
            || ladder.iter().any(|&e| e <= 0.0)
        {
            return Err(Error::InvalidParameter(format!(
                "ladder {ladder:?} must have at least two positive, strictly decreasing radii"
            )));
        }
        self.ladder = ladder;
        Ok(self)
    }

    /// Quadrature used by default; lighter than the generic default.
    pub fn default_quadrature() -> QuadratureSpec {
        QuadratureSpec {
            gl_order: 8,
            periodic_nodes: 4,
            circle_samples: 512,
            ..QuadratureSpec::default()
        }
    }

    pub fn expected(&self) -> HirzebruchExpected {
        hirzebruch_expected(&self.trapezoid)
    }

    pub fn geometry(&self, eps: f64) -> Result<Geometry> {
        let t = &self.trapezoid;
        let g = Geometry {
            k: t.k,
            tau: t.tau.to_f64(),
            mu: t.mu.to_f64(),
            eps,
        };
        let room = g.lambda().min(g.mu);
        if !(eps > 0.0) || (g.kf() + 4.0) * g.e() >= room {
            return Err(Error::InvalidParameter(format!(
                "tube radius {eps} is too large for lambda = {}, mu = {}",
                g.lambda(),
                g.mu
            )));
        }
        Ok(g)
    }

    fn kappa_value(&self, which: HirzebruchLoop) -> f64 {
        match which {
            HirzebruchLoop::Psi => self.trapezoid.kappa().to_f64(),
            HirzebruchLoop::PsiTilde => self.trapezoid.kappa_tilde().to_f64(),
        }
    }

    /// Rotation of `z1` (or `z2`) by `2 pi t`, generated by `pi |z|^2 - kappa`.
    pub fn loop_model(&self, which: HirzebruchLoop) -> HamiltonianLoopModel {
        let w = which.index();
        let kappa = self.kappa_value(which);
        let windings = which.chart_windings(self.trapezoid.k);
        let rotate = move |p: &[f64], a: f64| -> Point {
            let mut z = zs(p);
            z[w] *= Complex64::from_polar(1.0, a);
            pack(z)
        };
        let f = move |p: &[f64]| PI * zs(p)[w].norm_sqr() - kappa;
        HamiltonianLoopModel::new(
            which.name(),
            2,
            Arc::new(move |t, p| Ok(rotate(p, TWO_PI * t))),
            Arc::new(move |t, p| Ok(rotate(p, -TWO_PI * t))),
            Arc::new(move |_, p| f(p)),
        )
        .with_collapsed_weight(Arc::new(f))
        .with_linearization(Arc::new(move |chart: &Chart, t, _| {
            // The complex pair turns by 2 pi w t; the action-angle pair is translated.
            let rot = SymplecticMatrix::rotation(-TWO_PI * windings[chart.id] as f64 * t);
            let id = SymplecticMatrix::identity(1);
            Ok(match chart.id {
                0 => SymplecticMatrix::identity(2),
                4 => id.direct_sum(&rot),
                _ => rot.direct_sum(&id),
            })
        }))
    }

    fn chart_samples(
        &self,
        g: Geometry,
        rng: &mut ChaCha8Rng,
        j: usize,
        count: usize,
    ) -> Result<Vec<Point>> {
        (0..count)
            .map(|_| {
                let a = rng.gen_range(0.0..TWO_PI);
                let b = rng.gen_range(0.0..TWO_PI);
                let s = rng.gen_range(0.2..0.8);
                let u = match j {
                    0 => {
                        let (lo, hi) = (g.e2(), (g.mu - g.e()) / TWO_PI);
                        vec![lo + rng.gen_range(0.2..0.8) * (hi - lo), a, s, b]
                    }
                    4 => vec![s, a, rng.gen_range(0.2..1.8) * g.eps, b],
                    _ => vec![rng.gen_range(0.2..1.8) * g.eps, a, s, b],
                };
                region_point(g, j, &u)
            })
            .collect()
    }

    /// Atlas, chains, phases, regions and a certified loop at radius `eps`.
    pub fn build(&self, eps: f64, which: HirzebruchLoop) -> Result<HirzebruchBuild> {
        let g = self.geometry(eps)?;
        let atlas = hirzebruch_atlas(g)?;
        let declared = (1..=4)
            .map(|j| {
                let (params, sign, circle) = chain_layout(g, j);
                Chain::new(
                    format!("A'0{j}"),
                    (0, j),
                    params,
                    sign,
                    Some(circle),
                    Arc::new(move |u| chain_point(g, j, u)),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let chains = build_overlap_chains(&atlas, declared)?;
        let overlaps = chains
            .into_iter()
            .map(|chain| -> Result<Overlap> {
                let j = chain.pair.1;
                let mode = if j == 1 {
                    JacobianMode::ClosedForm(Arc::new(move |p| r01_jacobian(g, p)))
                } else {
                    JacobianMode::FiniteDifference
                };
                let phase = TransitionPhase::from_charts(&atlas, 0, j, mode)?;
                Ok(Overlap { chain, phase })
            })
            .collect::<Result<Vec<_>>>()?;
        let regions = (0..5)
            .map(|j| {
                VolumeRegion::new(
                    if j == 0 {
                        "B0".to_string()
                    } else {
                        format!("|z{j}|<=eps")
                    },
                    j,
                    region_params(g, j),
                    1.0,
                    Arc::new(move |u| region_point(g, j, u)),
                )
            })
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(0x4172_7a62);
        let mut maslov_points = Vec::new();
        let mut probe = Vec::new();
        for j in 0..5 {
            let pts = self.chart_samples(g, &mut rng, j, MASLOV_POINTS)?;
            probe.extend(pts.iter().cloned());
            maslov_points.push((j, pts));
        }

        let mut model = self.loop_model(which);
        let times: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        for c in atlas.charts() {
            model.add_certificate(certify_chart_invariance(&model, c, &probe, &times)?);
        }
        model.add_certificate(certify_closed_loop(
            &model,
            &atlas.charts()[0],
            &maslov_points[0].1,
        )?);
        let t = &self.trapezoid;
        let kappa = match which {
            HirzebruchLoop::Psi => t.kappa(),
            HirzebruchLoop::PsiTilde => t.kappa_tilde(),
        };
        let moment = match which {
            HirzebruchLoop::Psi => t.integrate_monomial(0, 1),
            HirzebruchLoop::PsiTilde => t.integrate_monomial(1, 0),
        };
        let mean = ExactValue::int(2) * (&moment - &(&kappa * &t.area()));
        model.add_certificate(certify_normalization(
            mean.to_f64(),
            manifold_volume(t).to_f64(),
        )?);

        let problem = InvariantProblem {
            label: format!(
                "hirzebruch(k={}, tau={}, mu={}, eps={eps})",
                t.k, t.tau, t.mu
            ),
            atlas,
            overlaps,
            regions,
            maslov_points,
        };
        Ok(HirzebruchBuild {
            geometry: g,
            problem,
            model,
        })
    }

    /// Every rung of the ladder for one loop, extrapolated to zero radius.
    pub fn run_ladder(&self, which: HirzebruchLoop, spec: &QuadratureSpec) -> Result<LadderReport> {
        let rungs = self
            .ladder
            .iter()
            .map(|&eps| -> Result<LadderRung> {
                let b = self.build(eps, which)?;
                Ok(LadderRung {
                    epsilon: eps,
                    report: compute_invariant(&b.problem, &b.model, spec)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        extrapolate_ladder_in(rungs, self.extrapolation)
    }

    /// Chern pairing at every rung, with its extrapolation and the
    /// fitted constant `C` of `|c(eps) - c(eps/2)| <= C eps` over consecutive rungs.
    pub fn chern_ladder(&self, spec: &QuadratureSpec) -> Result<ChernLadder> {
        let rungs = self
            .ladder
            .iter()
            .map(|&eps| -> Result<(f64, Estimate)> {
                let b = self.build(eps, HirzebruchLoop::Psi)?;
                Ok((
                    eps,
                    chern_pairing(&b.problem.atlas, &b.problem.overlaps, spec)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let xs: Vec<f64> = rungs
            .iter()
            .map(|(e, _)| self.extrapolation.abscissa(*e))
            .collect();
        let ys: Vec<Estimate> = rungs.iter().map(|(_, c)| *c).collect();
        let fit = linear_extrapolation(&xs, &ys)?;
        let drift_constant = rungs
            .windows(2)
            .map(|w| (w[0].1.value - w[1].1.value).abs() / w[0].0)
            .fold(0.0, f64::max);
        Ok(ChernLadder {
            rungs,
            fit,
            drift_constant,
        })
    }

    /// `kappa` and `kappa_tilde` as moment means by Gauss-Legendre quadrature.
    pub fn kappa_quadrature(&self) -> (f64, f64) {
        let (tau, mu, k) = (
            self.trapezoid.tau.to_f64(),
            self.trapezoid.mu.to_f64(),
            self.trapezoid.k as f64,
        );
        let (mut area, mut my, mut mx) = (0.0, 0.0, 0.0);
        for (y, w) in gauss_legendre(0.0, mu, 8, 1) {
            let len = tau - k * y;
            area += w * len;
            my += w * y * len;
            mx += w * 0.5 * len * len;
        }
        (my / area, mx / area)
    }

    pub fn run(&self, spec: &QuadratureSpec) -> Result<HirzebruchRun> {
        let psi = self.run_ladder(HirzebruchLoop::Psi, spec)?;
        let psi_tilde = self.run_ladder(HirzebruchLoop::PsiTilde, spec)?;
        let (kappa_quadrature, kappa_tilde_quadrature) = self.kappa_quadrature();
        let phase_windings = psi.rungs[0]
            .report
            .pairs
            .iter()
            .map(|p| (p.pair, p.phase_winding))
            .collect();
        Ok(HirzebruchRun {
            scenario: self.clone(),
            psi,
            psi_tilde,
            kappa_quadrature,
            kappa_tilde_quadrature,
            phase_windings,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChernLadder {
    pub rungs: Vec<(f64, Estimate)>,
    pub fit: LinearFit,
    pub drift_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HirzebruchRun {
    pub scenario: HirzebruchScenario,
    pub psi: LadderReport,
    pub psi_tilde: LadderReport,
    pub kappa_quadrature: f64,
    pub kappa_tilde_quadrature: f64,
    /// Winding of `r_0j` around the designated circle of `A'_{0j}`.
    pub phase_windings: Vec<((usize, usize), i64)>,
}

impl HirzebruchRun {
    pub fn i_psi(&self) -> f64 {
        self.psi.extrapolated.total.intercept
    }

    pub fn i_psi_tilde(&self) -> f64 {
        self.psi_tilde.extrapolated.total.intercept
    }

    /// `(I_psi, I_psi_tilde)` refitted from the same rungs against another abscissa.
    pub fn refit(&self, variable: Extrapolation) -> Result<(f64, f64)> {
        let a = extrapolate_ladder_in(self.psi.rungs.clone(), variable)?;
        let b = extrapolate_ladder_in(self.psi_tilde.rungs.clone(), variable)?;
        Ok((
            a.extrapolated.total.intercept,
            b.extrapolated.total.intercept,
        ))
    }

    pub fn checks(&self) -> Vec<Check> {
        let e = self.scenario.expected();
        let mut out = vec![
            Check::relative("I_psi", e.i_psi.to_f64(), self.i_psi(), INVARIANT_REL_TOL),
            Check::relative(
                "I_psi_tilde",
                e.i_psi_tilde.to_f64(),
                self.i_psi_tilde(),
                INVARIANT_REL_TOL,
            ),
            Check::relative(
                "ratio",
                e.ratio.to_f64(),
                self.i_psi_tilde() / self.i_psi(),
                RATIO_REL_TOL,
            ),
        ];
        for (tag, ladder, exact) in [
            ("N'", &self.psi, &e.n_psi),
            ("N~'", &self.psi_tilde, &e.n_psi_tilde),
        ] {
            for j in 1..=4 {
                let fit = ladder.pair(0, j).map(|f| f.intercept).unwrap_or(f64::NAN);
                out.push(Check::relative(
                    format!("{tag}0{j}"),
                    exact[j - 1].to_f64(),
                    fit,
                    TERM_REL_TOL,
                ));
            }
        }
        out.push(Check::relative(
            "chern",
            e.chern.to_f64(),
            self.psi.extrapolated.chern.intercept,
            CHERN_REL_TOL,
        ));
        for (tag, ladder) in [("J0 psi", &self.psi), ("J0 psi_tilde", &self.psi_tilde)] {
            let j0 = ladder.rungs[0]
                .report
                .chart(0)
                .map(|c| c.maslov.index)
                .unwrap_or(i64::MAX);
            out.push(Check::exact(tag, 0, j0));
        }
        let r01 = self
            .phase_windings
            .iter()
            .find(|(p, _)| *p == (0, 1))
            .map(|(_, w)| *w)
            .unwrap_or(0);
        out.push(Check::exact("r01 winding", -1, r01));
        out.push(Check::absolute(
            "kappa quadrature",
            e.kappa.to_f64(),
            self.kappa_quadrature,
            KAPPA_TOL,
        ));
        out.push(Check::absolute(
            "kappa_tilde quadrature",
            e.kappa_tilde.to_f64(),
            self.kappa_tilde_quadrature,
            KAPPA_TOL,
        ));
        out
    }

    pub fn outcome(&self) -> ScenarioOutcome {
        let t = &self.scenario.trapezoid;
        ScenarioOutcome::new(
            "hirzebruch",
            json!({ "k": t.k, "tau": to_json(&t.tau), "mu": to_json(&t.mu), "ladder": self.scenario.ladder, "extrapolation": self.scenario.extrapolation }),
            to_json(&self.scenario.expected()),
            to_json(self),
            self.checks(),
        )
    }
}
