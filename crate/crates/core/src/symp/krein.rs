//! Krein classification of unit-circle eigenvalues and the circle map `rho`.
//!
//! For a symplectic matrix `M` with semisimple, non-clustered spectrum,
//! `rho(M) = (-1)^(m_minus / 2) * prod lambda`, the product running over the
//! non-real unit-circle eigenvalues of the first kind and `m_minus` counting
//! negative real eigenvalues with multiplicity. On `U(n)` it is the
//! determinant.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::matrix::{standard_j, SymplecticMatrix};
use crate::error::{Error, Result};

/// Eigenvalues within this distance of each other are a cluster.
pub const EIG_CLUSTER_TOL: f64 = 1e-9;

/// `|Im lambda|` at or below this is treated as real.
pub const REAL_TOL: f64 = 1e-9;

/// `||lambda| - 1|` at or below this puts a non-real eigenvalue on the circle.
pub const UNIT_TOL: f64 = 1e-6;

/// A pair this close to the real axis with Krein form below `WEAK_KREIN_FORM`
/// is counted as real.
pub const NEAR_REAL_TOL: f64 = 1e-4;
pub const WEAK_KREIN_FORM: f64 = 1e-3;

/// Below this `|krein form| / |z|^2` the eigenvector is treated as isotropic.
pub const KREIN_FORM_TOL: f64 = 1e-8;

/// Overall sign applied to `(1/2i) conj(z)^T J z`. Fixed so that rotation by
/// `theta` maps to `e^{i theta}` and, for the block
/// `[[x, y], [-y/r^2, x/r^2]]` with `y > 0`, the eigenvalue with negative
/// imaginary part is first-kind.
pub const KREIN_ORIENTATION: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenKind {
    FirstKind,
    SecondKind,
    OffCircle,
    RealUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KreinEigenvalue {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub multiplicity: usize,
    pub kind: EigenKind,
    /// Signed Krein form of the normalized eigenvector (non-real unit-circle only).
    pub krein_form: Option<f64>,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KreinSpectrum {
    pub eigenvalues: Vec<KreinEigenvalue>,
    pub m_minus: usize,
}

impl KreinSpectrum {
    pub fn rho(&self) -> Complex64 {
        let sign = if (self.m_minus / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        let mut acc = Complex64::new(sign, 0.0);
        for e in &self.eigenvalues {
            if e.kind == EigenKind::FirstKind {
                let u = e.value / e.value.norm();
                for _ in 0..e.multiplicity {
                    acc *= u;
                }
            }
        }
        acc / acc.norm()
    }

    pub fn first_kind(&self) -> impl Iterator<Item = &KreinEigenvalue> {
        self.eigenvalues
            .iter()
            .filter(|e| e.kind == EigenKind::FirstKind)
    }
}

const SCHUR_QUICK_ITER: usize = 40;
const SCHUR_MAX_ITER: usize = 2000;
const SCHUR_LOOSE_EPS: f64 = 1e3 * f64::EPSILON;

/// Eigenvalues by a bounded Schur iteration. Cyclic structures can stall the
/// unshifted iteration, so a failed attempt is retried on a fixed orthogonal
/// conjugate, which has the same spectrum. Repeated eigenvalues perturbed by
/// rounding can stall deflation at machine precision; the last attempt
/// deflates at `SCHUR_LOOSE_EPS`.
fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let values =
        |s: nalgebra::Schur<f64, nalgebra::Dyn>| s.complex_eigenvalues().iter().copied().collect();
    if let Some(s) = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, SCHUR_QUICK_ITER) {
        return Ok(values(s));
    }
    let dim = m.nrows();
    let seed = DMatrix::from_fn(dim, dim, |r, c| ((7 * r + 3 * c + 1) as f64).sin());
    let q = seed.qr().q();
    let conj = q.transpose() * m * &q;
    if let Some(s) = nalgebra::Schur::try_new(conj.clone(), f64::EPSILON, SCHUR_MAX_ITER) {
        return Ok(values(s));
    }
    nalgebra::Schur::try_new(conj, SCHUR_LOOSE_EPS, SCHUR_MAX_ITER)
        .map(values)
        .ok_or_else(|| Error::DegenerateSpectrum("Schur iteration did not converge".into()))
}

fn krein_form(m: &DMatrix<f64>, j: &DMatrix<f64>, lambda: Complex64) -> Result<f64> {
    let dim = m.nrows();
    let shifted = DMatrix::from_fn(dim, dim, |r, c| {
        let v = Complex64::new(m[(r, c)], 0.0);
        if r == c {
            v - lambda
        } else {
            v
        }
    });
    let svd = shifted.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::DegenerateSpectrum("SVD did not return V".into()))?;
    let sv = &svd.singular_values;
    let (imin, smin) =
        sv.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc },
        );
    let scale = m.amax().max(1.0);
    if smin > 1e-6 * scale {
        return Err(Error::DegenerateSpectrum(format!(
            "eigenvalue {lambda} not confirmed by SVD (sigma_min = {smin:.2e})"
        )));
    }
    let second = sv
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != imin)
        .fold(f64::INFINITY, |a, (_, &s)| a.min(s));
    if second <= EIG_CLUSTER_TOL * scale {
        return Err(Error::DegenerateSpectrum(format!(
            "eigenvalue {lambda} has a multi-dimensional eigenspace"
        )));
    }
    // Right singular vector: conjugate of the row of V^H.
    let z: Vec<Complex64> = (0..dim).map(|c| v_t[(imin, c)].conj()).collect();
    let mut w = Complex64::new(0.0, 0.0);
    for r in 0..dim {
        for c in 0..dim {
            if j[(r, c)] != 0.0 {
                w += z[r].conj() * j[(r, c)] * z[c];
            }
        }
    }
    let norm2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    // (1/2i) w is real because J is real antisymmetric.
    let value = (w / Complex64::new(0.0, 2.0)).re / norm2;
    Ok(KREIN_ORIENTATION * value)
}

/// Classify the spectrum of `m` by Krein kind.
pub fn krein_classify(m: &SymplecticMatrix) -> Result<KreinSpectrum> {
    let mat = m.matrix();
    let j = standard_j(m.n());
    let eigs = eigenvalues(mat)?;

    let is_real = |z: &Complex64| z.im.abs() <= REAL_TOL * z.norm().max(1.0);
    let on_circle = |z: &Complex64| (z.norm() - 1.0).abs() <= UNIT_TOL;

    // Reject clusters that would make eigenvectors of unit-circle eigenvalues ambiguous.
    for (a, za) in eigs.iter().enumerate() {
        if is_real(za) || !on_circle(za) {
            continue;
        }
        for (b, zb) in eigs.iter().enumerate() {
            if a != b && (za - zb).norm() < EIG_CLUSTER_TOL {
                return Err(Error::DegenerateSpectrum(format!(
                    "eigenvalues {za} and {zb} are within {EIG_CLUSTER_TOL:e}"
                )));
            }
        }
    }

    let mut out: Vec<KreinEigenvalue> = Vec::new();
    let mut m_minus = 0usize;
    let mut push_real = |re: f64, out: &mut Vec<KreinEigenvalue>| {
        if re < 0.0 {
            m_minus += 1;
        }
        let kind = if (re.abs() - 1.0).abs() <= UNIT_TOL {
            EigenKind::RealUnit
        } else {
            EigenKind::OffCircle
        };
        let value = Complex64::new(re, 0.0);
        if let Some(existing) = out
            .iter_mut()
            .find(|e| e.krein_form.is_none() && e.kind == kind && (e.value - value).norm() <= 1e-7)
        {
            existing.multiplicity += 1;
        } else {
            out.push(KreinEigenvalue {
                value,
                multiplicity: 1,
                kind,
                krein_form: None,
            });
        }
    };
    // Conjugate pairs on the circle are classified once, from the member in
    // the upper half plane; the partner has the opposite Krein form.
    for z in &eigs {
        if is_real(z) {
            push_real(z.re, &mut out);
        } else if on_circle(z) {
            if z.im < 0.0 {
                continue;
            }
            let k = krein_form(mat, &j, *z)?;
            if z.im <= NEAR_REAL_TOL && k.abs() < WEAK_KREIN_FORM {
                // A split Jordan block or split -I at +-1; counted as real so
                // that pairs near -1 keep their sign.
                push_real(z.re, &mut out);
                push_real(z.re, &mut out);
                continue;
            }
            let (upper, lower) = if k.abs() < KREIN_FORM_TOL {
                // Isotropic eigenvector: a quartet just off the circle.
                (EigenKind::OffCircle, EigenKind::OffCircle)
            } else if k > 0.0 {
                (EigenKind::FirstKind, EigenKind::SecondKind)
            } else {
                (EigenKind::SecondKind, EigenKind::FirstKind)
            };
            for (value, kind, form) in [(*z, upper, k), (z.conj(), lower, -k)] {
                out.push(KreinEigenvalue {
                    value,
                    multiplicity: 1,
                    kind,
                    krein_form: Some(form),
                });
            }
        } else {
            out.push(KreinEigenvalue {
                value: *z,
                multiplicity: 1,
                kind: EigenKind::OffCircle,
                krein_form: None,
            });
        }
    }
    if m_minus % 2 != 0 {
        return Err(Error::DegenerateSpectrum(format!(
            "odd number ({m_minus}) of negative real eigenvalues"
        )));
    }
    // Each first-kind eigenvalue has a second-kind conjugate.
    for e in out.iter().filter(|e| e.kind == EigenKind::FirstKind) {
        let paired = out
            .iter()
            .any(|o| o.kind == EigenKind::SecondKind && (o.value - e.value.conj()).norm() < 1e-7);
        if !paired {
            return Err(Error::DegenerateSpectrum(format!(
                "conjugate of first-kind eigenvalue {} is not second-kind",
                e.value
            )));
        }
    }
    Ok(KreinSpectrum {
        eigenvalues: out,
        m_minus,
    })
}

/// The circle map `Sp(2n, R) -> U(1)`.
pub fn rho(m: &SymplecticMatrix) -> Result<Complex64> {
    Ok(krein_classify(m)?.rho())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn identity_maps_to_one() {
        for n in 1..=4 {
            let r = rho(&SymplecticMatrix::identity(n)).unwrap();
            assert!(close(r, Complex64::new(1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn rotation_maps_to_phase() {
        for &theta in &[0.3, 1.0, 2.5, -0.7, -2.9] {
            let r = rho(&SymplecticMatrix::rotation(theta)).unwrap();
            assert!(
                close(r, Complex64::from_polar(1.0, theta), 1e-12),
                "{theta}"
            );
        }
    }

    #[test]
    fn hyperbolic_signs() {
        let pos = SymplecticMatrix::hyperbolic(2.0).unwrap();
        let neg = SymplecticMatrix::hyperbolic(-2.0).unwrap();
        assert!(close(rho(&pos).unwrap(), Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(rho(&neg).unwrap(), Complex64::new(-1.0, 0.0), 1e-15));
        let spec = krein_classify(&SymplecticMatrix::hyperbolic(3.0).unwrap()).unwrap();
        assert_eq!(spec.m_minus, 0);
        assert!(spec
            .eigenvalues
            .iter()
            .all(|e| e.kind == EigenKind::OffCircle));
    }

    #[test]
    fn quarter_turn_has_one_first_kind() {
        // Eigenvector of e^{i pi/2} for [[0,-1],[1,0]] is (1, -i):
        // (1/2i) conj(z)^T J z = -1, so with orientation -1 it is first-kind.
        let spec = krein_classify(&SymplecticMatrix::rotation(PI / 2.0)).unwrap();
        let first: Vec<_> = spec.first_kind().collect();
        assert_eq!(first.len(), 1);
        assert!(close(first[0].value, Complex64::new(0.0, 1.0), 1e-12));
        let second = spec
            .eigenvalues
            .iter()
            .filter(|e| e.kind == EigenKind::SecondKind)
            .count();
        assert_eq!(second, 1);
    }

    #[test]
    fn polar_block_convention() {
        // [[x1, y1], [-y1/eps^2, x1/eps^2]] on x1^2 + y1^2 = eps^2, y1 > 0:
        // rho picks the eigenvalue with negative imaginary part.
        let eps: f64 = 0.05;
        let delta = 2.0 * eps / (eps * eps + 1.0);
        for &c in &[0.3, -0.6, 0.0, 0.95] {
            let phi = (c * delta).acos(); // sin(phi) > 0 so y1 > 0
            let (x1, y1) = (eps * phi.cos(), eps * phi.sin());
            let r2 = eps * eps;
            let m = DMatrix::from_row_slice(2, 2, &[x1, y1, -y1 / r2, x1 / r2]);
            let m = SymplecticMatrix::new(m).unwrap();
            let tr: f64 = x1 + x1 / r2;
            assert!(tr.abs() < 2.0);
            let lambda_minus = Complex64::new(tr / 2.0, -(4.0 - tr * tr).sqrt() / 2.0);
            let r = rho(&m).unwrap();
            assert!(close(r, lambda_minus / lambda_minus.norm(), 1e-10), "c={c}");
            // cos(gamma) = cos(phi) / delta
            assert!((r.re - phi.cos() / delta).abs() < 1e-10);
            assert!(r.im < 0.0);
        }
    }

    #[test]
    fn clustered_unit_eigenvalues_are_rejected() {
        let r = SymplecticMatrix::rotation(0.4);
        let doubled = r.direct_sum(&r);
        assert!(matches!(
            krein_classify(&doubled),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn direct_sum_keeps_block_kinds() {
        let a = SymplecticMatrix::rotation(0.9);
        let b = SymplecticMatrix::hyperbolic(2.0).unwrap();
        let s = a.direct_sum(&b);
        let spec = krein_classify(&s).unwrap();
        assert_eq!(spec.first_kind().count(), 1);
        assert_eq!(
            spec.eigenvalues
                .iter()
                .filter(|e| e.kind == EigenKind::OffCircle)
                .count(),
            2
        );
        assert!(close(spec.rho(), Complex64::from_polar(1.0, 0.9), 1e-12));
    }
}
