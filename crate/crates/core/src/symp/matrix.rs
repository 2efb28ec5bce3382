use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default bound on `|M^T J M - J|_max` accepted at construction.
pub const SYMPLECTIC_TOL: f64 = 1e-9;

/// Bound on `|det M - 1|` for exactly-constructed matrices.
pub const DET_TOL: f64 = 1e-8;

/// The standard form `J = [[0, I], [-I, 0]]` in the `(q_1..q_n, p_1..p_n)` basis.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// `|M^T J M - J|_max`.
pub fn symplectic_residual(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    let j = standard_j(n);
    (m.transpose() * &j * m - &j).amax()
}

/// A real `2n x 2n` matrix preserving the standard symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    m: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(m, SYMPLECTIC_TOL)
    }

    /// Construct with a looser symplecticity bound (finite-difference Jacobians).
    pub fn with_tolerance(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 || m.nrows() % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "symplectic matrix must be 2n x 2n, got {} x {}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        let residual = symplectic_residual(&m);
        if residual > tol {
            return Err(Error::NonSymplectic { residual, tol });
        }
        let det = m.determinant();
        if (det - 1.0).abs() > DET_TOL.max(tol) {
            return Err(Error::NonSymplectic {
                residual: (det - 1.0).abs(),
                tol: DET_TOL.max(tol),
            });
        }
        Ok(Self {
            n: m.nrows() / 2,
            m,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            m: DMatrix::identity(2 * n, 2 * n),
        }
    }

    /// Rotation of the `(q, p)` plane by `theta`; corresponds to `e^{i theta}` in `U(1)`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            n: 1,
            m: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
        }
    }

    /// `diag(a, 1/a)`.
    pub fn hyperbolic(a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("hyperbolic factor {a}")));
        }
        Ok(Self {
            n: 1,
            m: DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, 1.0 / a]),
        })
    }

    /// Embeds a unitary `X + iY` as `[[X, -Y], [Y, X]]`.
    pub fn from_unitary(u: &DMatrix<Complex64>) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n {
            return Err(Error::InvalidParameter("unitary must be square".into()));
        }
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                let z = u[(r, c)];
                m[(r, c)] = z.re;
                m[(r, n + c)] = -z.im;
                m[(n + r, c)] = z.im;
                m[(n + r, n + c)] = z.re;
            }
        }
        Self::new(m)
    }

    /// Block sum; the result uses the interleaved convention
    /// `(q_a, q_b, p_a, p_b)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (na, nb) = (self.n, other.n);
        let n = na + nb;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        let place = |dst: &mut DMatrix<f64>, src: &DMatrix<f64>, k: usize, off: usize| {
            for r in 0..2 * k {
                for c in 0..2 * k {
                    let rr = if r < k { off + r } else { n + off + r - k };
                    let cc = if c < k { off + c } else { n + off + c - k };
                    dst[(rr, cc)] = src[(r, c)];
                }
            }
        };
        place(&mut m, &self.m, na, 0);
        place(&mut m, &other.m, nb, na);
        Self { n, m }
    }

    pub fn inverse(&self) -> Self {
        // M^{-1} = -J M^T J
        let j = standard_j(self.n);
        Self {
            n: self.n,
            m: -(&j * self.m.transpose() * &j),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            m: &self.m * &other.m,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_non_symplectic() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(matches!(
            SymplecticMatrix::new(m),
            Err(Error::NonSymplectic { .. })
        ));
        let odd = DMatrix::identity(3, 3);
        assert!(SymplecticMatrix::new(odd).is_err());
    }

    #[test]
    fn inverse_and_direct_sum() {
        let a = SymplecticMatrix::rotation(0.3);
        let b = SymplecticMatrix::hyperbolic(1.7).unwrap();
        let s = a.direct_sum(&b);
        assert!(symplectic_residual(s.matrix()) < 1e-14);
        let prod = s.mul(&s.inverse());
        assert!((prod.matrix() - DMatrix::identity(4, 4)).amax() < 1e-14);
    }

    #[test]
    fn unitary_embedding_of_phase_is_rotation() {
        let u = DMatrix::from_element(1, 1, Complex64::from_polar(1.0, PI / 3.0));
        let m = SymplecticMatrix::from_unitary(&u).unwrap();
        let r = SymplecticMatrix::rotation(PI / 3.0);
        assert!((m.matrix() - r.matrix()).amax() < 1e-15);
    }
}
