//! The Delzant trapezoid of a Hirzebruch surface and exact integrals over it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::exact::ExactValue;
use crate::error::{Error, Result};

/// `int_M P omega^n = MANIFOLD_NORMALIZATION * int_trapezoid P dA` for `n = 2`.
pub const MANIFOLD_NORMALIZATION: i64 = 2;

/// `{(x, y) : 0 <= y <= mu, 0 <= x <= tau - k y}` with `k mu < tau`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelzantTrapezoid {
    pub k: u32,
    pub tau: ExactValue,
    pub mu: ExactValue,
}

fn binomial(n: u32, j: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..j {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl DelzantTrapezoid {
    pub fn new(k: u32, tau: ExactValue, mu: ExactValue) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidTrapezoid(
                "k must be a positive integer".into(),
            ));
        }
        if !mu.is_positive() {
            return Err(Error::InvalidTrapezoid(format!(
                "mu = {mu} must be positive"
            )));
        }
        let lambda = &tau - &(ExactValue::int(k as i64) * mu.clone());
        if !lambda.is_positive() {
            return Err(Error::InvalidTrapezoid(format!(
                "need k mu < tau, got k = {k}, tau = {tau}, mu = {mu}"
            )));
        }
        Ok(Self { k, tau, mu })
    }

    /// Parses `tau` and `mu` from `p/q` strings.
    pub fn parse(k: u32, tau: &str, mu: &str) -> Result<Self> {
        Self::new(k, tau.parse()?, mu.parse()?)
    }

    pub fn k_value(&self) -> ExactValue {
        ExactValue::int(self.k as i64)
    }

    /// Length of the short parallel edge, `tau - k mu`.
    pub fn lambda(&self) -> ExactValue {
        &self.tau - &(self.k_value() * self.mu.clone())
    }

    /// `int x^a y^b dx dy` over the trapezoid.
    pub fn integrate_monomial(&self, a: u32, b: u32) -> ExactValue {
        // int_0^mu y^b (tau - k y)^{a+1} / (a+1) dy, expanded binomially.
        let tau = self.tau.rational();
        let mu = self.mu.rational();
        let k = BigRational::from_integer(BigInt::from(self.k));
        let mut acc = BigRational::zero();
        for j in 0..=(a + 1) {
            let mut term = BigRational::from_integer(binomial(a + 1, j));
            for _ in 0..(a + 1 - j) {
                term *= tau;
            }
            for _ in 0..j {
                term *= -&k;
            }
            let e = b + j + 1;
            let mut mu_pow = BigRational::one();
            for _ in 0..e {
                mu_pow *= mu;
            }
            acc += term * mu_pow / BigRational::from_integer(BigInt::from(e));
        }
        ExactValue::from_rational(acc / BigRational::from_integer(BigInt::from(a + 1)))
    }

    pub fn area(&self) -> ExactValue {
        self.integrate_monomial(0, 0)
    }

    /// `mu (3 lambda + k mu) / (3 (2 lambda + k mu))`.
    pub fn kappa(&self) -> ExactValue {
        let (l, k, mu) = (self.lambda(), self.k_value(), self.mu.clone());
        let km = &k * &mu;
        let num = &mu * &(&(ExactValue::int(3) * l.clone()) + &km);
        let den = ExactValue::int(3) * (&(ExactValue::int(2) * l) + &km);
        num / den
    }

    /// Mean of the `y` moment coordinate.
    pub fn kappa_moment(&self) -> ExactValue {
        self.integrate_monomial(0, 1) / self.area()
    }

    /// `(3 lambda^2 + 3 k lambda mu + k^2 mu^2) / (3 (2 lambda + k mu))`.
    pub fn kappa_tilde(&self) -> ExactValue {
        let (l, k, mu) = (self.lambda(), self.k_value(), self.mu.clone());
        let km = &k * &mu;
        let num =
            &(&(ExactValue::int(3) * l.pow(2)) + &(ExactValue::int(3) * (&l * &km))) + &km.pow(2);
        let den = ExactValue::int(3) * (&(ExactValue::int(2) * l) + &km);
        num / den
    }

    /// Mean of the `x` moment coordinate.
    pub fn kappa_tilde_moment(&self) -> ExactValue {
        self.integrate_monomial(1, 0) / self.area()
    }
}

/// Symplectic volume `int_M omega^2`.
pub fn manifold_volume(t: &DelzantTrapezoid) -> ExactValue {
    ExactValue::int(MANIFOLD_NORMALIZATION) * t.area()
}

/// `1 - mu / (2 lambda + k mu)`.
fn shape_factor(t: &DelzantTrapezoid) -> ExactValue {
    let den = &(ExactValue::int(2) * t.lambda()) + &(t.k_value() * t.mu.clone());
    ExactValue::one() - t.mu.clone() / den
}

/// Closed forms `(I_psi, I_psi_tilde)` for the loops rotating `z_1` and `z_2`.
pub fn closed_form_invariants(t: &DelzantTrapezoid) -> (ExactValue, ExactValue) {
    let k = t.k_value();
    let mu2 = t.mu.pow(2);
    let s = shape_factor(t);
    let i = ExactValue::int(2) * k.clone() * mu2.clone() / ExactValue::int(3) * s.clone();
    let it = -(k.pow(2) * mu2) / ExactValue::int(3) * s;
    (i, it)
}

/// The four boundary contributions of the `z_1` loop.
pub fn boundary_terms_psi(t: &DelzantTrapezoid) -> [ExactValue; 4] {
    let (tau, mu, l, kap) = (t.tau.clone(), t.mu.clone(), t.lambda(), t.kappa());
    let two = ExactValue::int(2);
    [
        &two * &(&tau * &kap),
        &(&two * &(&mu * &kap)) - &mu.pow(2),
        &two * &(&l * &(&kap - &mu)),
        &mu * &(&(&two * &kap) - &mu),
    ]
}

/// The four boundary contributions of the `z_2` loop.
pub fn boundary_terms_psi_tilde(t: &DelzantTrapezoid) -> [ExactValue; 4] {
    let (tau, mu, l, kt, k) = (
        t.tau.clone(),
        t.mu.clone(),
        t.lambda(),
        t.kappa_tilde(),
        t.k_value(),
    );
    let two = ExactValue::int(2);
    let two_kt = &two * &kt;
    [
        &tau * &(&two_kt - &tau),
        &two * &(&mu * &kt),
        &l * &(&two_kt - &l),
        &mu * &(&(&two_kt - &(&k * &mu)) - &(&two * &l)),
    ]
}

/// First Chern class paired with `[omega]`: `2 lambda + (k + 2) mu`.
pub fn chern_pairing_exact(t: &DelzantTrapezoid) -> ExactValue {
    &(ExactValue::int(2) * t.lambda()) + &(ExactValue::int(t.k as i64 + 2) * t.mu.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactValue {
        ExactValue::new(n, d).unwrap()
    }

    #[test]
    fn reference_values() {
        let t = DelzantTrapezoid::parse(1, "3", "1").unwrap();
        assert_eq!(t.area(), q(5, 2));
        assert_eq!(t.integrate_monomial(0, 1), q(7, 6));
        assert_eq!(manifold_volume(&t), q(5, 1));
        assert_eq!(t.kappa(), q(7, 15));
        assert_eq!(t.kappa_tilde(), q(19, 15));
        let (i, it) = closed_form_invariants(&t);
        assert_eq!((i, it), (q(8, 15), q(-4, 15)));
        assert_eq!(chern_pairing_exact(&t), q(7, 1));
    }

    #[test]
    fn invalid_data_rejected() {
        assert!(DelzantTrapezoid::parse(0, "1", "1").is_err());
        assert!(DelzantTrapezoid::parse(2, "2", "1").is_err());
        assert!(DelzantTrapezoid::parse(1, "3", "0").is_err());
    }
}
