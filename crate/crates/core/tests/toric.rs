mod common;

use common::*;
use hamloop::geom::gauss_legendre;
use hamloop::toric::{
    boundary_terms_psi, boundary_terms_psi_tilde, chern_pairing_exact, closed_form_invariants,
    manifold_volume, DelzantTrapezoid, ExactValue,
};
use hamloop::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> ExactValue {
    ExactValue::new(n, d).unwrap()
}

fn sum(v: &[ExactValue]) -> ExactValue {
    v.iter().fold(ExactValue::zero(), |a, b| &a + b)
}

#[test]
fn first_surface() {
    let t = DelzantTrapezoid::parse(1, "3", "1").unwrap();
    assert_eq!(t.area(), q(5, 2));
    assert_eq!(t.integrate_monomial(0, 1), q(7, 6));
    assert_eq!(t.kappa(), q(7, 15));
    assert_eq!(t.kappa_tilde(), q(19, 15));
    assert_eq!(t.kappa(), t.kappa_moment());
    assert_eq!(t.kappa_tilde(), t.kappa_tilde_moment());
    assert_eq!(manifold_volume(&t), q(5, 1));
    assert_eq!(closed_form_invariants(&t), (q(8, 15), q(-4, 15)));
}

#[test]
fn second_surface() {
    let t = DelzantTrapezoid::parse(2, "5", "1").unwrap();
    assert_eq!(t.lambda(), q(3, 1));
    assert_eq!(t.area(), q(4, 1));
    let (i, it) = closed_form_invariants(&t);
    assert_eq!(i, q(7, 6));
    assert_eq!(it, q(-7, 6));
    assert_eq!(&it / &i, q(-1, 1));
    assert_eq!(chern_pairing_exact(&t), q(10, 1));
}

#[test]
fn boundary_terms_of_first_surface() {
    let t = DelzantTrapezoid::parse(1, "3", "1").unwrap();
    let n = boundary_terms_psi(&t);
    assert_eq!(n, [q(14, 5), q(-1, 15), q(-32, 15), q(-1, 15)]);
    assert_eq!(sum(&n), q(8, 15));
    assert_eq!(sum(&boundary_terms_psi_tilde(&t)), q(-4, 15));
}

/// Tensor Gauss-Legendre over `0 <= y <= mu`, `0 <= x <= tau - k y`; exact for
/// polynomials of the degrees used here.
fn monomial_by_quadrature(t: &DelzantTrapezoid, a: i32, b: i32) -> f64 {
    let (tau, mu, k) = (t.tau.to_f64(), t.mu.to_f64(), t.k as f64);
    let mut acc = 0.0;
    for (y, wy) in gauss_legendre(0.0, mu, 12, 1) {
        for (x, wx) in gauss_legendre(0.0, tau - k * y, 12, 1) {
            acc += wy * wx * x.powi(a) * y.powi(b);
        }
    }
    acc
}

#[test]
fn monomials_match_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let t = random_trapezoid(&mut rng);
        for (a, b) in [(0, 0), (1, 0), (0, 1), (2, 1), (3, 2), (1, 4)] {
            let exact = t.integrate_monomial(a, b).to_f64();
            let quad = monomial_by_quadrature(&t, a as i32, b as i32);
            assert!(
                (exact - quad).abs() <= 1e-10 * exact.abs().max(1.0),
                "{a},{b}: {exact} vs {quad}"
            );
        }
    }
}

#[test]
fn monomials_match_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let t = DelzantTrapezoid::parse(1, "3", "1").unwrap();
    let (tau, mu) = (3.0, 1.0);
    let samples = 200_000;
    for (a, b) in [(0u32, 0u32), (1, 0), (0, 1), (2, 1)] {
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..samples {
            let x: f64 = rng.gen_range(0.0..tau);
            let y: f64 = rng.gen_range(0.0..mu);
            let v = if x <= tau - y {
                tau * mu * x.powi(a as i32) * y.powi(b as i32)
            } else {
                0.0
            };
            s += v;
            s2 += v * v;
        }
        let n = samples as f64;
        let mean = s / n;
        let se = ((s2 / n - mean * mean) / n).sqrt();
        let exact = t.integrate_monomial(a, b).to_f64();
        assert!(
            (mean - exact).abs() < 3.0 * se,
            "{a},{b}: {mean} +- {se} vs {exact}"
        );
    }
}

#[test]
fn kappa_tends_to_half_height_for_long_trapezoids() {
    let t = DelzantTrapezoid::parse(1, "1000001", "1").unwrap();
    assert!((t.kappa().to_f64() - 0.5).abs() < 1e-6);
    let t = DelzantTrapezoid::parse(3, "3000002", "2").unwrap();
    assert!((t.kappa().to_f64() - 1.0).abs() < 1e-5);
}

#[test]
fn invalid_trapezoids() {
    let bad = [
        (0u32, "3", "1"),
        (1, "3", "0"),
        (1, "3", "-1"),
        (1, "1", "1"),
        (2, "3", "2"),
    ];
    for (k, tau, mu) in bad {
        assert!(
            matches!(
                DelzantTrapezoid::parse(k, tau, mu),
                Err(Error::InvalidTrapezoid(_))
            ),
            "{k} {tau} {mu}"
        );
    }
    for s in ["1/0", "abc", "1.", "", "2/x"] {
        assert!(
            matches!(s.parse::<ExactValue>(), Err(Error::InvalidParameter(_))),
            "{s:?}"
        );
    }
    assert_eq!("2.5".parse::<ExactValue>().unwrap(), q(5, 2));
    assert_eq!(" 6/4 ".parse::<ExactValue>().unwrap(), q(3, 2));
}

#[test]
fn exact_values_round_trip_through_json() {
    let v = q(-22, 7);
    let s = serde_json::to_string(&v).unwrap();
    assert_eq!(serde_json::from_str::<ExactValue>(&s).unwrap(), v);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_terms_sum_to_invariants(seed in any::<u64>()) {
        let t = random_trapezoid(&mut ChaCha8Rng::seed_from_u64(seed));
        let (i, it) = closed_form_invariants(&t);
        prop_assert_eq!(sum(&boundary_terms_psi(&t)), i.clone());
        prop_assert_eq!(sum(&boundary_terms_psi_tilde(&t)), it.clone());
        prop_assert_eq!(&it / &i, q(-(t.k as i64), 2));
    }

    #[test]
    fn kappa_formulas_are_moment_means(seed in any::<u64>()) {
        let t = random_trapezoid(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(t.kappa(), t.kappa_moment());
        prop_assert_eq!(t.kappa_tilde(), t.kappa_tilde_moment());
        prop_assert!(t.kappa().is_positive() && (&t.mu - &t.kappa()).is_positive());
    }
}
