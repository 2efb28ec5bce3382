#![allow(dead_code)]

use hamloop::geom::Point;
use hamloop::nalgebra::DMatrix;
use hamloop::num_complex::Complex64;
use hamloop::scenarios::hirzebruch::Geometry;
use hamloop::symp::SymplecticMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let qr = a.qr();
    qr.q()
}

fn random_symmetric(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-scale..scale));
    (&a + a.transpose()) * 0.5
}

/// `[[I, S], [0, I]]` with symmetric `S`.
pub fn upper_shear(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> SymplecticMatrix {
    let mut m = DMatrix::identity(2 * n, 2 * n);
    m.view_mut((0, n), (n, n))
        .copy_from(&random_symmetric(n, scale, rng));
    SymplecticMatrix::new(m).unwrap()
}

/// `[[I, 0], [S, I]]` with symmetric `S`.
pub fn lower_shear(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> SymplecticMatrix {
    let mut m = DMatrix::identity(2 * n, 2 * n);
    m.view_mut((n, 0), (n, n))
        .copy_from(&random_symmetric(n, scale, rng));
    SymplecticMatrix::new(m).unwrap()
}

/// A well-conditioned random element of `Sp(2n)` built from generators.
pub fn random_symplectic(n: usize, rng: &mut ChaCha8Rng) -> SymplecticMatrix {
    let u1 = SymplecticMatrix::from_unitary(&random_unitary(n, rng)).unwrap();
    let u2 = SymplecticMatrix::from_unitary(&random_unitary(n, rng)).unwrap();
    u1.mul(&upper_shear(n, 0.8, rng))
        .mul(&lower_shear(n, 0.8, rng))
        .mul(&u2)
}

/// `diag(l_1..l_n, 1/l_1..1/l_n)` with `|l_i|` in `[1.5, 4]` and random signs.
pub fn random_hyperbolic_diag(n: usize, rng: &mut ChaCha8Rng) -> (SymplecticMatrix, f64) {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    let mut sign = 1.0;
    for i in 0..n {
        let mut l: f64 = rng.gen_range(1.5..4.0);
        if rng.gen_bool(0.5) {
            l = -l;
            sign = -sign;
        }
        m[(i, i)] = l;
        m[(n + i, n + i)] = 1.0 / l;
    }
    (SymplecticMatrix::new(m).unwrap(), sign)
}

pub fn conjugate(p: &SymplecticMatrix, m: &SymplecticMatrix) -> SymplecticMatrix {
    SymplecticMatrix::with_tolerance(p.matrix() * m.matrix() * p.inverse().matrix(), 1e-7).unwrap()
}

/// Independent Jacobians `d(B0 coords) / d(B'j coords)` of the Hirzebruch charts,
/// written out by hand from the coordinate formulas.
pub fn hirzebruch_jacobian_oracle(g: Geometry, j: usize, x: &[f64]) -> DMatrix<f64> {
    let k = g.k as f64;
    let r = |a: f64, b: f64| a * a + b * b;
    let rows: [f64; 16] = match j {
        1 => {
            let (x1, y1) = (x[0], x[2]);
            let s = r(x1, y1);
            [
                x1,
                0.,
                y1,
                0.,
                0.,
                1.,
                0.,
                0.,
                -y1 / s,
                0.,
                x1 / s,
                0.,
                0.,
                0.,
                0.,
                1.,
            ]
        }
        2 => {
            let (a, b) = (x[0], x[2]);
            let s = r(a, b);
            [
                0.,
                -1.,
                0.,
                0.,
                a,
                0.,
                b,
                0.,
                0.,
                0.,
                0.,
                -1.,
                -b / s,
                0.,
                a / s,
                0.,
            ]
        }
        3 => {
            let (a, b) = (x[0], x[2]);
            let s = r(a, b);
            [
                -a,
                0.,
                -b,
                0.,
                k * a,
                -1.,
                k * b,
                0.,
                b / s,
                0.,
                -a / s,
                -k,
                0.,
                0.,
                0.,
                -1.,
            ]
        }
        4 => {
            let (a, b) = (x[1], x[3]);
            let s = r(a, b);
            [
                1.,
                0.,
                0.,
                0.,
                -k,
                -a,
                0.,
                -b,
                0.,
                k * b / s,
                1.,
                -k * a / s,
                0.,
                b / s,
                0.,
                -a / s,
            ]
        }
        _ => panic!("no chart B'{j}"),
    };
    DMatrix::from_row_slice(4, 4, &rows)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn point_from_polar(r: [f64; 4], a: [f64; 4]) -> Point {
    (0..4)
        .flat_map(|i| [r[i] * a[i].cos(), r[i] * a[i].sin()])
        .collect()
}

/// Random ambient point of the Hirzebruch surface with `|z_j|` in `(eps, 2 eps)`
/// for every `j` in `small` (chart labels 1..4) and the other moduli well inside.
pub fn hirzebruch_tube_point(g: Geometry, small: &[usize], rng: &mut ChaCha8Rng) -> Point {
    let pi = std::f64::consts::PI;
    let (m, t, k) = (g.mu / pi, g.tau / pi, g.k as f64);
    let tube = |rng: &mut ChaCha8Rng| {
        let r = rng.gen_range(1.1..1.9) * g.eps;
        r * r
    };
    let has = |j| small.contains(&j);
    let r1s = if has(1) {
        tube(rng)
    } else if has(3) {
        m - tube(rng)
    } else {
        0.0
    };
    let (r1s, r2s) = match (has(1) || has(3), has(2), has(4)) {
        (true, true, _) => (r1s, tube(rng)),
        (true, false, true) => (r1s, t - k * r1s - tube(rng)),
        (true, false, false) => {
            let u = rng.gen_range(0.2..0.8);
            (r1s, u * (t - k * r1s))
        }
        (false, two, four) => {
            let r1s = rng.gen_range(0.2..0.8) * m;
            let r2s = if two {
                tube(rng)
            } else if four {
                t - k * r1s - tube(rng)
            } else {
                rng.gen_range(0.2..0.8) * (t - k * r1s)
            };
            (r1s, r2s)
        }
    };
    let r3s = m - r1s;
    let r4s = t - k * r1s - r2s;
    let angles = [0; 4].map(|_| rng.gen_range(0.0..2.0 * pi));
    point_from_polar([r1s.sqrt(), r2s.sqrt(), r3s.sqrt(), r4s.sqrt()], angles)
}

/// A valid trapezoid with small random rational `mu` and `lambda`.
pub fn random_trapezoid(rng: &mut ChaCha8Rng) -> hamloop::toric::DelzantTrapezoid {
    use hamloop::toric::{DelzantTrapezoid, ExactValue};
    let k = rng.gen_range(1..=4u32);
    let mu = ExactValue::new(rng.gen_range(1..=20), rng.gen_range(1..=9)).unwrap();
    let lambda = ExactValue::new(rng.gen_range(1..=20), rng.gen_range(1..=9)).unwrap();
    let tau = &lambda + &(ExactValue::int(k as i64) * mu.clone());
    DelzantTrapezoid::new(k, tau, mu).unwrap()
}
