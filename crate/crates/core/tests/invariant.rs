mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use hamloop::geom::{
    build_overlap_chains, Atlas, Chain, Chart, ChartMap, JacobianMode, ParamKind, Point,
    QuadratureSpec, TransitionPhase, VolumeRegion,
};
use hamloop::invariant::{
    certify_boundary_constant, certify_chart_invariance, compute_invariant, corollary_punctured,
    corollary_two_charts, integrable_invariant, HamiltonianLoopModel, InvariantProblem,
    InvariantReport, LinearizationMode, Overlap,
};
use hamloop::scenarios::{HirzebruchLoop, HirzebruchScenario, SphereScenario};
use hamloop::{Error, Result};

fn sphere_point(z: f64, phi: f64) -> Point {
    let r = (1.0 - z * z).max(0.0).sqrt();
    vec![r * phi.cos(), r * phi.sin(), z]
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn assert_bookkeeping(r: &InvariantReport) {
    assert_eq!(r.total, r.bookkeeping_total());
    assert!((r.total - (r.maslov_total + r.pair_total)).abs() <= 1e-12 * r.total.abs().max(1.0));
}

#[test]
fn identity_loop_has_zero_invariant() {
    let b = SphereScenario::default().build().unwrap();
    let mut model = HamiltonianLoopModel::identity(1);
    let probe: Vec<Point> = (0..10)
        .map(|i| sphere_point(-0.9 + 0.2 * i as f64, i as f64))
        .collect();
    for c in b.problem.atlas.charts() {
        model.add_certificate(certify_chart_invariance(&model, c, &probe, &[0.3, 0.7]).unwrap());
    }
    let r = compute_invariant(&b.problem, &model, &spec()).unwrap();
    assert!(r.charts.iter().all(|c| c.maslov.index == 0));
    assert_eq!(r.total, 0.0);
    assert_bookkeeping(&r);
}

#[test]
fn uncertified_loop_is_rejected() {
    let b = SphereScenario::default().build().unwrap();
    let err =
        compute_invariant(&b.problem, &HamiltonianLoopModel::identity(1), &spec()).unwrap_err();
    assert!(matches!(err, Error::MissingInvarianceCertificate(_)));
    let wrong_dim = compute_invariant(&b.problem, &HamiltonianLoopModel::identity(2), &spec());
    assert!(wrong_dim.is_err());
}

#[test]
fn corollary_examples() {
    for s in [0.1f64, 0.5, 1.2] {
        let (vu, vv) = (2.0 * PI * (1.0 + s.sin()), 2.0 * PI * (1.0 - s.sin()));
        let v = corollary_two_charts(1, -1, vu, vv, 1, 2.0 * PI * s.sin(), 2.0);
        assert!(v.abs() < 1e-12);
    }
    assert_eq!(corollary_two_charts(0, 0, 1.0, 1.0, 2, 1.5, 3.0), -9.0);
    assert!(corollary_punctured(1, 4.0 * PI, 1, 2.0 * PI, 2.0).abs() < 1e-12);
    assert_eq!(corollary_punctured(2, 1.0, 1, 0.5, 2.0), 1.0);
}

#[test]
fn boundary_constant_certification() {
    assert_eq!(certify_boundary_constant(&[2.0, 2.0, 2.0]).unwrap(), 2.0);
    assert!(matches!(
        certify_boundary_constant(&[1.0, 1.1]),
        Err(Error::NonConstantBoundaryHamiltonian { .. })
    ));
    assert!(certify_boundary_constant(&[]).is_err());
}

#[test]
fn integrable_sum_vanishes_for_zero_hamiltonian() {
    let (atlas, chains) = SphereScenario::default().integrable_data().unwrap();
    let r = integrable_invariant(&atlas, &chains, &|_| 0.0, &spec()).unwrap();
    assert_eq!(r.sum_z_prime, 0.0);
    assert!((r.sum_z - 2.0).abs() < 1e-6, "{}", r.sum_z);
}

#[test]
fn sphere_reversal_and_doubling() {
    let b = SphereScenario::default().build().unwrap();
    let fwd = compute_invariant(&b.problem, &b.model, &spec()).unwrap();
    let rev = compute_invariant(&b.problem, &b.model.reversed(), &spec()).unwrap();
    let dbl = compute_invariant(&b.problem, &b.model.doubled(), &spec()).unwrap();
    let j = |r: &InvariantReport| r.charts.iter().map(|c| c.maslov.index).collect::<Vec<_>>();
    assert_eq!(j(&fwd), vec![1, -1]);
    assert_eq!(j(&rev), vec![-1, 1]);
    assert_eq!(j(&dbl), vec![2, -2]);
    for (a, b, s) in [(&fwd, &rev, -1.0), (&fwd, &dbl, 2.0)] {
        for (p, q) in a.pairs.iter().zip(&b.pairs) {
            assert!((s * p.value.value - q.value.value).abs() < 1e-8);
        }
        assert!((s * a.total - b.total).abs() < 1e-8);
    }
}

#[test]
fn sphere_linearization_modes_agree() {
    let b = SphereScenario::default().build().unwrap();
    let cf = compute_invariant(&b.problem, &b.model, &spec()).unwrap();
    let fd = compute_invariant(
        &b.problem,
        &b.model
            .clone()
            .with_mode(LinearizationMode::FiniteDifference),
        &spec(),
    )
    .unwrap();
    for (a, c) in cf.charts.iter().zip(&fd.charts) {
        assert_eq!(a.maslov.index, c.maslov.index);
        assert!((a.maslov.raw_winding - c.maslov.raw_winding).abs() < 1e-6);
    }
    assert!((cf.total - fd.total).abs() < 1e-12);
}

#[test]
fn sphere_total_is_stable_under_quadrature_doubling() {
    let b = SphereScenario::default().build().unwrap();
    let base = compute_invariant(&b.problem, &b.model, &spec()).unwrap();
    let fine = compute_invariant(&b.problem, &b.model, &spec().doubled()).unwrap();
    assert!((base.total - fine.total).abs() <= base.error_estimate.max(1e-10));
    assert_bookkeeping(&fine);
}

/// Delegates to another chart under a new ordinal.
struct Relabel(Chart);

impl ChartMap for Relabel {
    fn coords(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.0.coords(p)
    }

    fn point(&self, x: &[f64]) -> Result<Point> {
        self.0.point(x)
    }

    fn level(&self, p: &[f64]) -> f64 {
        self.0.level(p)
    }
}

/// The sphere with the south cap first: the chain is the boundary of the south
/// cap and the north chart keeps only the part outside it.
#[test]
fn sphere_invariant_does_not_depend_on_chart_order() {
    let s = SphereScenario::default();
    let b = s.build().unwrap();
    let orig = b.problem.atlas.charts();
    let relabel = |c: &Chart, id| {
        Chart::new(
            id,
            c.name.clone(),
            1,
            c.coord_names.clone(),
            c.periods.clone(),
            Arc::new(Relabel(c.clone())),
        )
        .unwrap()
    };
    let atlas = Atlas::new(vec![relabel(&orig[1], 0), relabel(&orig[0], 1)]).unwrap();
    let zt = -s.boundary_height();
    let circle = vec![ParamKind::circle(0.0, 2.0 * PI)];
    let declare = |sign| {
        Chain::new(
            "dV.U",
            (0, 1),
            circle.clone(),
            sign,
            Some(0),
            Arc::new(move |u: &[f64]| Ok(sphere_point(zt, u[0]))),
        )
        .unwrap()
    };
    let chains = build_overlap_chains(&atlas, vec![declare(1.0)])
        .or_else(|_| build_overlap_chains(&atlas, vec![declare(-1.0)]))
        .unwrap();
    let phase = TransitionPhase::from_charts(&atlas, 0, 1, JacobianMode::FiniteDifference).unwrap();
    let overlaps = chains
        .into_iter()
        .map(|chain| Overlap {
            chain,
            phase: phase.clone(),
        })
        .collect();
    let band = |lo, hi, id, name: &str| {
        VolumeRegion::new(
            name,
            id,
            vec![
                ParamKind::interval(lo, hi),
                ParamKind::circle(0.0, 2.0 * PI),
            ],
            -1.0,
            Arc::new(|u: &[f64]| Ok(sphere_point(u[0], u[1]))),
        )
    };
    let swap =
        |pts: &[(usize, Vec<Point>)]| pts.iter().map(|(id, p)| (1 - id, p.clone())).collect();
    let problem = InvariantProblem {
        label: "sphere, south first".into(),
        atlas: atlas.clone(),
        overlaps,
        regions: vec![band(-1.0, zt, 0, "V"), band(zt, 1.0, 1, "U-V")],
        maslov_points: swap(&b.problem.maslov_points),
    };
    let mut model = s
        .loop_model()
        .with_mode(LinearizationMode::FiniteDifference);
    let probe: Vec<Point> = (0..10)
        .map(|i| sphere_point(-0.9 + 0.2 * i as f64, i as f64))
        .collect();
    for c in atlas.charts() {
        model.add_certificate(certify_chart_invariance(&model, c, &probe, &[0.25, 0.5]).unwrap());
    }
    let r = compute_invariant(&problem, &model, &spec()).unwrap();
    let j: Vec<_> = r.charts.iter().map(|c| c.maslov.index).collect();
    assert_eq!(j, vec![-1, 1]);
    assert!(r.total.abs() < 1e-6, "{}", r.total);
    assert!((r.chern.value - 2.0).abs() < 1e-4);
    let orig = compute_invariant(&b.problem, &b.model, &spec()).unwrap();
    assert!((r.total - orig.total).abs() < 1e-6);
}

#[test]
fn hirzebruch_doubling_and_reversal_at_one_radius() {
    let h = HirzebruchScenario::parse(1, "3", "1").unwrap();
    let q = HirzebruchScenario::default_quadrature();
    let b = h.build(0.05, HirzebruchLoop::Psi).unwrap();
    let one = compute_invariant(&b.problem, &b.model, &q).unwrap();
    let two = compute_invariant(&b.problem, &b.model.doubled(), &q).unwrap();
    let rev = compute_invariant(&b.problem, &b.model.reversed(), &q).unwrap();
    for (a, c) in one.charts.iter().zip(&two.charts) {
        assert_eq!(2 * a.maslov.index, c.maslov.index);
    }
    let tol = 1e-6 + one.error_estimate;
    assert!(
        (two.total - 2.0 * one.total).abs() < 2.0 * tol,
        "{} vs {}",
        two.total,
        one.total
    );
    assert!(
        (rev.total + one.total).abs() < tol,
        "{} vs {}",
        rev.total,
        one.total
    );
    assert_bookkeeping(&one);
    assert_bookkeeping(&two);
}

#[test]
fn hirzebruch_chern_drift() {
    let h = HirzebruchScenario::parse(1, "3", "1").unwrap();
    let c = h
        .chern_ladder(&HirzebruchScenario::default_quadrature())
        .unwrap();
    println!(
        "chern rungs {:?}",
        c.rungs
            .iter()
            .map(|(e, v)| (*e, v.value))
            .collect::<Vec<_>>()
    );
    println!(
        "drift constant C = {:.4e}, extrapolated {:.8}",
        c.drift_constant, c.fit.intercept
    );
    assert!(c.drift_constant.is_finite());
    assert!((c.fit.intercept - 7.0).abs() < 0.07);
}
