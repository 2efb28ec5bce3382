mod common;

use hamloop::geom::QuadratureSpec;
use hamloop::invariant::{chain_phase_winding, compute_invariant, LinearizationMode};
use hamloop::scenarios::hirzebruch::DEFAULT_LADDER;
use hamloop::scenarios::{HirzebruchLoop, HirzebruchScenario, SphereScenario, TorusScenario};
use hamloop::Error;

fn failed(o: &hamloop::scenarios::ScenarioOutcome) -> Vec<String> {
    o.checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} {} vs {}", c.name, c.actual, c.expected))
        .collect()
}

#[test]
fn sphere_passes_for_several_band_widths() {
    for eh in [0.05, 0.2, 0.4, 0.8, 1.3] {
        let run = SphereScenario::new(eh)
            .unwrap()
            .run(&QuadratureSpec::default())
            .unwrap();
        let o = run.outcome();
        assert!(o.passed, "epsilon_hat={eh}: {:?}", failed(&o));
        assert!(run.two_charts.abs() < 1e-6);
        assert!(run.punctured.abs() < 1e-6);
    }
}

#[test]
fn sphere_rejects_bad_band_width() {
    for eh in [0.0, -0.1, 1.6, f64::NAN] {
        assert!(matches!(
            SphereScenario::new(eh),
            Err(Error::InvalidParameter(_))
        ));
    }
}

#[test]
fn torus_passes_for_several_hamiltonians() {
    for n in [1, 2] {
        for seed in 0..3 {
            let run = TorusScenario::new(n, seed)
                .unwrap()
                .run(&QuadratureSpec::default())
                .unwrap();
            let o = run.outcome();
            assert!(o.passed, "n={n} seed={seed}: {:?}", failed(&o));
            assert!(run.linearization_gap < 1e-5);
        }
    }
    assert!(TorusScenario::new(0, 1).is_err());
    assert!(TorusScenario::new(4, 1).is_err());
}

#[test]
fn torus_loop_closes() {
    for n in [1, 2] {
        let s = TorusScenario::new(n, 42).unwrap();
        let b = s.build().unwrap();
        let chart = &b.problem.atlas.charts()[0];
        for p in &b.problem.maslov_points[0].1 {
            let end = b.model.flow(1.0, p).unwrap();
            let gap = chart
                .coord_delta(p, &end)
                .iter()
                .fold(0.0f64, |a, d| a.max(d.abs()));
            assert!(gap < 1e-8, "n={n}: {gap:e}");
            let mid = b.model.flow(0.5, p).unwrap();
            assert!((b.g.value(&mid) - b.g.value(p)).abs() < 1e-8);
        }
    }
}

#[test]
fn hirzebruch_maslov_indices_from_the_flow() {
    for (k, tau, mu) in [(1, "3", "1"), (2, "5", "1")] {
        let h = HirzebruchScenario::parse(k, tau, mu).unwrap();
        let q = HirzebruchScenario::default_quadrature();
        for which in [HirzebruchLoop::Psi, HirzebruchLoop::PsiTilde] {
            let b = h.build(0.05, which).unwrap();
            let model = b
                .model
                .clone()
                .with_mode(LinearizationMode::FiniteDifference);
            let cf = compute_invariant(&b.problem, &b.model, &q).unwrap();
            let fd = compute_invariant(&b.problem, &model, &q).unwrap();
            let jc: Vec<i64> = cf.charts.iter().map(|c| c.maslov.index).collect();
            let jf: Vec<i64> = fd.charts.iter().map(|c| c.maslov.index).collect();
            assert_eq!(jf, which.chart_windings(k).to_vec(), "k={k} {which:?}");
            assert_eq!(jc, jf);
        }
    }
}

#[test]
fn hirzebruch_single_radius() {
    let h = HirzebruchScenario::parse(1, "3", "1").unwrap();
    let e = h.expected();
    let q = HirzebruchScenario::default_quadrature();
    let b = h.build(DEFAULT_LADDER[0], HirzebruchLoop::Psi).unwrap();
    let r = compute_invariant(&b.problem, &b.model, &q).unwrap();
    let volume: f64 = r.charts.iter().map(|c| c.volume.value).sum();
    assert!((volume - e.volume.to_f64()).abs() < 2e-3, "{volume}");
    for (j, exact) in e.n_psi.iter().enumerate() {
        let p = r.pair(0, j + 1).unwrap();
        let rel = (p.value.value - exact.to_f64()).abs() / exact.to_f64().abs();
        assert!(rel < 0.05, "N'0{}: {} vs {exact}", j + 1, p.value.value);
        // The time-averaged and collapsed weights agree.
        assert!((p.collapsed.unwrap() - p.value.value).abs() < 1e-8);
    }
    let o01 = &b.problem.overlaps[0];
    assert_eq!(chain_phase_winding(&o01.chain, &o01.phase, &q).unwrap(), -1);
}

#[test]
fn hirzebruch_kappa_by_quadrature() {
    for (k, tau, mu) in [(1, "3", "1"), (2, "5", "1"), (3, "7/2", "1/2")] {
        let h = HirzebruchScenario::parse(k, tau, mu).unwrap();
        let (a, b) = h.kappa_quadrature();
        assert!((a - h.trapezoid.kappa().to_f64()).abs() < 1e-12);
        assert!((b - h.trapezoid.kappa_tilde().to_f64()).abs() < 1e-12);
    }
}

#[test]
fn hirzebruch_parameter_errors() {
    assert!(matches!(
        HirzebruchScenario::parse(1, "1", "1"),
        Err(Error::InvalidTrapezoid(_))
    ));
    let h = HirzebruchScenario::parse(1, "3", "1").unwrap();
    assert!(h.clone().with_ladder(vec![0.05]).is_err());
    assert!(h.clone().with_ladder(vec![0.02, 0.04]).is_err());
    assert!(h.geometry(0.4).is_err());
    assert!(h.geometry(0.0).is_err());
}
