//! Plain-text tables for terminal output.

use std::fmt::Write;

use super::{CliReport, Detail};
use crate::invariant::{InvariantReport, LadderReport};
use crate::scenarios::ScenarioOutcome;

pub(crate) fn table(report: &CliReport, details: &[Detail]) -> String {
    let mut s = String::new();
    for (o, d) in report.outcomes.iter().zip(details) {
        let _ = writeln!(s, "== {} {} ==", o.scenario, o.parameters);
        match d {
            Detail::Sphere(r) => invariant_report(&mut s, &r.report),
            Detail::Torus(r) => invariant_report(&mut s, &r.report),
            Detail::Hirzebruch(r) => {
                ladder(&mut s, &r.psi);
                ladder(&mut s, &r.psi_tilde);
            }
            Detail::None => {}
        }
        checks(&mut s, o);
        s.push('\n');
    }
    let failed: usize = report
        .outcomes
        .iter()
        .map(|o| o.checks.iter().filter(|c| !c.passed).count())
        .sum();
    let total: usize = report.outcomes.iter().map(|o| o.checks.len()).sum();
    let _ = writeln!(
        s,
        "{}: {} of {} checks passed",
        if report.passed { "PASS" } else { "FAIL" },
        total - failed,
        total
    );
    s
}

fn invariant_report(s: &mut String, r: &InvariantReport) {
    let _ = writeln!(s, "loop {} on {} (n = {})", r.loop_name, r.label, r.n);
    let _ = writeln!(
        s,
        "  {:<4} {:<14} {:>4} {:>10} {:>9} {:>16} {:>16}",
        "id", "chart", "J", "winding", "residual", "volume", "J*volume"
    );
    for c in &r.charts {
        let _ = writeln!(
            s,
            "  {:<4} {:<14} {:>4} {:>10.6} {:>9.2e} {:>16.10} {:>16.10}",
            c.chart_id,
            c.chart,
            c.maslov.index,
            c.maslov.raw_winding,
            c.maslov.residual,
            c.volume.value,
            c.term.value
        );
    }
    if !r.pairs.is_empty() {
        let _ = writeln!(
            s,
            "  {:<8} {:<10} {:<18} {:>7} {:>16} {:>16} {:>16}",
            "pair", "chain", "phase", "winding", "N", "N collapsed", "chern part"
        );
        for p in &r.pairs {
            let collapsed = p
                .collapsed
                .map_or_else(|| "-".to_string(), |v| format!("{v:.10}"));
            let _ = writeln!(
                s,
                "  {:<8} {:<10} {:<18} {:>7} {:>16.10} {:>16} {:>16.10}",
                format!("({},{})", p.pair.0, p.pair.1),
                p.chain,
                p.phase_mode,
                p.phase_winding,
                p.value.value,
                collapsed,
                p.chern_part.value
            );
        }
    }
    let _ = writeln!(
        s,
        "  maslov {:.10}  pairs {:.10}  total {:.10} +- {:.1e}  chern {:.8}",
        r.maslov_total, r.pair_total, r.total, r.error_estimate, r.chern.value
    );
}

fn ladder(s: &mut String, l: &LadderReport) {
    for rung in &l.rungs {
        let _ = writeln!(s, "-- eps = {}", rung.epsilon);
        invariant_report(s, &rung.report);
    }
    let x = &l.extrapolated;
    let _ = writeln!(s, "-- extrapolated (linear in {:?})", l.variable);
    let _ = writeln!(
        s,
        "  total {:.10} +- {:.1e} (slope {:.6}, residual {:.1e})",
        x.total.intercept, x.total.error, x.total.slope, x.total.residual_rms
    );
    for (id, f) in &x.chart_terms {
        let _ = writeln!(s, "  chart {id} term {:.10}", f.intercept);
    }
    for ((i, k), f) in &x.pair_terms {
        let _ = writeln!(s, "  N({i},{k}) {:.10} +- {:.1e}", f.intercept, f.error);
    }
    let _ = writeln!(s, "  chern {:.10}", x.chern.intercept);
}

fn checks(s: &mut String, o: &ScenarioOutcome) {
    let _ = writeln!(
        s,
        "  {:<24} {:>16} {:>16} {:>12} {:>10} {}",
        "check", "expected", "actual", "delta", "tolerance", "result"
    );
    for c in &o.checks {
        let _ = writeln!(
            s,
            "  {:<24} {:>16.10} {:>16.10} {:>12.3e} {:>10} {}",
            c.name,
            c.expected,
            c.actual,
            c.delta,
            format!(
                "{:.0e}{}",
                c.tolerance,
                if c.relative { " rel" } else { "" }
            ),
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
}
