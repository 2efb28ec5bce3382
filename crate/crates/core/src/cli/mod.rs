//! Command-line driver: argument parsing, scenario dispatch and report output.

mod render;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geom::QuadratureSpec;
use crate::invariant::{chern_pairing, Extrapolation};
use crate::scenarios::hirzebruch::CHERN_REL_TOL;
use crate::scenarios::sphere::{sphere_expected, SPHERE_CHERN_TOL};
use crate::scenarios::{
    closed_form_outcome, Check, HirzebruchRun, HirzebruchScenario, ScenarioOutcome, SphereRun,
    SphereScenario, TorusRun, TorusScenario,
};
use crate::toric::{chern_pairing_exact, DelzantTrapezoid, ExactValue};

pub const SCHEMA_VERSION: &str = "1";
pub const DEFAULT_SEED: u64 = 7;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parameter sets with literal expected invariants.
pub const GOLDEN_HIRZEBRUCH: [(u32, &str, &str, &str, &str); 2] =
    [(1, "3", "1", "8/15", "-4/15"), (2, "5", "1", "7/6", "-7/6")];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChernTarget {
    Sphere,
    Torus,
    Hirzebruch,
}

#[derive(Debug, Parser)]
#[command(
    name = "hamloop",
    version,
    about = "Characteristic numbers of Hamiltonian loops"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Gauss-Legendre order per interval cell.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(2..))]
    pub gl_order: Option<u64>,

    /// Equal cells per interval parameter.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub cells: Option<u64>,

    /// Base samples along each phase-winding circle.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(4..))]
    pub circle_samples: Option<u64>,

    /// Uniform nodes on the remaining circle parameters.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub periodic_nodes: Option<u64>,

    /// Gauss-Legendre order of the time integral.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(2..))]
    pub t_order: Option<u64>,

    /// Samples per Maslov loop.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(4..))]
    pub maslov_samples: Option<u64>,

    /// Tube radii, strictly decreasing, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ladder: Option<Vec<f64>>,

    /// Abscissa of the ladder fit: `eps` or `eps2`.
    #[arg(long, global = true, default_value = "eps")]
    pub extrapolate: Extrapolation,

    /// Seed for the torus Hamiltonian.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Tolerance override for a named check, `NAME=VALUE`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Rotation of the round sphere about its axis.
    Sphere {
        /// Half-width of the cap overlap band, in (0, pi/2).
        #[arg(long, default_value_t = 0.3)]
        epsilon_hat: f64,
    },
    /// Reparameterized autonomous loop on the flat torus.
    Torus {
        /// Half-dimension, 1 to 3.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Circle actions on a Hirzebruch surface.
    Hirzebruch {
        #[arg(long)]
        k: u32,
        /// Exact rational, `p/q` or decimal.
        #[arg(long)]
        tau: String,
        #[arg(long)]
        mu: String,
    },
    /// Chern pairing from transition phases.
    Chern {
        #[arg(long, value_enum)]
        scenario: ChernTarget,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value = "3")]
        tau: String,
        #[arg(long, default_value = "1")]
        mu: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Every golden check; nonzero exit on any failure.
    VerifyAll,
}

fn parse_tolerance(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s
        .rsplit_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let tol: f64 = value
        .parse()
        .map_err(|e| format!("tolerance {value:?}: {e}"))?;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(format!(
            "tolerance {value:?} must be finite and non-negative"
        ));
    }
    Ok((name.to_string(), tol))
}

/// Settings echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub parameters: serde_json::Value,
    pub quadrature_overrides: serde_json::Value,
    pub ladder: Option<Vec<f64>>,
    pub extrapolation: Extrapolation,
    pub seed: u64,
    pub tolerance_overrides: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliReport {
    pub schema: &'static str,
    pub config: RunConfig,
    pub outcomes: Vec<ScenarioOutcome>,
    pub passed: bool,
}

/// Typed results kept for table rendering.
#[derive(Debug, Clone)]
pub(crate) enum Detail {
    Sphere(Box<SphereRun>),
    Torus(Box<TorusRun>),
    Hirzebruch(Box<HirzebruchRun>),
    None,
}

impl Cli {
    fn quadrature(&self, base: QuadratureSpec) -> Result<QuadratureSpec> {
        let mut q = base;
        let set = |dst: &mut usize, v: Option<u64>| {
            if let Some(v) = v {
                *dst = v as usize;
            }
        };
        set(&mut q.gl_order, self.gl_order);
        set(&mut q.cells, self.cells);
        set(&mut q.circle_samples, self.circle_samples);
        set(&mut q.periodic_nodes, self.periodic_nodes);
        set(&mut q.t_order, self.t_order);
        set(&mut q.maslov_samples, self.maslov_samples);
        q.validate()?;
        Ok(q)
    }

    fn hirzebruch(&self, k: u32, tau: &str, mu: &str) -> Result<HirzebruchScenario> {
        let mut s = HirzebruchScenario::parse(k, tau, mu)?.with_extrapolation(self.extrapolate);
        if let Some(l) = &self.ladder {
            s = s.with_ladder(l.clone())?;
        }
        Ok(s)
    }

    pub fn config(&self) -> RunConfig {
        let (command, parameters) = match &self.command {
            Command::Sphere { epsilon_hat } => ("sphere", json!({ "epsilon_hat": epsilon_hat })),
            Command::Torus { n } => ("torus", json!({ "n": n })),
            Command::Hirzebruch { k, tau, mu } => {
                ("hirzebruch", json!({ "k": k, "tau": tau, "mu": mu }))
            }
            Command::Chern {
                scenario,
                k,
                tau,
                mu,
                n,
            } => (
                "chern",
                json!({ "scenario": scenario, "k": k, "tau": tau, "mu": mu, "n": n }),
            ),
            Command::VerifyAll => ("verify-all", json!({})),
        };
        RunConfig {
            command: command.into(),
            parameters,
            quadrature_overrides: json!({
                "gl_order": self.gl_order,
                "cells": self.cells,
                "circle_samples": self.circle_samples,
                "periodic_nodes": self.periodic_nodes,
                "t_order": self.t_order,
                "maslov_samples": self.maslov_samples,
            }),
            ladder: self.ladder.clone(),
            extrapolation: self.extrapolate,
            seed: self.seed,
            tolerance_overrides: self.tolerances.clone(),
        }
    }

    fn sphere(&self, epsilon_hat: f64) -> Result<(ScenarioOutcome, Detail)> {
        let run =
            SphereScenario::new(epsilon_hat)?.run(&self.quadrature(QuadratureSpec::default())?)?;
        Ok((run.outcome(), Detail::Sphere(Box::new(run))))
    }

    fn torus(&self, n: usize) -> Result<(ScenarioOutcome, Detail)> {
        let run =
            TorusScenario::new(n, self.seed)?.run(&self.quadrature(QuadratureSpec::default())?)?;
        Ok((run.outcome(), Detail::Torus(Box::new(run))))
    }

    fn hirzebruch_run(&self, k: u32, tau: &str, mu: &str) -> Result<(ScenarioOutcome, Detail)> {
        let s = self.hirzebruch(k, tau, mu)?;
        let run = s.run(&self.quadrature(HirzebruchScenario::default_quadrature())?)?;
        Ok((run.outcome(), Detail::Hirzebruch(Box::new(run))))
    }

    fn chern(
        &self,
        target: ChernTarget,
        k: u32,
        tau: &str,
        mu: &str,
        n: usize,
    ) -> Result<ScenarioOutcome> {
        match target {
            ChernTarget::Sphere => {
                let b = SphereScenario::default().build()?;
                let c = chern_pairing(
                    &b.problem.atlas,
                    &b.problem.overlaps,
                    &self.quadrature(QuadratureSpec::default())?,
                )?;
                let expected = sphere_expected().chern;
                Ok(ScenarioOutcome::new(
                    "chern",
                    json!({ "scenario": "sphere" }),
                    json!({ "chern": expected }),
                    json!({ "chern": c }),
                    vec![Check::absolute(
                        "chern",
                        expected,
                        c.value,
                        SPHERE_CHERN_TOL,
                    )],
                ))
            }
            ChernTarget::Torus => {
                let b = TorusScenario::new(n, self.seed)?.build()?;
                let c = chern_pairing(
                    &b.problem.atlas,
                    &b.problem.overlaps,
                    &self.quadrature(QuadratureSpec::default())?,
                )?;
                Ok(ScenarioOutcome::new(
                    "chern",
                    json!({ "scenario": "torus", "n": n, "seed": self.seed }),
                    json!({ "chern": 0.0 }),
                    json!({ "chern": c, "overlaps": b.problem.overlaps.len() }),
                    vec![Check::absolute("chern", 0.0, c.value, SPHERE_CHERN_TOL)],
                ))
            }
            ChernTarget::Hirzebruch => {
                let s = self.hirzebruch(k, tau, mu)?;
                let ladder =
                    s.chern_ladder(&self.quadrature(HirzebruchScenario::default_quadrature())?)?;
                let exact = chern_pairing_exact(&s.trapezoid);
                Ok(ScenarioOutcome::new(
                    "chern",
                    json!({ "scenario": "hirzebruch", "k": k, "tau": tau, "mu": mu,
                            "ladder": s.ladder, "extrapolation": s.extrapolation }),
                    json!({ "chern": exact }),
                    json!(ladder),
                    vec![Check::relative(
                        "chern",
                        exact.to_f64(),
                        ladder.fit.intercept,
                        CHERN_REL_TOL,
                    )],
                ))
            }
        }
    }

    fn verify_all(&self) -> Result<Vec<(ScenarioOutcome, Detail)>> {
        let mut out = Vec::new();
        for (k, tau, mu, i, it) in GOLDEN_HIRZEBRUCH {
            let t = DelzantTrapezoid::parse(k, tau, mu)?;
            let i: ExactValue = i.parse()?;
            let it: ExactValue = it.parse()?;
            out.push((closed_form_outcome(&t, &i, &it), Detail::None));
        }
        out.push(self.sphere(SphereScenario::default().epsilon_hat)?);
        for n in [1, 2] {
            out.push(self.torus(n)?);
        }
        for (k, tau, mu, _, _) in GOLDEN_HIRZEBRUCH {
            out.push(self.hirzebruch_run(k, tau, mu)?);
        }
        Ok(out)
    }

    /// Runs the selected command.
    pub(crate) fn execute(&self) -> Result<(CliReport, Vec<Detail>)> {
        let results = match &self.command {
            Command::Sphere { epsilon_hat } => vec![self.sphere(*epsilon_hat)?],
            Command::Torus { n } => vec![self.torus(*n)?],
            Command::Hirzebruch { k, tau, mu } => vec![self.hirzebruch_run(*k, tau, mu)?],
            Command::Chern {
                scenario,
                k,
                tau,
                mu,
                n,
            } => vec![(self.chern(*scenario, *k, tau, mu, *n)?, Detail::None)],
            Command::VerifyAll => self.verify_all()?,
        };
        let (mut outcomes, details): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        for o in &mut outcomes {
            o.override_tolerances(&self.tolerances);
        }
        let passed = outcomes.iter().all(|o| o.passed);
        Ok((
            CliReport {
                schema: SCHEMA_VERSION,
                config: self.config(),
                outcomes,
                passed,
            },
            details,
        ))
    }

    /// Report text in the selected format.
    pub fn report(&self) -> Result<(String, bool)> {
        let (report, details) = self.execute()?;
        let text = match self.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::ValidationFailure(e.to_string()))?;
                s.push('\n');
                s
            }
            Format::Table => render::table(&report, &details),
        };
        Ok((text, report.passed))
    }
}

fn usage_error(e: &Error) -> bool {
    matches!(e, Error::InvalidParameter(_) | Error::InvalidTrapezoid(_))
}

/// Parses `args` (program name first), runs, prints, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.report() {
        Ok((text, passed)) => {
            print!("{text}");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_VERIFICATION;
                }
            }
            if passed {
                EXIT_OK
            } else {
                EXIT_VERIFICATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if usage_error(&e) {
                EXIT_USAGE
            } else {
                EXIT_VERIFICATION
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_parsing() {
        assert_eq!(
            parse_tolerance("I_psi=0.05").unwrap(),
            ("I_psi".to_string(), 0.05)
        );
        assert!(parse_tolerance("I_psi").is_err());
        assert!(parse_tolerance("x=-1").is_err());
    }

    #[test]
    fn argument_errors_exit_2() {
        assert_eq!(run(["hamloop", "torus", "--n", "x"]), EXIT_USAGE);
        assert_eq!(run(["hamloop", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["hamloop", "torus", "--n", "9"]), EXIT_USAGE);
        assert_eq!(
            run([
                "hamloop",
                "hirzebruch",
                "--k",
                "1",
                "--tau",
                "1/2",
                "--mu",
                "1"
            ]),
            EXIT_USAGE
        );
        assert_eq!(run(["hamloop", "sphere", "--gl-order", "0"]), EXIT_USAGE);
        assert_eq!(
            run([
                "hamloop",
                "hirzebruch",
                "--k",
                "1",
                "--tau",
                "3",
                "--mu",
                "1",
                "--ladder",
                "0.01,0.02"
            ]),
            EXIT_USAGE
        );
    }
}
