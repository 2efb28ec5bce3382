//! Linear extrapolation in the tube radius and ladder summaries.

use serde::Serialize;

use super::compute::InvariantReport;
use crate::error::{Error, Result};
use crate::geom::Estimate;

/// Least-squares line `y = intercept + slope * eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub residual_rms: f64,
    /// Error of the intercept propagated from the per-rung estimates, plus the fit residual.
    pub error: f64,
}

pub fn linear_extrapolation(eps: &[f64], values: &[Estimate]) -> Result<LinearFit> {
    if eps.len() != values.len() || eps.len() < 2 {
        return Err(Error::InvalidParameter(
            "extrapolation needs at least two matching rungs".into(),
        ));
    }
    let m = eps.len() as f64;
    let mean_e = eps.iter().sum::<f64>() / m;
    let mean_y = values.iter().map(|v| v.value).sum::<f64>() / m;
    let see: f64 = eps.iter().map(|e| (e - mean_e).powi(2)).sum();
    if see == 0.0 {
        return Err(Error::InvalidParameter(
            "extrapolation needs distinct radii".into(),
        ));
    }
    let sey: f64 = eps
        .iter()
        .zip(values)
        .map(|(e, v)| (e - mean_e) * (v.value - mean_y))
        .sum();
    let slope = sey / see;
    let intercept = mean_y - slope * mean_e;
    let residual_rms = (eps
        .iter()
        .zip(values)
        .map(|(e, v)| (v.value - intercept - slope * e).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    // intercept = sum_i c_i y_i
    let propagated: f64 = eps
        .iter()
        .zip(values)
        .map(|(e, v)| (1.0 / m - mean_e * (e - mean_e) / see).abs() * v.error)
        .sum();
    Ok(LinearFit {
        intercept,
        slope,
        residual_rms,
        error: propagated + residual_rms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderRung {
    pub epsilon: f64,
    pub report: InvariantReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtrapolatedReport {
    pub total: LinearFit,
    /// Per chart id.
    pub chart_terms: Vec<(usize, LinearFit)>,
    /// Per chain pair.
    pub pair_terms: Vec<((usize, usize), LinearFit)>,
    pub chern: LinearFit,
}

/// Abscissa of the ladder fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extrapolation {
    /// Straight line in the radius.
    #[default]
    Eps,
    /// Straight line in the squared radius.
    Eps2,
}

impl Extrapolation {
    pub fn abscissa(self, eps: f64) -> f64 {
        match self {
            Extrapolation::Eps => eps,
            Extrapolation::Eps2 => eps * eps,
        }
    }
}

impl std::str::FromStr for Extrapolation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps" => Ok(Extrapolation::Eps),
            "eps2" => Ok(Extrapolation::Eps2),
            _ => Err(Error::InvalidParameter(format!(
                "unknown extrapolation variable {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderReport {
    pub variable: Extrapolation,
    pub rungs: Vec<LadderRung>,
    pub extrapolated: ExtrapolatedReport,
}

impl LadderReport {
    pub fn pair(&self, i: usize, k: usize) -> Option<&LinearFit> {
        self.extrapolated
            .pair_terms
            .iter()
            .find(|(p, _)| *p == (i, k))
            .map(|(_, f)| f)
    }
}

/// Fits every term of structurally identical reports linearly in the radius.
pub fn extrapolate_ladder(rungs: Vec<LadderRung>) -> Result<LadderReport> {
    extrapolate_ladder_in(rungs, Extrapolation::Eps)
}

/// Fits every term of structurally identical reports against `variable`.
pub fn extrapolate_ladder_in(
    rungs: Vec<LadderRung>,
    variable: Extrapolation,
) -> Result<LadderReport> {
    if rungs.len() < 2 {
        return Err(Error::InvalidParameter(
            "ladder needs at least two rungs".into(),
        ));
    }
    for w in rungs.windows(2) {
        if w[1].epsilon >= w[0].epsilon {
            return Err(Error::InvalidParameter(
                "ladder must be strictly decreasing".into(),
            ));
        }
    }
    let first = &rungs[0].report;
    for r in &rungs {
        let same_charts = r.report.charts.len() == first.charts.len()
            && r.report
                .charts
                .iter()
                .zip(&first.charts)
                .all(|(a, b)| a.chart_id == b.chart_id);
        let same_pairs = r.report.pairs.len() == first.pairs.len()
            && r.report
                .pairs
                .iter()
                .zip(&first.pairs)
                .all(|(a, b)| a.pair == b.pair);
        if !same_charts || !same_pairs {
            return Err(Error::InvalidParameter(
                "ladder reports differ in structure".into(),
            ));
        }
    }
    let eps: Vec<f64> = rungs.iter().map(|r| variable.abscissa(r.epsilon)).collect();
    let fit = |get: &dyn Fn(&InvariantReport) -> Estimate| -> Result<LinearFit> {
        let vals: Vec<Estimate> = rungs.iter().map(|r| get(&r.report)).collect();
        linear_extrapolation(&eps, &vals)
    };
    let total = fit(&|r| Estimate {
        value: r.total,
        error: r.error_estimate,
    })?;
    let chern = fit(&|r| r.chern)?;
    let mut chart_terms = Vec::new();
    for (idx, c) in first.charts.iter().enumerate() {
        chart_terms.push((c.chart_id, fit(&|r| r.charts[idx].term)?));
    }
    let mut pair_terms = Vec::new();
    for (idx, p) in first.pairs.iter().enumerate() {
        pair_terms.push((p.pair, fit(&|r| r.pairs[idx].value)?));
    }
    Ok(LadderReport {
        variable,
        rungs,
        extrapolated: ExtrapolatedReport {
            total,
            chart_terms,
            pair_terms,
            chern,
        },
    })
}
