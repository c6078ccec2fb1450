//! Curves of plan metrics over a grid of lot qualities.

use serde::{Deserialize, Serialize};

use super::{asn, oc};
use crate::dist::{DefectHypothesis, PopulationModel};
use crate::error::{QcError, Result};
use crate::interval;
use crate::plan::Plan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Probability of acceptance.
    Oc,
    /// Average sample number.
    Asn,
    /// Sampling error of the observed rate.
    Moe,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::Oc => "oc",
            Metric::Asn => "asn",
            Metric::Moe => "moe",
        }
    }
}

/// Grid of lot qualities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    /// Defect counts; finite lots only.
    Counts(Vec<u64>),
    /// Defect rates, converted to counts by rounding for finite lots.
    Rates(Vec<f64>),
}

impl Sweep {
    /// `steps + 1` evenly spaced rates on `[0, max_rate]`.
    pub fn rate_grid(max_rate: f64, steps: usize) -> Sweep {
        Sweep::Rates((0..=steps).map(|i| max_rate * i as f64 / steps as f64).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            Sweep::Counts(v) => v.len(),
            Sweep::Rates(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// True defect rate.
    pub p: f64,
    /// True defect count, for finite lots.
    #[serde(rename = "D")]
    pub d: Option<u64>,
    pub metric: Metric,
    pub value: f64,
}

fn grid(model: &PopulationModel, sweep: &Sweep) -> Result<Vec<(f64, DefectHypothesis)>> {
    match sweep {
        Sweep::Counts(ds) => {
            let lot = model.lot_size().ok_or_else(|| {
                QcError::ModelMismatch("defect-count sweeps need a finite lot".into())
            })?;
            Ok(ds.iter().map(|&d| (d as f64 / lot as f64, DefectHypothesis::Count(d))).collect())
        }
        Sweep::Rates(ps) => ps
            .iter()
            .map(|&p| Ok((p, model.hypothesis_from_rate(p)?)))
            .collect(),
    }
}

/// OC or ASN of `plan` at every grid point, in sweep order.
pub fn curve(plan: &Plan, model: &PopulationModel, sweep: &Sweep, metric: Metric) -> Result<Vec<CurvePoint>> {
    let f = match metric {
        Metric::Oc => oc,
        Metric::Asn => asn,
        Metric::Moe => {
            return Err(QcError::domain("margin of error is a function of sample size; use margin_of_error_curve"))
        }
    };
    grid(model, sweep)?
        .into_iter()
        .map(|(p, hyp)| {
            let d = match hyp {
                DefectHypothesis::Count(d) => Some(d),
                DefectHypothesis::Rate(_) => None,
            };
            Ok(CurvePoint { p, d, metric, value: f(plan, model, hyp)? })
        })
        .collect()
}

/// Margin of error at each sample size for a fixed assumed rate.
pub fn margin_of_error_curve(
    model: &PopulationModel,
    assumed_rate: f64,
    alpha: f64,
    sample_sizes: &[u64],
) -> Result<Vec<(u64, f64)>> {
    sample_sizes
        .iter()
        .map(|&n| Ok((n, interval::margin_of_error(model, n, assumed_rate, alpha)?)))
        .collect()
}
