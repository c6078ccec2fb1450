//! Operating characteristics, average sample numbers and simulation.

mod analytic;
pub mod curve;
mod dp;
pub mod simulate;

pub use analytic::{asn_double, asn_single, oc_double, oc_single};
pub use curve::{curve, margin_of_error_curve, CurvePoint, Metric, Sweep};
pub use dp::{absorb, Absorption};
pub use simulate::{simulate, SimulationReport};

use crate::dist::{DefectHypothesis, PopulationModel};
use crate::error::Result;
use crate::plan::{Plan, SequentialPlan};

/// Probability that a sequential plan accepts, by exact dynamic programming
/// over `(m, d)`.
pub fn oc_sequential(plan: &SequentialPlan, model: &PopulationModel, hyp: DefectHypothesis) -> Result<f64> {
    Ok(absorb(&plan.decision_table()?, model, hyp)?.accept)
}

/// Expected number of items a sequential plan inspects.
pub fn asn_sequential(plan: &SequentialPlan, model: &PopulationModel, hyp: DefectHypothesis) -> Result<f64> {
    Ok(absorb(&plan.decision_table()?, model, hyp)?.asn)
}

/// Acceptance probability of any plan.
pub fn oc(plan: &Plan, model: &PopulationModel, hyp: DefectHypothesis) -> Result<f64> {
    plan.check_model(model)?;
    match plan {
        Plan::Single(p) => oc_single(p, model, hyp),
        Plan::Double(p) => oc_double(p, model, hyp),
        Plan::Sequential(p) => oc_sequential(p, model, hyp),
    }
}

/// Average sample number of any plan. Double plans honour their
/// `curtailed` flag.
pub fn asn(plan: &Plan, model: &PopulationModel, hyp: DefectHypothesis) -> Result<f64> {
    plan.check_model(model)?;
    match plan {
        Plan::Single(p) => {
            model.sample(hyp, p.n)?;
            Ok(asn_single(p))
        }
        Plan::Double(p) => asn_double(p, model, hyp, p.curtailed),
        Plan::Sequential(p) => asn_sequential(p, model, hyp),
    }
}
