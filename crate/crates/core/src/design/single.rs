use super::{DesignOptions, UNBOUNDED_SEARCH_CAP};
use crate::config::QualityConfig;
use crate::dist::{DefectHypothesis, PopulationModel};
use crate::error::{QcError, Result};
use crate::plan::SinglePlan;
use crate::roots;

/// Smallest single plan meeting both risk constraints.
///
/// For `c = 0, 1, ...` the consumer constraint gives the smallest admissible
/// `n_L(c)` and the producer constraint the largest admissible `n_U(c)`; the
/// first `c` with `n_L <= n_U` yields `(n_L, c)`. Because the acceptance
/// probability falls with `n`, `n_L <= n_U` holds exactly when the producer
/// constraint is met at `n_L`.
pub fn design_single(config: &QualityConfig, model: &PopulationModel, opts: &DesignOptions) -> Result<SinglePlan> {
    let (acc, rej) = config.hypotheses(model)?;
    let beta = opts.consumer_risk.target(config.beta);
    let oc = |hyp: DefectHypothesis, n: u64, c: u64| -> f64 {
        model.sample(hyp, n).map(|s| s.cdf(c as i64)).unwrap_or(f64::NAN)
    };

    let c_limit = match rej {
        // At full inspection X = D_r, so c >= D_r can never reject.
        DefectHypothesis::Count(dr) => dr,
        DefectHypothesis::Rate(_) => UNBOUNDED_SEARCH_CAP,
    };

    for c in 0..c_limit {
        let n_l = match model.lot_size() {
            Some(lot) => roots::first_true(c + 1, lot, |n| oc(rej, n, c) <= beta),
            None => {
                let mut hi = (2 * (c + 1)).max(2);
                while oc(rej, hi, c) > beta && hi < UNBOUNDED_SEARCH_CAP {
                    hi *= 2;
                }
                roots::first_true(c + 1, hi, |n| oc(rej, n, c) <= beta)
            }
        };
        let Some(n_l) = n_l else { continue };
        if oc(acc, n_l, c) >= 1.0 - config.alpha {
            return Ok(SinglePlan { n: n_l, c });
        }
    }
    Err(QcError::Infeasible {
        kind: "single",
        reason: format!("no acceptance number below {c_limit} meets both risks"),
    })
}
