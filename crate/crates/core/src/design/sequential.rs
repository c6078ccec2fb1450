use super::{design_single, DesignOptions};
use crate::config::QualityConfig;
use crate::dist::PopulationModel;
use crate::error::{QcError, Result};
use crate::eval::absorb;
use crate::plan::{Curtailment, Hypotheses, Llr, SequentialPlan, Truncation};

const WEDGE_SCALE_STEP: f64 = 0.25;
const WEDGE_MAX_STEPS: u32 = 60;

/// Sequential probability ratio test seeded by the single plan `(n*, c*)`.
///
/// The thresholds use the same consumer risk as the single-plan search.
/// Truncation depends on the curtailment mode:
///
/// | mode | finite lot | with replacement |
/// |---|---|---|
/// | `None` | `N`, accept iff `Lambda <= 0` | `10 n*`, accept iff `Lambda <= 0` |
/// | `Truncated`, `Wedge` | `n*`, accept iff `d <= c*` | `3 n*`, accept iff `Lambda <= 0` |
///
/// The wedge accepts and rejects earlier than the SPRT, which can cost the
/// two-point risks. A wedge plan whose exact OC misses `1 - alpha` at `p_a`
/// or `beta` at `p_r` has both thresholds scaled by the smallest factor in
/// `1.25, 1.5, ...` that restores them. Wider thresholds move the wedge
/// intercepts apart, and in the limit the plan is the single plan
/// `(n*, c*)`, which meets both. `Truncated` keeps the nominal thresholds.
pub fn design_sequential(
    config: &QualityConfig,
    model: &PopulationModel,
    curtailment: Curtailment,
    opts: &DesignOptions,
) -> Result<SequentialPlan> {
    let (accept, reject) = config.hypotheses(model)?;
    let single = design_single(config, model, opts)?;
    let hypotheses = Hypotheses { accept, reject };
    let (log_a, log_b) = config.sprt_thresholds(opts.consumer_risk.target(config.beta));
    let llr = Llr::new(model, &hypotheses)?;
    let midline = |at: u64| Truncation { at, accept_if_defects_leq: llr.max_d_at_most(at, 0.0).max(0) as u64 };

    let truncation = match (curtailment, model.lot_size()) {
        (Curtailment::None, Some(lot)) => midline(lot),
        (Curtailment::None, None) => midline(10 * single.n),
        (_, Some(_)) => Truncation { at: single.n, accept_if_defects_leq: single.c },
        (_, None) => midline(3 * single.n),
    };
    let plan = SequentialPlan {
        config: *config,
        model: *model,
        hypotheses,
        log_a,
        log_b,
        truncation,
        curtailment,
    };
    if curtailment != Curtailment::Wedge {
        return Ok(plan);
    }

    let meets = |p: &SequentialPlan| -> Result<bool> {
        let table = p.decision_table()?;
        Ok(absorb(&table, model, accept)?.accept >= 1.0 - config.alpha
            && absorb(&table, model, reject)?.accept <= config.beta)
    };
    if meets(&plan)? {
        return Ok(plan);
    }
    for step in 1..=WEDGE_MAX_STEPS {
        let scale = 1.0 + step as f64 * WEDGE_SCALE_STEP;
        let candidate = SequentialPlan { log_a: log_a * scale, log_b: log_b * scale, ..plan.clone() };
        if meets(&candidate)? {
            return Ok(candidate);
        }
    }
    Err(QcError::Infeasible {
        kind: "sequential",
        reason: format!(
            "wedge thresholds scaled by {} still miss the risk constraints",
            1.0 + WEDGE_MAX_STEPS as f64 * WEDGE_SCALE_STEP
        ),
    })
}
