use super::{DesignOptions, Stage2Model, UNBOUNDED_SEARCH_CAP};
use crate::config::QualityConfig;
use crate::dist::{DefectHypothesis, PopulationModel, SampleDist};
use crate::error::{QcError, Result};
use crate::plan::DoublePlan;
use crate::roots;

/// Acceptance probability of an equal-stage double plan as seen by the
/// designer: stage one accepts at `d1 <= c1`, and for `c1 < d1 <= c2` stage
/// two must bring at most `c2 - d1` further defects.
pub fn double_design_oc(
    model: &PopulationModel,
    hyp: DefectHypothesis,
    n1: u64,
    c1: u64,
    c2: u64,
    stage2: Stage2Model,
) -> Result<f64> {
    let first = model.sample(hyp, n1)?;
    let mut acc = first.cdf(c1 as i64);
    for i in c1 + 1..=c2.min(n1) {
        let p = first.pmf(i as i64);
        if p == 0.0 {
            continue;
        }
        let second = match (stage2, *model, hyp) {
            (Stage2Model::Independent, _, _) => first,
            (Stage2Model::Conditional, PopulationModel::WithoutReplacement { lot_size }, DefectHypothesis::Count(d)) => {
                SampleDist::hypergeometric(lot_size - n1, d - i, n1)?
            }
            (Stage2Model::Conditional, _, _) => first,
        };
        acc += p * second.cdf((c2 - i) as i64);
    }
    Ok(acc.min(1.0))
}

fn asn_full(model: &PopulationModel, hyp: DefectHypothesis, n1: u64, c1: u64, c2: u64) -> Result<f64> {
    let first = model.sample(hyp, n1)?;
    let decided = first.cdf(c1 as i64) + first.sf(c2 as i64 + 1);
    Ok(n1 as f64 * decided + 2.0 * n1 as f64 * (1.0 - decided))
}

/// Double plan with `n1 = n2` minimizing the full-inspection ASN at `p_a`.
///
/// For every `c1 < c2 <= c2_max` the smallest `n1` meeting the consumer
/// constraint is found by bisection and kept when the producer constraint
/// also holds there. Ties go to the smaller `n1`, then the smaller `c2`.
pub fn design_double(config: &QualityConfig, model: &PopulationModel, opts: &DesignOptions) -> Result<DoublePlan> {
    let (acc, rej) = config.hypotheses(model)?;
    let beta = opts.consumer_risk.target(config.beta);
    let oc = |hyp, n1, c1, c2| double_design_oc(model, hyp, n1, c1, c2, opts.stage2).unwrap_or(f64::NAN);

    let mut best: Option<(f64, u64, u64, u64)> = None;
    for c2 in 1..=opts.c2_max {
        for c1 in 0..c2 {
            let lo = c2.max(1);
            let hi = match model.lot_size() {
                Some(lot) => lot / 2,
                None => {
                    let mut hi = 2 * lo;
                    while oc(rej, hi, c1, c2) > beta && hi < UNBOUNDED_SEARCH_CAP {
                        hi *= 2;
                    }
                    hi
                }
            };
            let Some(n1) = roots::first_true(lo, hi, |n| oc(rej, n, c1, c2) <= beta) else {
                continue;
            };
            if oc(acc, n1, c1, c2) < 1.0 - config.alpha {
                continue;
            }
            let key = (asn_full(model, acc, n1, c1, c2)?, n1, c2, c1);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
    }
    match best {
        Some((_, n1, c2, c1)) => Ok(DoublePlan { n1, n2: n1, c1, c2, curtailed: false }),
        None => Err(QcError::Infeasible {
            kind: "double",
            reason: format!("no plan with c2 <= {} and n1 = n2", opts.c2_max),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lot(n: u64) -> PopulationModel {
        PopulationModel::without_replacement(n).unwrap()
    }

    #[test]
    fn strict_thousand() {
        let plan = design_double(&QualityConfig::STRICT, &lot(1000), &DesignOptions::default()).unwrap();
        assert_eq!((plan.n1, plan.n2, plan.c1, plan.c2), (298, 298, 4, 11));
    }

    #[test]
    fn zero_defects_always_accepted() {
        let v = double_design_oc(&lot(100), DefectHypothesis::Count(0), 20, 0, 2, Stage2Model::Conditional).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn conditional_and_independent_close_for_small_fractions() {
        let m = lot(100_000);
        let h = DefectHypothesis::Count(2_000);
        let a = double_design_oc(&m, h, 150, 2, 6, Stage2Model::Independent).unwrap();
        let b = double_design_oc(&m, h, 150, 2, 6, Stage2Model::Conditional).unwrap();
        assert!((a - b).abs() < 1e-3);
    }

    #[test]
    fn infeasible_when_c2_cap_too_small() {
        let opts = DesignOptions { c2_max: 1, ..DesignOptions::default() };
        assert!(design_double(&QualityConfig::STRICT, &lot(1000), &opts).is_err());
    }
}
