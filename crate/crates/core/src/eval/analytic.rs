use crate::dist::{DefectHypothesis, PopulationModel, SampleDist};
use crate::error::{QcError, Result};
use crate::plan::{DoublePlan, SinglePlan};

/// `P(X <= c)` for a sample of `n`.
pub fn oc_single(plan: &SinglePlan, model: &PopulationModel, hyp: DefectHypothesis) -> Result<f64> {
    Ok(model.sample(hyp, plan.n)?.cdf(plan.c as i64))
}

/// A single plan always inspects `n` items.
pub fn asn_single(plan: &SinglePlan) -> f64 {
    plan.n as f64
}

/// Law of the stage-two defect count given `i` defects in stage one. Without
/// replacement stage two is drawn from the `N - n1` remaining items.
fn stage_two(plan: &DoublePlan, model: &PopulationModel, hyp: DefectHypothesis, i: u64) -> Result<SampleDist> {
    match (*model, hyp) {
        (PopulationModel::WithoutReplacement { lot_size }, DefectHypothesis::Count(d)) => {
            SampleDist::hypergeometric(lot_size - plan.n1, d - i, plan.n2)
        }
        (PopulationModel::WithReplacement, DefectHypothesis::Rate(p)) => SampleDist::binomial(plan.n2, p),
        _ => Err(QcError::ModelMismatch("hypothesis does not match model".into())),
    }
}

/// Exact acceptance probability of a double plan.
pub fn oc_double(plan: &DoublePlan, model: &PopulationModel, hyp: DefectHypothesis) -> Result<f64> {
    check_double(plan, model)?;
    let first = model.sample(hyp, plan.n1)?;
    let mut acc = first.cdf(plan.c1 as i64);
    for i in plan.c1 + 1..=plan.c2.min(plan.n1) {
        let p = first.pmf(i as i64);
        if p > 0.0 {
            acc += p * stage_two(plan, model, hyp, i)?.cdf((plan.c2 - i) as i64);
        }
    }
    Ok(acc.min(1.0))
}

/// Average sample number of a double plan.
///
/// Without curtailment, `n1 P_I + (n1 + n2)(1 - P_I)` with `P_I` the chance
/// of deciding at stage one. With curtailment stage one is always inspected
/// in full and stage two stops at the first defect that pushes the total past
/// `c2`. The expected stage-two length then has a closed form through the
/// identity `E[T; T <= n] = r (M + 1) / (K + 1) P(Y >= r + 1)` for the time
/// `T` of the `r`-th defect, with `Y` hypergeometric on `(M + 1, K + 1, n + 1)`
/// (binomial analogue: `r / p P(Bin(n + 1, p) >= r + 1)`).
pub fn asn_double(plan: &DoublePlan, model: &PopulationModel, hyp: DefectHypothesis, curtailed: bool) -> Result<f64> {
    check_double(plan, model)?;
    let first = model.sample(hyp, plan.n1)?;
    let (n1, n2) = (plan.n1 as f64, plan.n2 as f64);
    if !curtailed {
        let decided = first.cdf(plan.c1 as i64) + first.sf(plan.c2 as i64 + 1);
        return Ok(n1 * decided + (n1 + n2) * (1.0 - decided));
    }

    let mut asn = n1;
    for i in plan.c1 + 1..=plan.c2.min(plan.n1) {
        let p = first.pmf(i as i64);
        if p == 0.0 {
            continue;
        }
        let need = plan.c2 - i + 1;
        let second = stage_two(plan, model, hyp, i)?;
        let survive = second.cdf(need as i64 - 1);
        let stopped = match second {
            SampleDist::Hypergeometric { lot, defects, n } => {
                let shifted = SampleDist::hypergeometric(lot + 1, defects + 1, n + 1)?;
                need as f64 * (lot + 1) as f64 / (defects + 1) as f64 * shifted.sf(need as i64 + 1)
            }
            SampleDist::Binomial { n, p: q } => {
                if q == 0.0 {
                    0.0
                } else {
                    need as f64 / q * SampleDist::binomial(n + 1, q)?.sf(need as i64 + 1)
                }
            }
        };
        asn += p * (n2 * survive + stopped);
    }
    Ok(asn)
}

fn check_double(plan: &DoublePlan, model: &PopulationModel) -> Result<()> {
    if plan.c1 >= plan.c2 {
        return Err(QcError::domain(format!("need c1 < c2, got {} and {}", plan.c1, plan.c2)));
    }
    if let Some(lot) = model.lot_size() {
        if plan.n1 + plan.n2 > lot {
            return Err(QcError::domain("double plan inspects more items than the lot holds"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::absorb;
    use crate::plan::DecisionTable;

    fn lot(n: u64) -> PopulationModel {
        PopulationModel::without_replacement(n).unwrap()
    }

    #[test]
    fn defect_free_double() {
        let plan = DoublePlan { n1: 298, n2: 298, c1: 4, c2: 11, curtailed: false };
        let m = lot(1000);
        assert_eq!(oc_double(&plan, &m, DefectHypothesis::Count(0)).unwrap(), 1.0);
        assert_eq!(asn_double(&plan, &m, DefectHypothesis::Count(0), false).unwrap(), 298.0);
        assert_eq!(asn_double(&plan, &m, DefectHypothesis::Count(0), true).unwrap(), 298.0);
    }

    #[test]
    fn closed_forms_match_dynamic_program() {
        let m = lot(1000);
        for curtailed in [false, true] {
            let plan = DoublePlan { n1: 120, n2: 150, c1: 2, c2: 7, curtailed };
            let table = DecisionTable::double(&plan);
            for d in [0u64, 5, 20, 40, 80, 300] {
                let h = DefectHypothesis::Count(d);
                let dp = absorb(&table, &m, h).unwrap();
                assert!((oc_double(&plan, &m, h).unwrap() - dp.accept).abs() < 1e-12, "oc d={d}");
                let asn = asn_double(&plan, &m, h, curtailed).unwrap();
                assert!((asn - dp.asn).abs() < 1e-8, "asn d={d} curtailed={curtailed}: {asn} vs {}", dp.asn);
            }
        }
    }

    #[test]
    fn binomial_closed_forms_match_dynamic_program() {
        let m = PopulationModel::WithReplacement;
        let plan = DoublePlan { n1: 60, n2: 60, c1: 1, c2: 4, curtailed: true };
        let table = DecisionTable::double(&plan);
        for p in [0.0, 0.01, 0.05, 0.2] {
            let h = DefectHypothesis::Rate(p);
            let dp = absorb(&table, &m, h).unwrap();
            assert!((oc_double(&plan, &m, h).unwrap() - dp.accept).abs() < 1e-12);
            assert!((asn_double(&plan, &m, h, true).unwrap() - dp.asn).abs() < 1e-9);
        }
    }

    #[test]
    fn curtailment_never_increases_asn() {
        let m = lot(2000);
        let plan = DoublePlan { n1: 200, n2: 200, c1: 3, c2: 9, curtailed: false };
        for d in (0..=400).step_by(20) {
            let h = DefectHypothesis::Count(d);
            assert!(asn_double(&plan, &m, h, true).unwrap() <= asn_double(&plan, &m, h, false).unwrap() + 1e-9);
        }
    }
}
