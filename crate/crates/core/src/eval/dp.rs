use crate::dist::{DefectHypothesis, PopulationModel};
use crate::error::{QcError, Result};
use crate::plan::DecisionTable;

/// Stopping probabilities and expected stopping time of a decision table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorption {
    pub accept: f64,
    pub reject: f64,
    pub asn: f64,
}

/// Propagates the reach probabilities of `(m, d)` through the table,
/// absorbing mass wherever the table decides.
///
/// Without replacement the next item is defective with probability
/// `(D - d) / (N - m)`, which makes the result exact for the finite lot.
pub fn absorb(table: &DecisionTable, model: &PopulationModel, hyp: DefectHypothesis) -> Result<Absorption> {
    let horizon = table.horizon();
    // Validates the model/hypothesis pair and the horizon against the lot.
    model.sample(hyp, horizon)?;
    let step: Box<dyn Fn(u64, u64) -> f64> = match (*model, hyp) {
        (PopulationModel::WithoutReplacement { lot_size }, DefectHypothesis::Count(total)) => {
            Box::new(move |m, d| {
                if d >= total {
                    0.0
                } else {
                    (total - d) as f64 / (lot_size - m) as f64
                }
            })
        }
        (PopulationModel::WithReplacement, DefectHypothesis::Rate(p)) => Box::new(move |_, _| p),
        _ => return Err(QcError::ModelMismatch("hypothesis does not match model".into())),
    };

    let mut prob = vec![0.0f64; horizon as usize + 2];
    prob[0] = 1.0;
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut out = Absorption { accept: 0.0, reject: 0.0, asn: 0.0 };

    for m in 0..=horizon {
        let a = table.accept_max(m);
        let r = table.reject_min(m);
        for d in lo..=hi {
            let p = prob[d];
            if p == 0.0 {
                continue;
            }
            let di = d as i64;
            if di <= a {
                out.accept += p;
            } else if di >= r {
                out.reject += p;
            } else {
                continue;
            }
            out.asn += p * m as f64;
            prob[d] = 0.0;
        }
        if m == horizon {
            break;
        }
        // Advance live states one item; walk downwards so each state is read
        // before its defect successor is written.
        let mut any = false;
        for d in (lo..=hi).rev() {
            let p = prob[d];
            if p == 0.0 {
                continue;
            }
            any = true;
            let q = step(m, d as u64);
            prob[d + 1] += p * q;
            prob[d] = p * (1.0 - q);
        }
        if !any {
            break;
        }
        hi += 1;
        while lo < hi && prob[lo] == 0.0 {
            lo += 1;
        }
        while hi > lo && prob[hi] == 0.0 {
            hi -= 1;
        }
    }
    Ok(out)
}
