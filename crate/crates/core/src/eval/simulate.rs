//! Monte Carlo inspection of a lot with a known number of defects.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{DefectHypothesis, PopulationModel};
use crate::error::{QcError, Result};
use crate::plan::{DecisionTable, Plan, Verdict};

/// Aggregate outcome of repeated simulated inspections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub repetitions: u64,
    pub accept_count: u64,
    pub reject_count: u64,
    pub mean_sample_number: f64,
    pub sample_number_stddev: f64,
    pub seed: u64,
}

impl SimulationReport {
    pub fn accept_rate(&self) -> f64 {
        self.accept_count as f64 / self.repetitions as f64
    }

    pub fn reject_rate(&self) -> f64 {
        self.reject_count as f64 / self.repetitions as f64
    }

    /// Standard error of the mean sample number.
    pub fn mean_std_error(&self) -> f64 {
        self.sample_number_stddev / (self.repetitions as f64).sqrt()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of repetition `index`; independent of execution order.
pub fn repetition_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Items of a finite lot revealed in uniformly random order. Only the
/// positions touched by the partial Fisher-Yates shuffle are stored.
struct LazyShuffle {
    lot: u64,
    defects: u64,
    drawn: u64,
    moved: HashMap<u64, u64>,
}

impl LazyShuffle {
    fn new(lot: u64, defects: u64) -> Self {
        LazyShuffle { lot, defects, drawn: 0, moved: HashMap::new() }
    }

    fn next_is_defect<R: Rng>(&mut self, rng: &mut R) -> bool {
        let t = self.drawn;
        let j = rng.gen_range(t..self.lot);
        let at_j = *self.moved.get(&j).unwrap_or(&j);
        let at_t = *self.moved.get(&t).unwrap_or(&t);
        self.moved.insert(j, at_t);
        self.drawn += 1;
        // Items 0..D are the defective ones.
        at_j < self.defects
    }
}

/// One inspection: `(verdict, items inspected)`.
pub fn run_once(table: &DecisionTable, model: &PopulationModel, truth: DefectHypothesis, seed: u64) -> (Verdict, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut m, mut d) = (0u64, 0u64);
    let mut verdict = table.decide(0, 0);
    let mut lot = match (*model, truth) {
        (PopulationModel::WithoutReplacement { lot_size }, DefectHypothesis::Count(k)) => Some(LazyShuffle::new(lot_size, k)),
        _ => None,
    };
    let rate = match truth {
        DefectHypothesis::Rate(p) => p,
        DefectHypothesis::Count(_) => 0.0,
    };
    while !verdict.is_final() {
        let defect = match lot.as_mut() {
            Some(l) => l.next_is_defect(&mut rng),
            None => rng.gen_bool(rate),
        };
        m += 1;
        d += u64::from(defect);
        verdict = table.decide(m, d);
    }
    (verdict, m)
}

/// Inspects `repetitions` independently shuffled lots with the plan.
///
/// Repetitions run in parallel; each draws from its own generator seeded by
/// [`repetition_seed`], so the report is identical to a sequential run.
pub fn simulate(
    plan: &Plan,
    model: &PopulationModel,
    truth: DefectHypothesis,
    repetitions: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if repetitions == 0 {
        return Err(QcError::domain("at least one repetition is required"));
    }
    plan.check_model(model)?;
    model.sample(truth, plan.max_sample())?;
    let table = plan.decision_table()?;

    let runs: Vec<(Verdict, u64)> = (0..repetitions)
        .into_par_iter()
        .map(|i| run_once(&table, model, truth, repetition_seed(seed, i)))
        .collect();

    let accept_count = runs.iter().filter(|(v, _)| *v == Verdict::Accept).count() as u64;
    let n = repetitions as f64;
    let mean = runs.iter().map(|&(_, m)| m as f64).sum::<f64>() / n;
    let var = if repetitions > 1 {
        runs.iter().map(|&(_, m)| (m as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(SimulationReport {
        repetitions,
        accept_count,
        reject_count: repetitions - accept_count,
        mean_sample_number: mean,
        sample_number_stddev: var.sqrt(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::SinglePlan;

    #[test]
    fn lazy_shuffle_is_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut lot = LazyShuffle::new(50, 13);
        let defects = (0..50).filter(|_| lot.next_is_defect(&mut rng)).count();
        assert_eq!(defects, 13);
    }

    #[test]
    fn defect_free_lot_always_accepted() {
        let plan = Plan::Single(SinglePlan { n: 30, c: 0 });
        let model = PopulationModel::without_replacement(100).unwrap();
        let rep = simulate(&plan, &model, DefectHypothesis::Count(0), 200, 1).unwrap();
        assert_eq!(rep.accept_count, 200);
        assert_eq!(rep.mean_sample_number, 30.0);
    }

    #[test]
    fn parallel_equals_sequential() {
        let plan = Plan::Single(SinglePlan { n: 30, c: 1 });
        let model = PopulationModel::without_replacement(100).unwrap();
        let truth = DefectHypothesis::Count(5);
        let rep = simulate(&plan, &model, truth, 500, 99).unwrap();
        let table = plan.decision_table().unwrap();
        let accepts = (0..500)
            .filter(|&i| run_once(&table, &model, truth, repetition_seed(99, i)).0 == Verdict::Accept)
            .count() as u64;
        assert_eq!(rep.accept_count, accepts);
        assert_eq!(rep, simulate(&plan, &model, truth, 500, 99).unwrap());
    }

    #[test]
    fn rejects_impossible_truth() {
        let plan = Plan::Single(SinglePlan { n: 30, c: 1 });
        let model = PopulationModel::without_replacement(100).unwrap();
        assert!(simulate(&plan, &model, DefectHypothesis::Count(101), 10, 0).is_err());
        assert!(simulate(&plan, &model, DefectHypothesis::Count(1), 0, 0).is_err());
    }
}
