//! Sampling plans, their serialized form, and the decision table every plan
//! compiles to.

use serde::{Deserialize, Serialize};

use crate::config::QualityConfig;
use crate::dist::{DefectHypothesis, PopulationModel};
use crate::error::{QcError, Result};

/// Version of the serialized plan document.
pub const SCHEMA_VERSION: u32 = 1;

/// Outcome of consulting a plan after some items have been inspected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Continue,
    Accept,
    Reject,
}

impl Verdict {
    pub fn is_final(self) -> bool {
        self != Verdict::Continue
    }
}

/// Inspect `n` items; accept when at most `c` are defective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SinglePlan {
    pub n: u64,
    pub c: u64,
}

/// Two-stage plan. Stage one accepts at `d1 <= c1` and rejects at `d1 > c2`;
/// otherwise stage two is drawn and the lot is accepted iff `d1 + d2 <= c2`.
/// With `curtailed` set, stage two stops as soon as the total exceeds `c2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublePlan {
    pub n1: u64,
    pub n2: u64,
    pub c1: u64,
    pub c2: u64,
    #[serde(default)]
    pub curtailed: bool,
}

/// Forced stopping point of a sequential plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub at: u64,
    pub accept_if_defects_leq: u64,
}

/// How a sequential plan is kept from running long.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curtailment {
    /// Plain SPRT. A finite lot ends at full inspection; with replacement the
    /// test is cut at ten times the single-plan sample size.
    None,
    /// SPRT cut at the single-plan size (three times that size with
    /// replacement), deciding there by the critical value.
    #[default]
    Truncated,
    /// Truncation plus linear boundaries that taper from the SPRT intercepts
    /// to the truncation decision point.
    Wedge,
}

/// Acceptable and rejectable quality in the model's native representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub accept: DefectHypothesis,
    pub reject: DefectHypothesis,
}

/// Item-by-item probability ratio test with truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequentialPlan {
    pub config: QualityConfig,
    pub model: PopulationModel,
    pub hypotheses: Hypotheses,
    pub log_a: f64,
    pub log_b: f64,
    pub truncation: Truncation,
    pub curtailment: Curtailment,
}

/// Any supported plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Plan {
    Single(SinglePlan),
    Double(DoublePlan),
    Sequential(SequentialPlan),
}

impl Plan {
    pub fn kind(&self) -> &'static str {
        match self {
            Plan::Single(_) => "single",
            Plan::Double(p) if p.curtailed => "double_curtailed",
            Plan::Double(_) => "double",
            Plan::Sequential(s) => match s.curtailment {
                Curtailment::None => "sequential",
                Curtailment::Truncated => "sequential_truncated",
                Curtailment::Wedge => "sequential_wedge",
            },
        }
    }

    /// Largest number of items the plan can inspect.
    pub fn max_sample(&self) -> u64 {
        match self {
            Plan::Single(p) => p.n,
            Plan::Double(p) => p.n1 + p.n2,
            Plan::Sequential(p) => p.truncation.at,
        }
    }

    pub fn decision_table(&self) -> Result<DecisionTable> {
        match self {
            Plan::Single(p) => Ok(DecisionTable::single(p)),
            Plan::Double(p) => Ok(DecisionTable::double(p)),
            Plan::Sequential(p) => p.decision_table(),
        }
    }

    /// Checks that the plan fits the lot.
    pub fn check_model(&self, model: &PopulationModel) -> Result<()> {
        if let Some(lot) = model.lot_size() {
            if self.max_sample() > lot {
                return Err(QcError::domain(format!(
                    "plan inspects up to {} items but the lot has {lot}",
                    self.max_sample()
                )));
            }
        }
        if let Plan::Sequential(s) = self {
            if s.model != *model {
                return Err(QcError::ModelMismatch(
                    "sequential plan was designed for a different population model".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Self-describing plan document exchanged between tools.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub schema_version: u32,
    pub config: QualityConfig,
    pub model: PopulationModel,
    pub plan: Plan,
}

impl PlanDocument {
    pub fn new(config: QualityConfig, model: PopulationModel, plan: Plan) -> Self {
        PlanDocument { schema_version: SCHEMA_VERSION, config, model, plan }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PlanDocument = serde_json::from_str(text)
            .map_err(|e| QcError::domain(format!("invalid plan document: {e}")))?;
        doc.validate()?;
        Ok(doc)
    }

    /// Checks the schema version, the configuration and that the plan fits
    /// the model.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(QcError::domain(format!(
                "unsupported plan schema version {}",
                self.schema_version
            )));
        }
        self.config.validate()?;
        self.plan.check_model(&self.model)?;
        self.plan.decision_table().map(|_| ())
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan documents always serialize")
    }
}

/// Boundary of the decision regions after `m` items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub m: u64,
    /// Largest defect count that accepts at `m`, if any.
    pub accept_max_d: Option<u64>,
    /// Smallest defect count that rejects at `m`, if any.
    pub reject_min_d: Option<u64>,
}

/// Map from `(m, d)` to a verdict, for `m` up to the plan's horizon.
///
/// At every `m` the plan accepts iff `d <= accept_max[m]` and rejects iff
/// `d >= reject_min[m]`, with `accept_max[m] < reject_min[m]`. At the
/// horizon the two are adjacent, so every path ends with a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTable {
    accept_max: Vec<i64>,
    reject_min: Vec<i64>,
}

impl DecisionTable {
    fn undecided(horizon: u64) -> Self {
        let len = horizon as usize + 1;
        DecisionTable {
            accept_max: vec![-1; len],
            reject_min: (0..len as i64).map(|m| m + 1).collect(),
        }
    }

    fn set(&mut self, m: u64, accept_max: i64, reject_min: i64) {
        let i = m as usize;
        self.accept_max[i] = accept_max.max(-1);
        self.reject_min[i] = reject_min.min(m as i64 + 1);
    }

    pub fn single(plan: &SinglePlan) -> Self {
        let mut t = Self::undecided(plan.n);
        t.set(plan.n, plan.c as i64, plan.c as i64 + 1);
        t
    }

    pub fn double(plan: &DoublePlan) -> Self {
        let end = plan.n1 + plan.n2;
        let mut t = Self::undecided(end);
        let reject = plan.c2 as i64 + 1;
        t.set(plan.n1, plan.c1 as i64, reject);
        if plan.curtailed {
            for m in plan.n1 + 1..end {
                t.set(m, -1, reject);
            }
        }
        t.set(end, plan.c2 as i64, reject);
        t
    }

    /// Last `m` at which the table is defined; every path stops by then.
    pub fn horizon(&self) -> u64 {
        self.accept_max.len() as u64 - 1
    }

    pub fn accept_max(&self, m: u64) -> i64 {
        self.accept_max[m as usize]
    }

    pub fn reject_min(&self, m: u64) -> i64 {
        self.reject_min[m as usize]
    }

    /// Verdict after `m` items with `d` defects.
    pub fn decide(&self, m: u64, d: u64) -> Verdict {
        debug_assert!(d <= m && m <= self.horizon());
        let d = d as i64;
        if d <= self.accept_max[m as usize] {
            Verdict::Accept
        } else if d >= self.reject_min[m as usize] {
            Verdict::Reject
        } else {
            Verdict::Continue
        }
    }

    /// Verdict for an ordered outcome sequence, with the number of items
    /// consumed. Outcomes past a final verdict are ignored.
    pub fn run<I: IntoIterator<Item = bool>>(&self, outcomes: I) -> (Verdict, u64, u64) {
        let (mut m, mut d) = (0u64, 0u64);
        let mut verdict = self.decide(0, 0);
        for defect in outcomes {
            if verdict.is_final() {
                break;
            }
            m += 1;
            d += u64::from(defect);
            verdict = self.decide(m, d);
        }
        (verdict, m, d)
    }

    /// Region boundaries for `m = 1..=horizon`.
    pub fn boundaries(&self) -> Vec<BoundaryPoint> {
        (1..=self.horizon())
            .map(|m| {
                let a = self.accept_max(m);
                let r = self.reject_min(m);
                BoundaryPoint {
                    m,
                    accept_max_d: (a >= 0).then_some(a as u64),
                    reject_min_d: (r <= m as i64).then_some(r as u64),
                }
            })
            .collect()
    }
}

/// Log-likelihood ratio of the rejectable against the acceptable hypothesis.
#[derive(Debug, Clone)]
pub(crate) enum Llr {
    /// Prefix sums of the per-defect and per-good-item terms. `defect[d]`
    /// covers `d <= D_a`; `good[g]` covers `g <= N - D_r`.
    Finite { defect: Vec<f64>, good: Vec<f64> },
    Rate { per_defect: f64, per_good: f64 },
}

impl Llr {
    pub(crate) fn new(model: &PopulationModel, hyp: &Hypotheses) -> Result<Self> {
        match (*model, hyp.accept, hyp.reject) {
            (PopulationModel::WithoutReplacement { lot_size }, DefectHypothesis::Count(da), DefectHypothesis::Count(dr)) => {
                if !(da < dr && dr <= lot_size) {
                    return Err(QcError::domain(format!(
                        "need D_a < D_r <= N, got D_a = {da}, D_r = {dr}, N = {lot_size}"
                    )));
                }
                let (n, da, dr) = (lot_size as f64, da as f64, dr as f64);
                let mut defect = vec![0.0];
                for j in 0..da as u64 {
                    let j = j as f64;
                    defect.push(defect.last().unwrap() + ((dr - j) / (da - j)).ln());
                }
                let mut good = vec![0.0];
                for j in 0..(n - dr) as u64 {
                    let j = j as f64;
                    good.push(good.last().unwrap() + ((n - dr - j) / (n - da - j)).ln());
                }
                Ok(Llr::Finite { defect, good })
            }
            (PopulationModel::WithReplacement, DefectHypothesis::Rate(pa), DefectHypothesis::Rate(pr)) => {
                if !(0.0 < pa && pa < pr && pr < 1.0) {
                    return Err(QcError::domain(format!("need 0 < p_a < p_r < 1, got {pa}, {pr}")));
                }
                Ok(Llr::Rate {
                    per_defect: (pr / pa).ln(),
                    per_good: ((1.0 - pr) / (1.0 - pa)).ln(),
                })
            }
            _ => Err(QcError::ModelMismatch(
                "hypotheses do not match the population model".into(),
            )),
        }
    }

    /// `Lambda(m, d)`; infinite when one hypothesis is ruled out.
    pub(crate) fn at(&self, m: u64, d: u64) -> f64 {
        match self {
            Llr::Finite { defect, good } => {
                let g = (m - d) as usize;
                if d as usize >= defect.len() {
                    f64::INFINITY
                } else if g >= good.len() {
                    f64::NEG_INFINITY
                } else {
                    defect[d as usize] + good[g]
                }
            }
            Llr::Rate { per_defect, per_good } => d as f64 * per_defect + (m - d) as f64 * per_good,
        }
    }

    /// Largest `d <= m` with `Lambda(m, d) <= bound`, or -1.
    pub(crate) fn max_d_at_most(&self, m: u64, bound: f64) -> i64 {
        crate::roots::last_true(0, m, |d| self.at(m, d) <= bound).map_or(-1, |d| d as i64)
    }

    /// Smallest `d <= m` with `Lambda(m, d) >= bound`, or `m + 1`.
    pub(crate) fn min_d_at_least(&self, m: u64, bound: f64) -> i64 {
        crate::roots::first_true(0, m, |d| self.at(m, d) >= bound).map_or(m as i64 + 1, |d| d as i64)
    }
}

impl SequentialPlan {
    /// `Lambda(m, d)` for this plan's hypotheses.
    pub fn log_likelihood_ratio(&self, m: u64, d: u64) -> Result<f64> {
        if d > m {
            return Err(QcError::domain(format!("defects {d} exceed inspected items {m}")));
        }
        Ok(Llr::new(&self.model, &self.hypotheses)?.at(m, d))
    }

    /// Pure SPRT verdict, ignoring truncation and curtailment.
    pub fn sprt_verdict(&self, m: u64, d: u64) -> Result<Verdict> {
        let l = self.log_likelihood_ratio(m, d)?;
        Ok(if m == 0 {
            Verdict::Continue
        } else if l >= self.log_a {
            Verdict::Reject
        } else if l <= self.log_b {
            Verdict::Accept
        } else {
            Verdict::Continue
        })
    }

    pub fn decision_table(&self) -> Result<DecisionTable> {
        if !(self.log_b < 0.0 && 0.0 < self.log_a) {
            return Err(QcError::domain("SPRT thresholds must satisfy ln B < 0 < ln A"));
        }
        let llr = Llr::new(&self.model, &self.hypotheses)?;
        let nt = self.truncation.at;
        let ct = self.truncation.accept_if_defects_leq as i64;
        if nt == 0 {
            return Err(QcError::domain("truncation point must be positive"));
        }
        if let Some(lot) = self.model.lot_size() {
            if nt > lot {
                return Err(QcError::domain(format!("truncation {nt} exceeds lot size {lot}")));
            }
        }

        // Wedge lines run from the binomial-equivalent SPRT intercepts at
        // m = 0 to (n_t, c_t + 1/2).
        let wedge = (self.curtailment == Curtailment::Wedge).then(|| {
            let pa = self.model.rate_of(self.hypotheses.accept);
            let pr = self.model.rate_of(self.hypotheses.reject);
            let slope = (pr / pa).ln() - ((1.0 - pr) / (1.0 - pa)).ln();
            (self.log_b / slope, self.log_a / slope)
        });

        let mut t = DecisionTable::undecided(nt);
        for m in 1..=nt {
            let mut acc = llr.max_d_at_most(m, self.log_b);
            let mut rej = llr.min_d_at_least(m, self.log_a);
            if m == nt {
                acc = acc.max(ct.min(rej - 1));
                rej = acc + 1;
            } else if let Some((ha, hr)) = wedge {
                let frac = m as f64 / nt as f64;
                let target = ct as f64 + 0.5;
                let a_line = (ha + (target - ha) * frac).floor() as i64;
                let r_line = (hr + (target - hr) * frac).ceil() as i64;
                acc = acc.max(a_line);
                rej = rej.min(r_line);
                if acc >= rej {
                    acc = rej - 1;
                }
            }
            t.set(m, acc, rej);
        }
        Ok(t)
    }
}
