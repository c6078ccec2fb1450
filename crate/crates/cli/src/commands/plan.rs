use clap::Args;
use qcsample_core::eval::{asn, oc};
use qcsample_core::{DefectHypothesis, Plan, PlanDocument, PopulationModel};
use serde::Serialize;

use crate::args::{DesignArgs, Kind, ModelArgs, QualityArgs};
use crate::error::Result;
use crate::report::{emit, num, Format, OutputArgs, Report};

/// Design a plan and print it with its risks and average sample numbers.
#[derive(Debug, Args)]
pub struct PlanCmd {
    #[arg(value_enum)]
    pub kind: Kind,
    #[command(flatten)]
    pub quality: QualityArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub design: DesignArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Risks and average sample numbers at the two quality levels.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Evaluation {
    pub oc_at_p_a: f64,
    pub oc_at_p_r: f64,
    pub asn_at_p_a: f64,
    pub asn_at_p_r: f64,
}

pub fn evaluate(doc: &PlanDocument) -> Result<Evaluation> {
    let (acc, rej) = doc.config.hypotheses(&doc.model)?;
    Ok(Evaluation {
        oc_at_p_a: oc(&doc.plan, &doc.model, acc)?,
        oc_at_p_r: oc(&doc.plan, &doc.model, rej)?,
        asn_at_p_a: asn(&doc.plan, &doc.model, acc)?,
        asn_at_p_r: asn(&doc.plan, &doc.model, rej)?,
    })
}

/// The plan document with its evaluation; loadable as a plan file.
#[derive(Serialize)]
struct PlanReport<'a> {
    #[serde(flatten)]
    document: &'a PlanDocument,
    evaluation: Evaluation,
}

pub fn run(cmd: &PlanCmd) -> Result<()> {
    let config = cmd.quality.resolve()?;
    let model = cmd.model.require()?;
    let plan = cmd.design.design(cmd.kind, &config, &model)?;
    let doc = PlanDocument::new(config, model, plan);
    emit(&cmd.output, &report(&doc)?, Format::Table)
}

pub fn report(doc: &PlanDocument) -> Result<Report> {
    let evaluation = evaluate(doc)?;
    let mut rows = vec![("kind", doc.plan.kind().to_string())];
    rows.extend(model_rows(&doc.model));
    rows.extend([
        ("p_a", num(doc.config.p_a)),
        ("p_r", num(doc.config.p_r)),
        ("alpha", num(doc.config.alpha)),
        ("beta", num(doc.config.beta)),
    ]);
    match doc.plan {
        Plan::Single(p) => rows.extend([("n", p.n.to_string()), ("c", p.c.to_string())]),
        Plan::Double(p) => rows.extend([
            ("n1", p.n1.to_string()),
            ("n2", p.n2.to_string()),
            ("c1", p.c1.to_string()),
            ("c2", p.c2.to_string()),
            ("curtailed", p.curtailed.to_string()),
        ]),
        Plan::Sequential(s) => rows.extend([
            ("accept_hypothesis", hypothesis(s.hypotheses.accept)),
            ("reject_hypothesis", hypothesis(s.hypotheses.reject)),
            ("log_a", num(s.log_a)),
            ("log_b", num(s.log_b)),
            ("truncation_at", s.truncation.at.to_string()),
            ("accept_if_defects_leq", s.truncation.accept_if_defects_leq.to_string()),
        ]),
    }
    rows.extend([
        ("oc_at_p_a", num(evaluation.oc_at_p_a)),
        ("oc_at_p_r", num(evaluation.oc_at_p_r)),
        ("asn_at_p_a", num(evaluation.asn_at_p_a)),
        ("asn_at_p_r", num(evaluation.asn_at_p_r)),
    ]);
    Ok(Report::fields(rows, &PlanReport { document: doc, evaluation }))
}

pub fn model_rows(model: &PopulationModel) -> Vec<(&'static str, String)> {
    let mut rows = vec![("model", model.label().to_string())];
    if let Some(n) = model.lot_size() {
        rows.push(("lot_size", n.to_string()));
    }
    rows
}

pub fn hypothesis(h: DefectHypothesis) -> String {
    match h {
        DefectHypothesis::Count(d) => format!("D={d}"),
        DefectHypothesis::Rate(p) => format!("p={p}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcsample_core::plan::SinglePlan;
    use qcsample_core::QualityConfig;

    #[test]
    fn json_reloads_as_a_plan_document() {
        let model = PopulationModel::without_replacement(1000).unwrap();
        let doc = PlanDocument::new(QualityConfig::STRICT, model, Plan::Single(SinglePlan { n: 428, c: 8 }));
        let text = report(&doc).unwrap().render(Format::Json).unwrap();
        assert_eq!(PlanDocument::from_json(&text).unwrap(), doc);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["evaluation"]["oc_at_p_a"].as_f64().unwrap() >= 0.99);
    }
}
