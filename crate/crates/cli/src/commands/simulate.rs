use std::path::PathBuf;

use clap::Args;
use qcsample_core::eval::{asn, oc, simulate, SimulationReport};
use qcsample_core::{DefectHypothesis, PlanDocument, PopulationModel};
use serde::Serialize;

use super::plan::{hypothesis, model_rows};
use crate::args::{load_plan, plan_label, DesignArgs, Kind, ModelArgs, QualityArgs};
use crate::error::{CliError, Result};
use crate::report::{emit, num, Format, OutputArgs, Report};

/// Replay inspections of a lot with known quality.
///
/// The plan comes from `--plan-file` or is designed from the quality
/// levels for the lot. The lot is a bundled dataset, or a lot size with a
/// defect count, or `--binomial` with a defect rate.
#[derive(Debug, Args)]
pub struct SimulateCmd {
    /// Saved plan to run; design options are ignored when given.
    #[arg(long)]
    pub plan_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Kind::Single)]
    pub kind: Kind,
    /// Defects in the lot; overrides a dataset's count.
    #[arg(long, conflicts_with = "rate")]
    pub defects: Option<u64>,
    /// True defect rate, with --binomial.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub quality: QualityArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub design: DesignArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct Analytic {
    accept_probability: f64,
    average_sample_number: f64,
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    dataset: Option<String>,
    model: PopulationModel,
    truth: DefectHypothesis,
    plan: &'a PlanDocument,
    simulation: SimulationReport,
    analytic: Analytic,
}

fn truth(cmd: &SimulateCmd, model: &PopulationModel, dataset_truth: Option<DefectHypothesis>) -> Result<DefectHypothesis> {
    match model {
        PopulationModel::WithoutReplacement { lot_size } => {
            if cmd.rate.is_some() {
                return Err(CliError::usage("--rate applies to --binomial; give --defects for a finite lot"));
            }
            let hyp = cmd
                .defects
                .map(DefectHypothesis::Count)
                .or(dataset_truth)
                .ok_or_else(|| CliError::usage("give --defects for the lot"))?;
            if let DefectHypothesis::Count(d) = hyp {
                if d > *lot_size {
                    return Err(CliError::usage(format!("--defects {d} exceeds the lot size {lot_size}")));
                }
            }
            Ok(hyp)
        }
        PopulationModel::WithReplacement => {
            if cmd.defects.is_some() {
                return Err(CliError::usage("--defects needs a finite lot; give --rate with --binomial"));
            }
            let rate = cmd.rate.ok_or_else(|| CliError::usage("give --rate with --binomial"))?;
            Ok(model.hypothesis_from_rate(rate)?)
        }
    }
}

pub fn run(cmd: &SimulateCmd) -> Result<()> {
    if cmd.reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    let dataset = cmd.model.dataset()?;
    let doc = match &cmd.plan_file {
        Some(path) => load_plan(path)?,
        None => {
            let config = cmd.quality.resolve()?;
            let model = cmd.model.require()?;
            PlanDocument::new(config, model, cmd.design.design(cmd.kind, &config, &model)?)
        }
    };
    let model = cmd.model.resolve()?.unwrap_or(doc.model);
    let truth = truth(cmd, &model, dataset.as_ref().map(|d| d.truth()))?;
    doc.plan.check_model(&model)?;
    let analytic = Analytic {
        accept_probability: oc(&doc.plan, &model, truth)?,
        average_sample_number: asn(&doc.plan, &model, truth)?,
    };
    let sim = simulate(&doc.plan, &model, truth, cmd.reps, cmd.seed)?;

    let mut rows = vec![("plan", plan_label(&doc.plan))];
    if let Some(d) = &dataset {
        rows.push(("dataset", d.name.clone()));
    }
    rows.extend(model_rows(&model));
    rows.extend([
        ("truth", hypothesis(truth)),
        ("repetitions", sim.repetitions.to_string()),
        ("seed", sim.seed.to_string()),
        ("accept_count", sim.accept_count.to_string()),
        ("reject_count", sim.reject_count.to_string()),
        ("accept_rate", num(sim.accept_rate())),
        ("reject_rate", num(sim.reject_rate())),
        ("mean_sample_number", num(sim.mean_sample_number)),
        ("sample_number_stddev", num(sim.sample_number_stddev)),
        ("analytic_accept_probability", num(analytic.accept_probability)),
        ("analytic_average_sample_number", num(analytic.average_sample_number)),
    ]);
    let json = SimulateReport {
        dataset: dataset.map(|d| d.name),
        model,
        truth,
        plan: &doc,
        simulation: sim,
        analytic,
    };
    emit(&cmd.output, &Report::fields(rows, &json), Format::Table)
}
