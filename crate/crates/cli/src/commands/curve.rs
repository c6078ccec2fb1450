use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qcsample_core::eval::curve::{curve, margin_of_error_curve, Metric, Sweep};
use qcsample_core::{PlanDocument, PopulationModel};
use serde::Serialize;

use crate::args::{load_plan, plan_label, DesignArgs, Kind, ModelArgs, QualityArgs};
use crate::error::{CliError, Result};
use crate::report::{emit, num, Format, OutputArgs, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    /// Probability of acceptance against the true defect rate.
    Oc,
    /// Average sample number against the true defect rate.
    Asn,
    /// Margin of error against the sample size.
    Moe,
}

/// Export a curve as data for plotting.
///
/// `oc` and `asn` sweep the true defect rate over `steps + 1` points of
/// `[0, max-rate]` for every plan. `moe` sweeps the sample size at a fixed
/// assumed rate, with alpha taken from the quality levels.
#[derive(Debug, Args)]
pub struct CurveCmd {
    #[arg(value_enum)]
    pub metric: MetricArg,
    /// Plan kinds to design and sweep.
    #[arg(long = "kind", value_enum, value_delimiter = ',', default_value = "single")]
    pub kinds: Vec<Kind>,
    /// Sweep saved plans instead of designing them.
    #[arg(long = "plan-file", conflicts_with_all = ["kinds", "paired_binomial"])]
    pub plan_files: Vec<PathBuf>,
    /// Also design every plan with replacement and sweep it on the same grid.
    #[arg(long)]
    pub paired_binomial: bool,
    #[arg(long, default_value_t = 0.1)]
    pub max_rate: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// moe: assumed defect rate.
    #[arg(long, default_value_t = 0.05)]
    pub rate: f64,
    /// moe: smallest sample size.
    #[arg(long, default_value_t = 10)]
    pub n_min: u64,
    /// moe: largest sample size.
    #[arg(long, default_value_t = 500)]
    pub n_max: u64,
    /// moe: sample-size step.
    #[arg(long, default_value_t = 10)]
    pub n_step: u64,
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
struct PlanRow {
    p: f64,
    #[serde(rename = "D")]
    d: Option<u64>,
    metric: Metric,
    value: f64,
    plan: String,
    model: &'static str,
}

#[derive(Serialize)]
struct MoeRow {
    n: u64,
    rate: f64,
    alpha: f64,
    margin_of_error: f64,
    model: &'static str,
}

pub fn run(cmd: &CurveCmd) -> Result<()> {
    let report = match cmd.metric {
        MetricArg::Moe => moe_report(cmd)?,
        MetricArg::Oc => plan_report(cmd, Metric::Oc)?,
        MetricArg::Asn => plan_report(cmd, Metric::Asn)?,
    };
    emit(&cmd.output, &report, Format::Csv)
}

fn models(cmd: &CurveCmd, primary: PopulationModel) -> Vec<PopulationModel> {
    let mut out = vec![primary];
    if cmd.paired_binomial && primary != PopulationModel::WithReplacement {
        out.push(PopulationModel::WithReplacement);
    }
    out
}

/// The plans to sweep, each with the model it is evaluated under.
fn plans(cmd: &CurveCmd) -> Result<Vec<PlanDocument>> {
    if !cmd.plan_files.is_empty() {
        return cmd.plan_files.iter().map(|p| load_plan(p)).collect();
    }
    let config = cmd.quality.resolve()?;
    let primary = cmd.model.require()?;
    let mut docs = Vec::new();
    for model in models(cmd, primary) {
        for &kind in &cmd.kinds {
            docs.push(PlanDocument::new(config, model, cmd.design.design(kind, &config, &model)?));
        }
    }
    Ok(docs)
}

fn plan_report(cmd: &CurveCmd, metric: Metric) -> Result<Report> {
    if !(cmd.max_rate > 0.0 && cmd.max_rate <= 1.0) {
        return Err(CliError::usage(format!("--max-rate {} is not in (0, 1]", cmd.max_rate)));
    }
    if cmd.steps == 0 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    let sweep = Sweep::rate_grid(cmd.max_rate, cmd.steps);
    let mut rows = Vec::new();
    for doc in plans(cmd)? {
        let label = plan_label(&doc.plan);
        for pt in curve(&doc.plan, &doc.model, &sweep, metric)? {
            rows.push(PlanRow { p: pt.p, d: pt.d, metric, value: pt.value, plan: label.clone(), model: doc.model.label() });
        }
    }
    let cells = rows
        .iter()
        .map(|r| {
            let d = r.d.map(|d| d.to_string()).unwrap_or_default();
            vec![num(r.p), d, r.metric.label().into(), num(r.value), r.plan.clone(), r.model.into()]
        })
        .collect();
    Ok(Report::rows(&["p", "D", "metric", "value", "plan", "model"], cells, &rows))
}

fn moe_report(cmd: &CurveCmd) -> Result<Report> {
    if cmd.n_min == 0 || cmd.n_step == 0 || cmd.n_max < cmd.n_min {
        return Err(CliError::usage("need 1 <= --n-min <= --n-max and --n-step >= 1"));
    }
    let config = cmd.quality.resolve()?;
    let primary = cmd.model.require()?;
    let sizes: Vec<u64> = (cmd.n_min..=cmd.n_max).step_by(cmd.n_step as usize).collect();
    let mut rows = Vec::new();
    for model in models(cmd, primary) {
        for (n, moe) in margin_of_error_curve(&model, cmd.rate, config.alpha, &sizes)? {
            rows.push(MoeRow { n, rate: cmd.rate, alpha: config.alpha, margin_of_error: moe, model: model.label() });
        }
    }
    let cells = rows
        .iter()
        .map(|r| vec![r.n.to_string(), num(r.rate), num(r.alpha), num(r.margin_of_error), r.model.into()])
        .collect();
    Ok(Report::rows(&["n", "rate", "alpha", "margin_of_error", "model"], cells, &rows))
}
