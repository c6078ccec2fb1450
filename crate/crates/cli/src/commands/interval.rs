use clap::{Args, ValueEnum};
use qcsample_core::interval::{exact_interval, required_sample_size_with, ProportionInterval, SampleSizeMethod};
use qcsample_core::PopulationModel;
use serde::Serialize;

use super::plan::model_rows;
use crate::args::{ModelArgs, QualityArgs};
use crate::error::Result;
use crate::report::{emit, num, Format, OutputArgs, Report};

/// Exact interval for the defect rate after finding `k` defects in `n` items.
#[derive(Debug, Args)]
pub struct CiCmd {
    /// Items inspected.
    #[arg(long)]
    pub n: u64,
    /// Defects found.
    #[arg(long)]
    pub k: u64,
    /// One minus the confidence level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct CiReport {
    n: u64,
    k: u64,
    alpha: f64,
    model: PopulationModel,
    #[serde(flatten)]
    interval: ProportionInterval,
    half_width: f64,
}

pub fn run_ci(cmd: &CiCmd) -> Result<()> {
    let model = cmd.model.require()?;
    let interval = exact_interval(&model, cmd.n, cmd.k, cmd.alpha)?;
    let mut rows = vec![("n", cmd.n.to_string()), ("k", cmd.k.to_string()), ("alpha", num(cmd.alpha))];
    rows.extend(model_rows(&model));
    rows.extend([
        ("point_estimate", num(interval.point_estimate)),
        ("lower", num(interval.lower)),
        ("upper", num(interval.upper)),
        ("half_width", num(interval.half_width())),
        ("confidence", num(interval.confidence)),
    ]);
    if let (Some(lo), Some(hi)) = (interval.lower_count, interval.upper_count) {
        rows.extend([("lower_count", lo.to_string()), ("upper_count", hi.to_string())]);
    }
    let json = CiReport { n: cmd.n, k: cmd.k, alpha: cmd.alpha, model, interval, half_width: interval.half_width() };
    emit(&cmd.output, &Report::fields(rows, &json), Format::Table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    /// The acceptable rate p_a.
    Pa,
    /// The rejectable rate p_r.
    Pr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Brent,
    Conservative,
}

/// Sample size whose exact interval meets the half-width at the assumed rate.
///
/// Alpha and half-width come from the quality levels; the assumed rate is
/// `--rate`, or p_a or p_r of the quality levels.
#[derive(Debug, Args)]
pub struct SampleSizeCmd {
    /// Assumed defect rate.
    #[arg(long, conflicts_with = "at")]
    pub rate: Option<f64>,
    /// Quality level used as the assumed rate when --rate is absent.
    #[arg(long, value_enum, default_value_t = Level::Pa)]
    pub at: Level,
    #[arg(long, value_enum, default_value_t = MethodArg::Brent)]
    pub method: MethodArg,
    #[command(flatten)]
    pub quality: QualityArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Serialize)]
struct SampleSizeReport {
    model: PopulationModel,
    rate: f64,
    half_width: f64,
    alpha: f64,
    method: SampleSizeMethod,
    n: u64,
}

pub fn run_sample_size(cmd: &SampleSizeCmd) -> Result<()> {
    let config = cmd.quality.resolve()?;
    let model = cmd.model.require()?;
    let rate = cmd.rate.unwrap_or(match cmd.at {
        Level::Pa => config.p_a,
        Level::Pr => config.p_r,
    });
    let method = match cmd.method {
        MethodArg::Brent => SampleSizeMethod::Brent,
        MethodArg::Conservative => SampleSizeMethod::Conservative,
    };
    let (half_width, alpha) = (config.ci_half_width, config.alpha);
    let n = required_sample_size_with(&model, rate, half_width, alpha, method)?;
    let mut rows = model_rows(&model);
    rows.extend([
        ("rate", num(rate)),
        ("half_width", num(half_width)),
        ("alpha", num(alpha)),
        ("method", cmd.method.to_possible_value().expect("no skipped variants").get_name().to_string()),
        ("n", n.to_string()),
    ]);
    let json = SampleSizeReport { model, rate, half_width, alpha, method, n };
    emit(&cmd.output, &Report::fields(rows, &json), Format::Table)
}
