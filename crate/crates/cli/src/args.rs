//! Argument groups shared by several subcommands.

use std::path::Path;

use clap::{Args, ValueEnum};
use qcsample_core::datasets::{self, DatasetDescriptor};
use qcsample_core::design::{design_double, design_sequential, design_single, ConsumerRisk, DesignOptions};
use qcsample_core::plan::{Curtailment, DoublePlan};
use qcsample_core::{Plan, PlanDocument, PopulationModel, QualityConfig};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Strict,
    Relaxed,
}

/// Quality levels: a preset with field-wise overrides.
#[derive(Debug, Clone, Args)]
pub struct QualityArgs {
    #[arg(long, value_enum, default_value_t = Preset::Strict)]
    pub preset: Preset,
    /// Acceptable defect rate.
    #[arg(long)]
    pub pa: Option<f64>,
    /// Rejectable defect rate.
    #[arg(long)]
    pub pr: Option<f64>,
    /// Producer's risk.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Consumer's risk.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Interval half-width for sample-size planning.
    #[arg(long)]
    pub half_width: Option<f64>,
}

impl QualityArgs {
    pub fn resolve(&self) -> Result<QualityConfig> {
        let mut c = match self.preset {
            Preset::Strict => QualityConfig::STRICT,
            Preset::Relaxed => QualityConfig::RELAXED,
        };
        let overrides = [
            (self.pa, &mut c.p_a),
            (self.pr, &mut c.p_r),
            (self.alpha, &mut c.alpha),
            (self.beta, &mut c.beta),
            (self.half_width, &mut c.ci_half_width),
        ];
        for (value, field) in overrides {
            if let Some(v) = value {
                *field = v;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

/// Population model: a lot size, a bundled dataset's lot, or sampling with
/// replacement.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Lot size; items are drawn without replacement.
    #[arg(long, conflicts_with_all = ["binomial", "dataset"])]
    pub lot_size: Option<u64>,
    /// Draw with replacement (binomial model).
    #[arg(long, conflicts_with = "dataset")]
    pub binomial: bool,
    /// Bundled dataset whose lot size to use (conll2003, imdb).
    #[arg(long)]
    pub dataset: Option<String>,
}

impl ModelArgs {
    pub fn dataset(&self) -> Result<Option<DatasetDescriptor>> {
        let Some(name) = self.dataset.as_deref() else { return Ok(None) };
        datasets::find(name).map(Some).ok_or_else(|| {
            let known: Vec<_> = datasets::bundled().into_iter().map(|d| d.name).collect();
            CliError::usage(format!("unknown dataset {name:?}; bundled datasets: {}", known.join(", ")))
        })
    }

    pub fn resolve(&self) -> Result<Option<PopulationModel>> {
        if self.binomial {
            return Ok(Some(PopulationModel::WithReplacement));
        }
        if let Some(n) = self.lot_size {
            return Ok(Some(PopulationModel::without_replacement(n)?));
        }
        Ok(self.dataset()?.map(|d| d.model()))
    }

    pub fn require(&self) -> Result<PopulationModel> {
        self.resolve()?.ok_or_else(|| CliError::usage("a population model is required: --lot-size, --dataset or --binomial"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Single,
    Double,
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurtailmentArg {
    None,
    Truncated,
    Wedge,
}

impl From<CurtailmentArg> for Curtailment {
    fn from(c: CurtailmentArg) -> Self {
        match c {
            CurtailmentArg::None => Curtailment::None,
            CurtailmentArg::Truncated => Curtailment::Truncated,
            CurtailmentArg::Wedge => Curtailment::Wedge,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RiskArg {
    /// Search with OC(p_r) <= beta / 2.
    Halved,
    /// Search with OC(p_r) <= beta.
    Nominal,
}

/// Plan-search settings.
#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    /// Sequential plans: how the test is kept short.
    #[arg(long, value_enum, default_value_t = CurtailmentArg::Truncated)]
    pub curtailment: CurtailmentArg,
    /// Double plans: stop stage two once rejection is certain.
    #[arg(long)]
    pub curtailed: bool,
    /// Consumer-risk target of the search.
    #[arg(long, value_enum, default_value_t = RiskArg::Halved)]
    pub consumer_risk: RiskArg,
}

impl DesignArgs {
    pub fn options(&self) -> DesignOptions {
        let consumer_risk = match self.consumer_risk {
            RiskArg::Halved => ConsumerRisk::Halved,
            RiskArg::Nominal => ConsumerRisk::Nominal,
        };
        DesignOptions { consumer_risk, ..DesignOptions::default() }
    }

    pub fn design(&self, kind: Kind, config: &QualityConfig, model: &PopulationModel) -> Result<Plan> {
        let opts = self.options();
        Ok(match kind {
            Kind::Single => Plan::Single(design_single(config, model, &opts)?),
            Kind::Double => {
                let plan = design_double(config, model, &opts)?;
                Plan::Double(DoublePlan { curtailed: self.curtailed, ..plan })
            }
            Kind::Sequential => Plan::Sequential(design_sequential(config, model, self.curtailment.into(), &opts)?),
        })
    }
}

/// Loads and validates a plan document.
pub fn load_plan(path: &Path) -> Result<PlanDocument> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    Ok(PlanDocument::from_json(&text)?)
}

/// Compact one-line description of a plan.
pub fn plan_label(plan: &Plan) -> String {
    match plan {
        Plan::Single(p) => format!("single n={} c={}", p.n, p.c),
        Plan::Double(p) => format!("{} n1={} n2={} c1={} c2={}", plan.kind(), p.n1, p.n2, p.c1, p.c2),
        Plan::Sequential(s) => format!(
            "{} n_t={} c_t={}",
            plan.kind(),
            s.truncation.at,
            s.truncation.accept_if_defects_leq
        ),
    }
}
