//! Exact sampling statistics for inspecting annotated datasets.
//!
//! The crate covers three tasks:
//!
//! * estimating a lot's defect rate with exact intervals ([`interval`]),
//! * designing single, double and sequential acceptance-sampling plans
//!   ([`design`]),
//! * evaluating plans analytically and by simulation ([`eval`]).
//!
//! Every plan is reduced to a [`plan::DecisionTable`] that maps
//! `(items inspected, defects found)` to a [`plan::Verdict`]. Analytic
//! evaluation, simulation and live sessions all consult the same table.

pub mod config;
pub mod datasets;
pub mod design;
pub mod dist;
pub mod error;
pub mod eval;
pub mod interval;
pub mod plan;
pub mod roots;
mod util;

pub use config::QualityConfig;
pub use dist::{DefectHypothesis, PopulationModel, SampleDist};
pub use error::{QcError, Result};
pub use plan::{DecisionTable, Plan, PlanDocument, Verdict};
