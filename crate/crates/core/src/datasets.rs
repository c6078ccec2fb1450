//! Lot descriptors of the bundled replay datasets.

use serde::{Deserialize, Serialize};

use crate::dist::{DefectHypothesis, PopulationModel};
use crate::error::{QcError, Result};

const REGISTRY: &str = include_str!("../data/datasets.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub name: String,
    pub lot_size: u64,
    pub defect_count: u64,
}

impl DatasetDescriptor {
    pub fn new(name: impl Into<String>, lot_size: u64, defect_count: u64) -> Result<Self> {
        if lot_size == 0 || defect_count > lot_size {
            return Err(QcError::domain(format!(
                "need 0 <= D <= N and N >= 1, got D = {defect_count}, N = {lot_size}"
            )));
        }
        Ok(DatasetDescriptor { name: name.into(), lot_size, defect_count })
    }

    pub fn defect_rate(&self) -> f64 {
        self.defect_count as f64 / self.lot_size as f64
    }

    pub fn model(&self) -> PopulationModel {
        PopulationModel::WithoutReplacement { lot_size: self.lot_size }
    }

    pub fn truth(&self) -> DefectHypothesis {
        DefectHypothesis::Count(self.defect_count)
    }
}

/// Parses a registry: a JSON array of `{name, lot_size, defect_count}`.
pub fn parse_registry(text: &str) -> Result<Vec<DatasetDescriptor>> {
    let raw: Vec<DatasetDescriptor> = serde_json::from_str(text)
        .map_err(|e| QcError::domain(format!("invalid dataset registry: {e}")))?;
    raw.into_iter()
        .map(|d| DatasetDescriptor::new(d.name, d.lot_size, d.defect_count))
        .collect()
}

/// Datasets shipped with the crate.
pub fn bundled() -> Vec<DatasetDescriptor> {
    parse_registry(REGISTRY).expect("bundled registry is valid")
}

/// Looks up a bundled dataset by case-insensitive name, ignoring `-`/`_`.
pub fn find(name: &str) -> Option<DatasetDescriptor> {
    let norm = |s: &str| s.to_ascii_lowercase().replace(['-', '_'], "");
    bundled().into_iter().find(|d| norm(&d.name) == norm(name))
}
