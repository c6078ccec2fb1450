use serde::{Deserialize, Serialize};

use crate::dist::{DefectHypothesis, PopulationModel};
use crate::error::{QcError, Result};

/// Target quality levels: the two risk points of an acceptance plan plus the
/// half-width used for interval planning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityConfig {
    /// Acceptable defect rate.
    pub p_a: f64,
    /// Rejectable defect rate.
    pub p_r: f64,
    /// Producer's risk: chance of rejecting a lot at `p_a`.
    pub alpha: f64,
    /// Consumer's risk: chance of accepting a lot at `p_r`.
    pub beta: f64,
    /// Interval half-width for sample-size planning.
    pub ci_half_width: f64,
}

impl QualityConfig {
    pub const STRICT: QualityConfig = QualityConfig {
        p_a: 0.01,
        p_r: 0.03,
        alpha: 0.01,
        beta: 0.10,
        ci_half_width: 0.01,
    };

    pub const RELAXED: QualityConfig = QualityConfig {
        p_a: 0.02,
        p_r: 0.05,
        alpha: 0.05,
        beta: 0.20,
        ci_half_width: 0.02,
    };

    pub fn preset(name: &str) -> Option<QualityConfig> {
        match name {
            "strict" => Some(Self::STRICT),
            "relaxed" => Some(Self::RELAXED),
            _ => None,
        }
    }

    /// Checks `0 < p_a < p_r < 1`, `1 > 1 - alpha > beta > 0` and a positive
    /// half-width.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.p_a, self.p_r, self.alpha, self.beta, self.ci_half_width]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(QcError::config("config", "all parameters must be finite"));
        }
        if !(self.p_a > 0.0 && self.p_a < 1.0) {
            return Err(QcError::config("p_a", format!("{} is not in (0, 1)", self.p_a)));
        }
        if !(self.p_r > 0.0 && self.p_r < 1.0) {
            return Err(QcError::config("p_r", format!("{} is not in (0, 1)", self.p_r)));
        }
        if self.p_a >= self.p_r {
            return Err(QcError::config(
                "p_r",
                format!("p_a = {} must be below p_r = {}", self.p_a, self.p_r),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(QcError::config("alpha", format!("{} is not in (0, 1)", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0 - self.alpha) {
            return Err(QcError::config(
                "beta",
                format!("{} is not in (0, 1 - alpha)", self.beta),
            ));
        }
        if !(self.ci_half_width > 0.0 && self.ci_half_width < 1.0) {
            return Err(QcError::config(
                "ci_half_width",
                format!("{} is not in (0, 1)", self.ci_half_width),
            ));
        }
        Ok(())
    }

    /// Acceptable and rejectable hypotheses in the model's native form.
    /// Without replacement, rounding must keep the two counts distinct.
    pub fn hypotheses(&self, model: &PopulationModel) -> Result<(DefectHypothesis, DefectHypothesis)> {
        self.validate()?;
        let acc = model.hypothesis_from_rate(self.p_a)?;
        let rej = model.hypothesis_from_rate(self.p_r)?;
        if let (DefectHypothesis::Count(da), DefectHypothesis::Count(dr)) = (acc, rej) {
            if da >= dr {
                return Err(QcError::config(
                    "lot_size",
                    format!("lot too small: p_a and p_r both round to {da}..{dr} defects"),
                ));
            }
        }
        Ok((acc, rej))
    }

    /// SPRT thresholds `(ln A, ln B)` for the given consumer risk.
    pub fn sprt_thresholds(&self, beta: f64) -> (f64, f64) {
        (((1.0 - beta) / self.alpha).ln(), (beta / (1.0 - self.alpha)).ln())
    }
}
