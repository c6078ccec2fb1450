//! Plan search under the two-point risk constraints
//! `OC(p_a) >= 1 - alpha` and `OC(p_r) <= beta`.

mod double;
mod sequential;
mod single;

use serde::{Deserialize, Serialize};

pub use double::{design_double, double_design_oc};
pub use sequential::design_sequential;
pub use single::design_single;

/// How the consumer's risk enters the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsumerRisk {
    /// Require `OC(p_r) <= beta / 2`.
    #[default]
    Halved,
    /// Require `OC(p_r) <= beta`.
    Nominal,
}

impl ConsumerRisk {
    pub fn target(self, beta: f64) -> f64 {
        match self {
            ConsumerRisk::Halved => beta / 2.0,
            ConsumerRisk::Nominal => beta,
        }
    }
}

/// Law of the second-stage defect count used while searching double plans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage2Model {
    /// Stage two drawn as a fresh sample of size `n2` from the full lot.
    #[default]
    Independent,
    /// Stage two drawn from the remaining `N - n1` items holding `D - d1`
    /// defects.
    Conditional,
}

/// Search settings shared by the plan designers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    pub consumer_risk: ConsumerRisk,
    pub stage2: Stage2Model,
    /// Largest combined acceptance number tried for double plans.
    pub c2_max: u64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            consumer_risk: ConsumerRisk::Halved,
            stage2: Stage2Model::Independent,
            c2_max: 50,
        }
    }
}

/// Upper limit on sample sizes searched with replacement.
pub(crate) const UNBOUNDED_SEARCH_CAP: u64 = 1 << 24;
