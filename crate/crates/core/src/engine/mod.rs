//! Monte Carlo experiments and reports.

mod report;
mod sim;
mod stats;

pub use report::{capacity_report, check_superposition, CapacityReport, CoopReport, SuperpositionCheck, SuperpositionPoint};
pub use sim::{monte_carlo, monte_carlo_timed, rate_sweep, CsvRow, SimResult, SimRun};
pub use stats::clopper_pearson;

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelConfig, ChannelError};
use crate::codecs::CodecError;
use crate::regions::RegionError;

/// Elementary metric operations allowed per run unless the config says otherwise.
pub const DEFAULT_OP_BUDGET: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    NoncoopFf,
    NoncoopAwgn,
    CoopDoubleIndex,
    CoopSuperposition,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::NoncoopFf => "noncoop_ff",
            Scheme::NoncoopAwgn => "noncoop_awgn",
            Scheme::CoopDoubleIndex => "coop_double_index",
            Scheme::CoopSuperposition => "coop_superposition",
        }
    }

    pub fn is_coop(self) -> bool {
        matches!(self, Scheme::CoopDoubleIndex | Scheme::CoopSuperposition)
    }
}

/// One experiment. In JSON the channel fields sit at the top level next to
/// the simulation fields.
///
/// Exactly one of `rate`, `rates` and `codebook_sizes` must be given. Rates
/// become codebook sizes `round(2^(n R))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(flatten)]
    pub channel: ChannelConfig,
    pub scheme: Scheme,
    pub n: usize,
    /// Message blocks (cooperative schemes only).
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codebook_sizes: Option<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; results do not depend on it, so it is not echoed.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op_budget: Option<f64>,
}

impl SimConfig {
    pub fn from_json(s: &str) -> Result<SimConfig, EngineError> {
        serde_json::from_str(s).map_err(|e| EngineError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("scheme {scheme} cannot run here: {reason}")]
    IncompatibleScheme { scheme: &'static str, reason: String },
    #[error("about {ops:.3e} metric operations requested, budget is {budget:.3e}; raise op_budget to run anyway")]
    BudgetExceeded { ops: f64, budget: f64 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

impl EngineError {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            EngineError::BudgetExceeded { .. } => 2,
            EngineError::Invariant(_) => 3,
            _ => 1,
        }
    }
}
